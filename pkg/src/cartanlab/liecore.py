"""Finite-dimensional Lie algebras over F_p given by structure constants.

Vectors are coordinate rows.  A matrix A acts on a row v as v @ A.T, so
ad(x) @ y.T is [x, y] written as a column.
"""

import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import fp


class DimensionMismatch(ValueError):
    pass


# --------------------------------------------------------------------------
# subspaces

class Subspace:
    """Row space kept in reduced row echelon form."""

    __slots__ = ("p", "n", "rows", "pivots")

    def __init__(self, p, n, rows=None, pivots=None):
        self.p, self.n = p, n
        if rows is None:
            rows = np.zeros((0, n), dtype=np.int64)
        rows = fp.as_array(rows).reshape(-1, n)
        if pivots is None:
            rows, pivots = fp.rref(rows, p)
        self.rows = rows
        self.pivots = np.asarray(pivots, dtype=np.int64)

    @classmethod
    def span(cls, p, n, vectors):
        return cls(p, n, np.asarray(vectors, dtype=np.int64).reshape(-1, n))

    @classmethod
    def zero(cls, p, n):
        return cls(p, n)

    @classmethod
    def full(cls, p, n):
        return cls(p, n, np.eye(n, dtype=np.int64), np.arange(n))

    @property
    def dim(self):
        return len(self.pivots)

    def basis(self):
        return self.rows.copy()

    def _vecs(self, V):
        V = fp.as_array(V)
        if V.ndim == 1:
            V = V[None, :]
        if V.shape[1] != self.n:
            raise DimensionMismatch("vector length %d, ambient %d" % (V.shape[1], self.n))
        return V % self.p

    def reduce(self, V):
        V = self._vecs(V)
        if not self.dim:
            return V
        return (V - fp.matmul(V[:, self.pivots], self.rows, self.p)) % self.p

    def contains(self, v):
        return not self.reduce(v).any()

    def contains_all(self, V):
        return not self.reduce(V).any()

    def coords(self, V):
        V = self._vecs(V)
        if self.reduce(V).any():
            raise ValueError("vector outside subspace")
        return V[:, self.pivots].copy()

    def join(self, other):
        V = other.rows if isinstance(other, Subspace) else self._vecs(other)
        return Subspace(self.p, self.n, np.vstack([self.rows, V]))

    def intersect(self, other):
        # x = a A = b B  <=>  [a, -b] in the left kernel of [A; B]
        if not self.dim or not other.dim:
            return Subspace.zero(self.p, self.n)
        K = fp.left_nullspace(np.vstack([self.rows, other.rows]), self.p)
        return Subspace(self.p, self.n, fp.matmul(K[:, :self.dim], self.rows, self.p))

    def annihilator(self):
        """Subspace of vectors v with w . v = 0 for every w here."""
        if not self.dim:
            return Subspace.full(self.p, self.n)
        return Subspace(self.p, self.n, fp.nullspace(self.rows, self.p))

    def complement_rows(self, sub):
        """Rows of this echelon basis that extend `sub` to a basis of self."""
        ech = _Echelon(self.p, self.n)
        ech.add(sub.rows)
        out = []
        for r in self.rows:
            if ech.add(r[None, :]).shape[0]:
                out.append(r)
        return np.array(out, dtype=np.int64).reshape(-1, self.n)

    def __le__(self, other):
        return other.contains_all(self.rows)

    def __eq__(self, other):
        return (isinstance(other, Subspace) and self.n == other.n and self.dim == other.dim
                and np.array_equal(self.rows, other.rows))

    def __hash__(self):
        return hash((self.n, self.rows.tobytes()))

    def __repr__(self):
        return "Subspace(dim=%d of %d, p=%d)" % (self.dim, self.n, self.p)


class _Echelon:
    """Incrementally grown RREF basis."""

    def __init__(self, p, n, rows=None):
        self.p, self.n = p, n
        self.rows = np.zeros((0, n), dtype=np.int64)
        self.piv = np.zeros(0, dtype=np.int64)
        if rows is not None:
            self.add(rows)

    @property
    def dim(self):
        return len(self.piv)

    def reduce(self, V):
        V = np.asarray(V, dtype=np.int64) % self.p
        if not self.dim:
            return V
        return (V - fp.matmul(V[:, self.piv], self.rows, self.p)) % self.p

    def add(self, V):
        """Add rows; return the new echelon rows (a basis of the added part)."""
        p = self.p
        if len(V) == 0:
            return np.zeros((0, self.n), dtype=np.int64)
        C = self.reduce(V)
        C = C[C.any(1)]
        if not len(C):
            return C
        N, npiv = fp.rref(C, p)
        if self.dim:
            self.rows = (self.rows - fp.matmul(self.rows[:, npiv], N, p)) % p
        rows = np.vstack([self.rows, N])
        piv = np.concatenate([self.piv, npiv])
        order = np.argsort(piv, kind="stable")
        self.rows, self.piv = rows[order], piv[order]
        return N

    def subspace(self):
        return Subspace(self.p, self.n, self.rows.copy(), self.piv.copy())


def _act(A, V, p):
    """Apply A to the rows of V (rows are vectors)."""
    if callable(A):
        return A(V) % p
    if sp.issparse(A):
        return np.asarray((A @ V.T).T, dtype=np.int64) % p
    return fp.matmul(V, np.asarray(A).T, p)


def spin(p, n, start, actions, base=None):
    """Smallest subspace containing start (and base) stable under the actions.

    actions are n x n matrices or callables mapping row blocks to row blocks.
    base, when given, must already be stable."""
    ech = _Echelon(p, n)
    if base is not None:
        ech.add(base.rows)
    frontier = ech.add(np.asarray(start, dtype=np.int64).reshape(-1, n))
    while len(frontier) and ech.dim < n:
        cand = np.vstack([_act(A, frontier, p) for A in actions])
        frontier = ech.add(cand)
    return ech.subspace()


# --------------------------------------------------------------------------
# Lie algebras

class LieAlgebra:
    """Lie algebra with basis b_0..b_{n-1} and structure constants.

    The adjoint images are held as one sparse matrix of shape (n, n*n): row i
    is ad(b_i) flattened, so ad(x) = (x @ adT).reshape(n, n).
    """

    def __init__(self, p, labels, adT=None, grading=None, levels=None, name=None):
        self.p = p
        self.labels = list(labels)
        self.dim = len(self.labels)
        self.name = name or "L"
        self.grading = None if grading is None else tuple(int(d) for d in grading)
        self.levels = None if levels is None else tuple(int(d) for d in levels)
        self._adT = None if adT is None else modp_csr(adT, p)
        self._gens = None
        self._ad_cache = {}
        self.parent_rows = None

    # -- constructors ---------------------------------------------------------
    @classmethod
    def from_triples(cls, p, labels, triples, **kw):
        """triples: iterable of (i, j, k, c) with i < j meaning c_ij^k = c."""
        n = len(labels)
        rows, cols, vals = [], [], []
        for i, j, k, c in triples:
            if not i < j:
                raise ValueError("triples need i < j")
            c %= p
            if not c:
                continue
            # [b_i, b_j] = c b_k: ad(b_i)[k, j] = c and ad(b_j)[k, i] = -c
            rows += [i, j]
            cols += [k * n + j, k * n + i]
            vals += [c, -c]
        adT = sp.csr_matrix((np.array(vals, dtype=np.int64), (rows, cols)), shape=(n, n * n))
        return cls(p, labels, adT, **kw)

    @classmethod
    def from_ad_matrices(cls, p, labels, mats, **kw):
        n = len(labels)
        blocks = [sp.csr_matrix(fp.as_array(M).reshape(1, n * n)) for M in mats]
        return cls(p, labels, sp.vstack(blocks, format="csr"), **kw)

    # -- structure -------------------------------------------------------------
    @property
    def adT(self):
        if self._adT is None:
            self._adT = self._build_adT()
        return self._adT

    def _build_adT(self):
        raise NotImplementedError

    def ad_basis(self, i):
        hit = self._ad_cache.get(i)
        if hit is None:
            hit = self.adT[i].toarray().reshape(self.dim, self.dim) % self.p
            if len(self._ad_cache) < 64:
                self._ad_cache[i] = hit
        return hit

    def ad(self, x):
        x = self._vec(x)
        nz = np.flatnonzero(x)
        if len(nz) == 1:
            return self.ad_basis(int(nz[0])) * int(x[nz[0]]) % self.p
        row = (sp.csr_matrix(x[None, :]) @ self.adT).toarray()
        return row.reshape(self.dim, self.dim).astype(np.int64) % self.p

    def bracket(self, x, y):
        return fp.matmul(self.ad(x), self._vec(y), self.p)

    def brackets(self, x, Y):
        """[x, y] for every row y of Y, as rows."""
        return fp.matmul(np.atleast_2d(fp.as_array(Y)), self.ad(x).T, self.p)

    def _vec(self, x):
        x = fp.as_array(x).ravel() % self.p
        if len(x) != self.dim:
            raise DimensionMismatch("expected %d coordinates, got %d" % (self.dim, len(x)))
        return x

    def unit(self, i, c=1):
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = c % self.p
        return v

    def index(self, label):
        return self.labels.index(label)

    def triples(self):
        """Nonzero c_ij^k for i < j, sorted."""
        n = self.dim
        A = sp.coo_matrix(self.adT)
        i = A.row
        k, j = np.divmod(A.col, n)
        keep = i < j
        out = sorted(zip(i[keep].tolist(), j[keep].tolist(), k[keep].tolist(), A.data[keep].tolist()))
        return [(a, b, c, int(d) % self.p) for a, b, c, d in out if d % self.p]

    def sc_tensor(self):
        """Dense array C[i, j, k] = c_ij^k."""
        n = self.dim
        T = self.adT.toarray().reshape(n, n, n)  # [i, k, j]
        return np.transpose(T, (0, 2, 1)) % self.p

    # -- generating sets -------------------------------------------------------
    def generators(self):
        """Coordinate rows of a small set generating L as a Lie algebra."""
        if self._gens is None:
            self._gens = _find_generators(self)
        return self._gens

    def closure(self, S):
        """Lie subalgebra generated by rows S (spanned by right-normed words in S)."""
        S = np.atleast_2d(fp.as_array(S)).reshape(-1, self.dim) % self.p
        return spin(self.p, self.dim, S, [self.ad(s) for s in S if s.any()])

    def ideal(self, S):
        """Ideal generated by rows S."""
        gens = [self.ad(g) for g in self.generators()]
        return spin(self.p, self.dim, S, gens)

    def subalgebra(self, sub, name=None):
        """Standalone algebra on the echelon basis of a subalgebra."""
        R = sub.rows
        k = len(R)
        mats = []
        for a in range(k):
            V = fp.matmul(R, self.ad(R[a]).T, self.p)   # rows [r_a, r_b]
            C = sub.coords(V)                          # coordinates in R
            mats.append(C.T)
        grading = None
        if self.grading is not None:
            g = np.array(self.grading)
            degs = []
            for r in R:
                ds = set(g[np.flatnonzero(r)].tolist())
                degs.append(ds.pop() if len(ds) == 1 else None)
            if all(d is not None for d in degs):
                grading = degs
        labels = [_row_label(self, r) for r in R]
        sub_alg = LieAlgebra.from_ad_matrices(self.p, labels, mats, grading=grading, name=name)
        sub_alg.parent_rows = R.copy()
        return sub_alg

    def __repr__(self):
        return "LieAlgebra(%s, p=%d, dim=%d)" % (self.name, self.p, self.dim)


def modp_csr(M, p):
    M = sp.csr_matrix(M, dtype=np.int64, copy=True)
    M.data %= p
    M.eliminate_zeros()
    return M


def _find_generators(L):
    """Try a few structured candidates, then random pairs, then the basis."""
    n, p = L.dim, L.p
    full = n
    cands = []
    deg = L.grading if L.grading is not None else L.levels
    if deg is not None:
        deg = np.array(deg)
        lo = deg.min()
        ds = sorted(set(deg.tolist()))
        pos = [d for d in ds if d > 0]
        chosen = [lo]
        for top in reversed(pos):
            chosen.append(top)
            cands.append(list(chosen))
        if not pos:
            cands.append(ds)
    for ds in cands:
        idx = np.flatnonzero(np.isin(deg, ds))
        S = np.eye(n, dtype=np.int64)[idx]
        if L.closure(S).dim == full:
            return S
    rng = np.random.default_rng(12345)
    for _ in range(3):
        S = rng.integers(0, p, size=(2, n))
        if L.closure(S).dim == full:
            return S
    return np.eye(n, dtype=np.int64)


# --------------------------------------------------------------------------
# module-level operations

def bracket(x, y, L):
    return L.bracket(x, y)


def lie_closure(S, L):
    return L.closure(S)


def membership(v, S):
    return S.contains(v)


def derived_algebra(L):
    """[L, L] as the ideal generated by brackets of generators."""
    if hasattr(L, "derived_subspace"):
        return L.derived_subspace()
    G = L.generators()
    pairs = [L.bracket(G[a], G[b]) for a in range(len(G)) for b in range(a + 1, len(G))]
    if not pairs:
        return Subspace.zero(L.p, L.dim)
    return L.ideal(np.array(pairs))


def derived_series(L, extract=False):
    """[L^(0), L^(1), ...] until stable, each as a Subspace of L.

    With extract=True also returns the standalone algebras."""
    subs = [Subspace.full(L.p, L.dim)]
    algs = [L]
    cur, lift = L, np.eye(L.dim, dtype=np.int64)
    while True:
        D = derived_algebra(cur)
        if D.dim == cur.dim:
            break
        subs.append(Subspace(L.p, L.dim, fp.matmul(D.rows, lift, L.p)))
        if D.dim == 0:
            algs.append(None)
            break
        cur = cur.subalgebra(D, name="%s^(%d)" % (L.name, len(subs) - 1))
        lift = fp.matmul(cur.parent_rows, lift, L.p)
        algs.append(cur)
    if extract:
        return subs, algs
    return subs


def center(L):
    """Kernel of the stacked adjoint matrices of a generating set."""
    G = L.generators()
    A = np.vstack([L.ad(g) for g in G])
    return Subspace(L.p, L.dim, fp.nullspace(A, L.p))


def is_abelian(L):
    return all(not L.bracket(a, b).any() for i, a in enumerate(L.generators()) for b in L.generators()[i + 1:])


def nilpotency_index(M, p, bound=None):
    """Least k with M^k = 0 (None if M is not nilpotent)."""
    M = fp.as_array(M) % p
    n = M.shape[0]
    bound = bound or n
    P = np.eye(n, dtype=np.int64)
    for k in range(1, bound + 1):
        P = fp.matmul(P, M, p)
        if not P.any():
            return k
    return None


def is_nilpotent_matrix(M, p):
    return nilpotency_index(M, p) is not None


# --------------------------------------------------------------------------
# gradings, filtrations

@dataclass
class GradingReport:
    ok: bool
    depth: int
    height: int
    dims: dict
    violations: list = field(default_factory=list)


def verify_grading(L, degrees=None, max_violations=10):
    """Check [L_i, L_j] in L_{i+j} on all basis pairs."""
    degrees = L.grading if degrees is None else degrees
    if degrees is None or len(degrees) != L.dim:
        raise ValueError("need one degree per basis vector")
    deg = np.asarray(degrees, dtype=np.int64)
    n = L.dim
    A = sp.coo_matrix(L.adT)
    i = A.row
    k, j = np.divmod(A.col, n)
    bad = deg[k] != deg[i] + deg[j]
    viol = []
    for a, b, c in sorted(set(zip(i[bad].tolist(), j[bad].tolist(), k[bad].tolist())))[:max_violations]:
        viol.append((min(a, b), max(a, b), c))
    dims = {}
    for d in deg.tolist():
        dims[d] = dims.get(d, 0) + 1
    dims = dict(sorted(dims.items()))
    neg = [d for d in dims if d < 0]
    return GradingReport(ok=not bad.any(), depth=-min(neg) if neg else 0,
                         height=max(dims), dims=dims, violations=viol)


def filtration_from_levels(L, levels):
    """{i: L_(i)} for a basis adapted to the filtration."""
    levels = np.asarray(levels)
    out = {}
    for d in sorted(set(levels.tolist())):
        idx = np.flatnonzero(levels >= d)
        out[d] = Subspace(L.p, L.dim, np.eye(L.dim, dtype=np.int64)[idx], idx)
    return out


def filtration(L):
    if L.levels is not None:
        return filtration_from_levels(L, L.levels)
    if L.grading is not None:
        return filtration_from_levels(L, L.grading)
    return None


def verify_filtration(L, filt):
    """[L_(i), L_(j)] in L_(i+j) for consecutive pieces."""
    keys = sorted(filt)
    top = keys[-1]

    def piece(d):
        if d < keys[0]:
            return filt[keys[0]]
        for k in keys:
            if k >= d:
                return filt[k]
        return Subspace.zero(L.p, L.dim)

    for a in keys:
        for b in keys:
            if a > b:
                continue
            A, B = filt[a].rows, filt[b].rows
            target = piece(a + b) if a + b <= top else Subspace.zero(L.p, L.dim)
            for x in A:
                if not target.contains_all(L.brackets(x, B)):
                    return False
    return True


def gr(L, filt=None):
    """Associated graded algebra on pivot-completion representatives."""
    filt = filt or filtration(L)
    if filt is None:
        raise ValueError("no filtration")
    keys = sorted(filt)
    if filt[keys[0]].dim != L.dim:
        raise ValueError("lowest filtration piece must be all of L")
    reps, lev = [], []
    for a, d in enumerate(keys):
        nxt = filt[keys[a + 1]] if a + 1 < len(keys) else Subspace.zero(L.p, L.dim)
        if not nxt <= filt[d]:
            raise ValueError("filtration not decreasing at %d" % d)
        R = filt[d].complement_rows(nxt)
        reps.append(R)
        lev += [d] * len(R)
    R = np.vstack(reps)
    lev = np.array(lev)
    p, n = L.p, L.dim
    Rinv = fp.inverse(R, p)
    mats = []
    for a in range(n):
        V = fp.matmul(R, L.ad(R[a]).T, p)          # [r_a, r_b] as rows
        C = fp.matmul(V, Rinv, p)                  # coordinates in R
        target = lev[a] + lev
        # keep only the component of filtration level lev_a + lev_b
        mask = lev[None, :] == target[:, None]
        low = (lev[None, :] < target[:, None]) & (C != 0)
        if low.any():
            raise ValueError("not a filtration: bracket drops level")
        mats.append((C * mask).T)
    labels = ["gr(%s)" % _row_label(L, r) for r in R]
    return LieAlgebra.from_ad_matrices(p, labels, mats, grading=lev, name="gr " + L.name)


def _row_label(L, r):
    nz = np.flatnonzero(r)
    if len(nz) == 1 and r[nz[0]] == 1:
        return L.labels[nz[0]]
    return "+".join("%d*%s" % (r[i], L.labels[i]) for i in nz[:3]) + ("+..." if len(nz) > 3 else "")


def depth_height(L):
    deg = L.grading if L.grading is not None else L.levels
    if deg is None:
        return None
    deg = np.array(deg)
    return int(max(0, -deg.min())), int(deg.max())


# --------------------------------------------------------------------------
# Jacobi

def check_jacobi(L, samples=None, seed=0):
    """Number of basis triples violating Jacobi (exhaustive unless samples given)."""
    n, p = L.dim, L.p
    if samples is not None:
        rng = np.random.default_rng(seed)
        I, J, K = rng.integers(0, n, (3, samples))
        E = np.eye(n, dtype=np.int64)
        tot = (_sc_apply(L, I, _sc_apply(L, J, E[K]))
               + _sc_apply(L, J, _sc_apply(L, K, E[I]))
               + _sc_apply(L, K, _sc_apply(L, I, E[J]))) % p
        return int(tot.any(1).sum())
    # R[(a, k), (b, c)] = ([b_a, [b_b, b_c]])_k
    A = sp.coo_matrix(L.adT)
    a = A.row
    k, j = np.divmod(A.col, n)
    AD = sp.csr_matrix((A.data, (a * n + k, j)), shape=(n * n, n))      # (a,k) x q
    Cm = sp.csr_matrix((A.data, (k, a * n + j)), shape=(n, n * n))      # q x (b,c)
    R = sp.coo_matrix(AD @ Cm)
    a, k = np.divmod(R.row, n)
    b, c = np.divmod(R.col, n)
    v = R.data % p
    # term [x,[y,z]] of J(x,y,z); rotations give the other two terms
    keys = np.concatenate([
        ((a * n + b) * n + c) * n + k,
        ((c * n + a) * n + b) * n + k,
        ((b * n + c) * n + a) * n + k,
    ])
    vals = np.concatenate([v, v, v])
    uk, inv = np.unique(keys, return_inverse=True)
    tot = np.bincount(inv, weights=vals).astype(np.int64) % p
    bad = uk[tot != 0] // n
    return len(np.unique(bad))


def _sc_apply(L, I, V):
    """Rows [b_{I[s]}, V[s]] computed from the stored structure constants."""
    n = L.dim
    M = sp.coo_matrix(L.adT[I])
    k, j = np.divmod(M.col, n)
    out = np.zeros((len(I), n), dtype=np.int64)
    np.add.at(out, (M.row, k), M.data * V[M.row, j])
    return out % L.p


# --------------------------------------------------------------------------
# representations and restricted structure

class MatrixRep:
    """Linear map L -> gl_N given on basis vectors (computed lazily)."""

    def __init__(self, algebra, degree, images=None, image_fn=None, name="rho"):
        self.algebra = algebra
        self.degree = degree
        self.name = name
        self._images = list(images) if images is not None else None
        self._fn = image_fn

    def basis_image(self, i):
        if self._images is not None:
            return fp.as_array(self._images[i]) % self.algebra.p
        return self._fn(self.algebra.unit(i))

    def image(self, x):
        x = self.algebra._vec(x)
        if self._fn is not None and self._images is None:
            return self._fn(x)
        out = np.zeros((self.degree, self.degree), dtype=np.int64)
        for i in np.flatnonzero(x):
            out = (out + int(x[i]) * self.basis_image(i)) % self.algebra.p
        return out

    def images(self):
        return [self.basis_image(i) for i in range(self.algebra.dim)]

    def span(self):
        """rho(L) as a subspace of flattened N x N matrices."""
        N = self.degree
        return Subspace(self.algebra.p, N * N, np.array([M.ravel() for M in self.images()]))

    def is_faithful(self):
        return self.span().dim == self.algebra.dim

    def verify_hom(self, pairs=None):
        L, p = self.algebra, self.algebra.p
        n = L.dim
        pairs = pairs if pairs is not None else [(i, j) for i in range(n) for j in range(i + 1, n)]
        for i, j in pairs:
            A, B = self.basis_image(i), self.basis_image(j)
            lhs = self.image(L.bracket(L.unit(i), L.unit(j)))
            if ((fp.matmul(A, B, p) - fp.matmul(B, A, p) - lhs) % p).any():
                return False
        return True


def adjoint_rep(L):
    return MatrixRep(L, L.dim, image_fn=L.ad, name="ad")


def matrix_power(M, k, p):
    M = fp.as_array(M) % p
    R = np.eye(M.shape[0], dtype=np.int64)
    while k:
        if k & 1:
            R = fp.matmul(R, M, p)
        k >>= 1
        if k:
            M = fp.matmul(M, M, p)
    return R


def restricted_closure(S, p, lie_generators=None):
    """Smallest space of N x N matrices containing S closed under
    commutators and p-th powers.

    lie_generators, if given, are matrices whose Lie closure already
    contains S; brackets are then only taken with those (and with new
    p-th powers), which is much cheaper than all pairs."""
    S = [fp.as_array(M) % p for M in S]
    if not S:
        raise ValueError("empty generating set")
    N = S[0].shape[0]
    gens = [fp.as_array(M) % p for M in (lie_generators if lie_generators is not None else S)]

    def comm(G):
        def f(V):
            X = V.reshape(-1, N, N)
            return (fp.matmul(G, X, p) - fp.matmul(X, G, p)).reshape(len(V), N * N) % p
        return f

    ech = _Echelon(p, N * N)
    queue = list(ech.add(np.array([M.ravel() for M in S + gens])))
    acts = [comm(G) for G in gens]
    frontier = ech.rows.copy()
    while True:
        # Lie closure under the current generators
        while len(frontier):
            cand = np.vstack([f(frontier) for f in acts])
            frontier = ech.add(cand)
            queue += list(frontier)
        # p-th powers of everything not yet powered
        new = []
        while queue:
            v = queue.pop()
            P = matrix_power(v.reshape(N, N), p, p)
            if ech.reduce(P.ravel()[None, :]).any():
                added = ech.add(P.ravel()[None, :])
                new += list(added)
                gens.append(P)
                acts.append(comm(P))
        if not new:
            break
        # new generators act on everything found so far
        cand = np.vstack([f(ech.rows) for f in acts[-len(new):]])
        frontier = np.vstack([np.array(new).reshape(-1, N * N), ech.add(cand)])
        queue += list(frontier[len(new):])
        # the powers themselves get powered on the next pass
        queue += new
    return ech.subspace()


def p_envelope(L, rho=None):
    """Restricted closure of rho(L) in gl_N (rho defaults to ad)."""
    rho = rho or adjoint_rep(L)
    if not rho.is_faithful():
        raise ValueError("representation is not faithful")
    G = [rho.image(g) for g in L.generators()]
    return restricted_closure(rho.images(), L.p, lie_generators=G)


def restricted_data(L, rho=None):
    """For each basis vector b, the coordinates of rho(b)^p in rho(L), or None."""
    rho = rho or adjoint_rep(L)
    span = rho.span()
    imgs = np.array([M.ravel() for M in rho.images()])
    out = []
    for i in range(L.dim):
        P = matrix_power(rho.basis_image(i), L.p, L.p).ravel()
        if span.contains(P):
            C = fp.solve_rows(imgs, P[None, :], L.p)
            out.append(C[0])
        else:
            out.append(None)
    return out


def is_restricted(L):
    return all(c is not None for c in restricted_data(L))


# --------------------------------------------------------------------------
# simplicity

def is_simple(L, seed=0, budget=50):
    from .meataxe import simplicity
    return simplicity(L, seed=seed, budget=budget)


# --------------------------------------------------------------------------
# fixtures

def build_sl(n, p):
    """sl_n with basis E_ij (i != j) and H_i = E_ii - E_{i+1,i+1}."""
    if n < 2:
        raise ValueError("n >= 2")
    mats, labels = [], []
    for i in range(n):
        for j in range(n):
            if i != j:
                M = np.zeros((n, n), dtype=np.int64)
                M[i, j] = 1
                mats.append(M)
                labels.append("E%d%d" % (i + 1, j + 1))
    for i in range(n - 1):
        M = np.zeros((n, n), dtype=np.int64)
        M[i, i], M[i + 1, i + 1] = 1, -1
        mats.append(M % p)
        labels.append("H%d" % (i + 1))
    return _from_matrix_basis(p, labels, mats, "sl%d" % n)


def build_psl(n, p):
    """sl_n modulo its scalar center (requires p | n)."""
    if n % p:
        raise ValueError("psl_%d needs p | n" % n)
    L = build_sl(n, p)
    Z = center(L)
    # quotient by Z: pick basis vectors outside Z via pivot completion
    comp = Subspace.full(p, L.dim).complement_rows(Z)
    W = Subspace(p, L.dim, np.vstack([Z.rows, comp]))
    k = len(comp)
    mats = []
    full = np.vstack([comp, Z.rows])
    inv = fp.inverse(full, p)
    for a in range(k):
        V = fp.matmul(comp, L.ad(comp[a]).T, p)
        C = fp.matmul(V, inv, p)[:, :k]
        mats.append(C.T)
    del W
    labels = [_row_label(L, r) for r in comp]
    return LieAlgebra.from_ad_matrices(p, labels, mats, name="psl%d" % n)


def _from_matrix_basis(p, labels, mats, name):
    n = len(mats)
    B = np.array([M.ravel() for M in mats]) % p
    ad = []
    for a in range(n):
        V = np.array([((mats[a] @ M - M @ mats[a]) % p).ravel() for M in mats])
        C = fp.solve_rows(B, V, p)
        if C is None:
            raise ValueError("basis not closed under commutator")
        ad.append(C.T)
    return LieAlgebra.from_ad_matrices(p, labels, ad, name=name)


def build_rumynin():
    """The 3-dimensional p=2 algebra e, f/2, h/2 of sl_2 over Z, reduced mod 2."""
    # [e, f] = h, [h, e] = e, [h, f] = f
    return LieAlgebra.from_triples(2, ["e", "f", "h"], [(0, 1, 2, 1), (0, 2, 0, 1), (1, 2, 1, 1)],
                                   name="rumynin")


def build_abelian(n, p):
    return LieAlgebra(p, ["a%d" % i for i in range(n)], sp.csr_matrix((n, n * n), dtype=np.int64),
                      name="abelian%d" % n)


# --------------------------------------------------------------------------
# dump format

def dump(L):
    doc = {"p": L.p, "dim": L.dim, "labels": L.labels,
           "grading": list(L.grading) if L.grading is not None else None,
           "triples": [list(t) for t in L.triples()]}
    if L.levels is not None:
        doc["levels"] = list(L.levels)
    return json.dumps(doc, separators=(",", ":"))


def load(text):
    doc = json.loads(text)
    L = LieAlgebra.from_triples(doc["p"], doc["labels"], [tuple(t) for t in doc["triples"]],
                                grading=doc.get("grading"), levels=doc.get("levels"))
    if L.dim != doc["dim"]:
        raise ValueError("dim field disagrees with labels")
    return L
