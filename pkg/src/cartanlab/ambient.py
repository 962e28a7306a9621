"""W(m;n) as an ambient coordinate space, and subspaces of it kept in a
degree-aware echelon form.

Coordinates: the basis vector X^(a) d_j sits at column index(a)*m + (j-1),
so columns follow lex order on a and then j.  Each column carries a
(possibly weighted) degree sum_k w_k a_k - w_j.
"""

import numpy as np
import scipy.sparse as sp

from . import fp
from .dpalg import AlgebraShape, DPElement, WittDerivation, fmt_index


def _csr(rows, cols, vals, shape, p):
    M = sp.csr_matrix((np.asarray(vals, dtype=np.int64) % p, (rows, cols)), shape=shape)
    M.sum_duplicates()
    M.data %= p
    M.eliminate_zeros()
    return M


def modp(M, p):
    M = sp.csr_matrix(M, dtype=np.int64, copy=True)
    M.data %= p
    M.eliminate_zeros()
    return M


class WittAmbient:
    def __init__(self, shape, weights=None):
        self.shape = shape
        p, m = shape.p, shape.m
        self.p, self.m = p, m
        self.weights = np.ones(m, dtype=np.int64) if weights is None else np.asarray(weights, dtype=np.int64)
        self.exps = np.array(list(shape.monomials()), dtype=np.int64).reshape(-1, m)
        self.dimA = len(self.exps)
        self.N = self.dimA * m
        rad = np.array(shape.radices, dtype=np.int64)
        self.mult = np.ones(m, dtype=np.int64)
        for k in range(m - 2, -1, -1):
            self.mult[k] = self.mult[k + 1] * rad[k + 1]
        self.bound = np.array(shape.bounds, dtype=np.int64)
        self.col_alpha = np.repeat(np.arange(self.dimA), m)
        self.col_j = np.tile(np.arange(m), self.dimA)
        self.col_exp = self.exps[self.col_alpha]
        self.onehot_j = np.eye(m, dtype=np.int64)[self.col_j]
        self.degree = self.col_exp @ self.weights - self.weights[self.col_j]
        tab = np.zeros((p, p), dtype=np.int64)
        for a in range(p):
            for b in range(a + 1):
                from math import comb
                tab[a, b] = comb(a, b) % p
        self._tab = tab
        self._ad_cache = {}

    # -- conversions -------------------------------------------------------
    def index(self, a, j):
        return int(np.dot(a, self.mult)) * self.m + (j - 1)

    def label(self, col):
        a = tuple(int(x) for x in self.col_exp[col])
        mono = "X^%s" % fmt_index(a) if any(a) else ""
        return "%sd%d" % (mono, self.col_j[col] + 1)

    def vector(self, D):
        """Sparse 1xN row for a WittDerivation."""
        cols, vals = [], []
        for a, j, c in D.terms():
            cols.append(self.index(a, j))
            vals.append(c)
        return _csr(np.zeros(len(cols), dtype=np.int64), cols, vals, (1, self.N), self.p)

    def matrix(self, Ds):
        rows, cols, vals = [], [], []
        for r, D in enumerate(Ds):
            for a, j, c in D.terms():
                rows.append(r)
                cols.append(self.index(a, j))
                vals.append(c)
        return _csr(rows, cols, vals, (len(Ds), self.N), self.p)

    def derivation(self, v):
        v = sp.csr_matrix(v)
        terms = [(tuple(int(x) for x in self.col_exp[c]), int(self.col_j[c]) + 1, int(val))
                 for c, val in zip(v.indices, v.data)]
        return WittDerivation.from_terms(self.shape, terms)

    # -- brackets -----------------------------------------------------------
    def _binom(self, A, B):
        """prod_k binom(A_k, B_k) mod p, rowwise; 0 when some B_k > A_k or B_k < 0."""
        p = self.p
        bad = (B < 0).any(1) | (B > A).any(1)
        a = np.where(bad[:, None], 0, A)
        b = np.where(bad[:, None], 0, B)
        res = np.ones(len(A), dtype=np.int64)
        while a.any():
            res = res * (self._tab[a % p, b % p].prod(1) % p) % p
            a = a // p
            b = b // p
        res[bad] = 0
        return res

    def _ad_column(self, col):
        """ad(X^(a) d_i) as arrays (rows, cols, vals) over all basis columns."""
        hit = self._ad_cache.get(col)
        if hit is not None:
            return hit
        a = self.col_exp[col]
        i = self.col_j[col]
        B, J = self.col_exp, self.col_j
        allc = np.arange(self.N)
        # X^(a) d_i (X^(b)) d_j
        m1 = B[:, i] >= 1
        T = a + B[m1]
        T[:, i] -= 1
        c1 = self._binom(T, np.broadcast_to(a, T.shape))
        ok = (c1 != 0) & (T <= self.bound).all(1)
        r1 = (T[ok] @ self.mult) * self.m + J[m1][ok]
        k1 = allc[m1][ok]
        v1 = c1[ok]
        # - X^(b) d_j (X^(a)) d_i
        m2 = a[J] >= 1
        T2 = a + B[m2] - self.onehot_j[m2]
        c2 = self._binom(T2, B[m2])
        ok2 = (c2 != 0) & (T2 <= self.bound).all(1)
        r2 = (T2[ok2] @ self.mult) * self.m + i
        k2 = allc[m2][ok2]
        v2 = -c2[ok2]
        hit = (np.concatenate([r1, r2]), np.concatenate([k1, k2]), np.concatenate([v1, v2]))
        if len(self._ad_cache) < 4096:
            self._ad_cache[col] = hit
        return hit

    def ad(self, v):
        """Sparse NxN matrix of ad(v) for a 1xN sparse row v."""
        v = sp.csr_matrix(v)
        rows, cols, vals = [], [], []
        for col, c in zip(v.indices, v.data):
            r, k, x = self._ad_column(int(col))
            rows.append(r)
            cols.append(k)
            vals.append(x * int(c))
        if not rows:
            return sp.csr_matrix((self.N, self.N), dtype=np.int64)
        return _csr(np.concatenate(rows), np.concatenate(cols), np.concatenate(vals), (self.N, self.N), self.p)

    def bracket(self, u, v):
        """[u, v] for sparse rows; returns a sparse row."""
        return modp((self.ad(u) @ sp.csr_matrix(v).T).T, self.p)

    def bracket_rows(self, u, V):
        """[u, V_k] for every row of V (sparse), as sparse rows."""
        return modp((self.ad(u) @ sp.csr_matrix(V).T).T, self.p)


class FilteredBasis:
    """Basis of a subspace of a graded ambient space.

    Rows are grouped by their lowest degree; within a group the lowest-degree
    parts ("leads") are linearly independent.  Hence the rows of degree >= i
    span the intersection with the ambient filtration piece of degree >= i,
    and the leads span the associated graded subspace.
    """

    def __init__(self, p, col_degree):
        self.p = p
        self.col_degree = np.asarray(col_degree, dtype=np.int64)
        self.N = len(self.col_degree)
        self.all_degrees = np.unique(self.col_degree)
        self.cols = {int(d): np.flatnonzero(self.col_degree == d) for d in self.all_degrees}
        self.groups = {}  # degree -> dict(rows=csr, lead=dense, piv=..., tinv=...)
        self._order = None

    # -- bookkeeping --------------------------------------------------------
    @property
    def dim(self):
        return sum(g["rows"].shape[0] for g in self.groups.values())

    def degrees(self):
        return sorted(self.groups)

    def rows(self):
        ds = self.degrees()
        if not ds:
            return sp.csr_matrix((0, self.N), dtype=np.int64)
        return sp.vstack([self.groups[d]["rows"] for d in ds], format="csr")

    def lead_degrees(self):
        out = []
        for d in self.degrees():
            out += [d] * self.groups[d]["rows"].shape[0]
        return np.array(out, dtype=np.int64)

    def leads(self):
        """Sparse rows holding only the lowest-degree part of each basis row."""
        blocks = []
        for d in self.degrees():
            g = self.groups[d]
            L = sp.csr_matrix(g["rows"])
            mask = self.col_degree[L.indices] == d
            L = sp.csr_matrix((L.data * mask, L.indices.copy(), L.indptr.copy()), shape=L.shape)
            L.eliminate_zeros()
            blocks.append(L)
        if not blocks:
            return sp.csr_matrix((0, self.N), dtype=np.int64)
        return sp.vstack(blocks, format="csr")

    def lowest_degree(self, V):
        V = modp(V, self.p)
        k = V.shape[0]
        out = np.full(k, np.iinfo(np.int64).max, dtype=np.int64)
        nz = np.diff(V.indptr) > 0
        if nz.any():
            d = self.col_degree[V.indices]
            out[nz] = np.minimum.reduceat(d, V.indptr[:-1][nz])
        return out

    def _set_group(self, d, rows):
        rows = modp(rows, self.p)
        lead = rows[:, self.cols[d]].toarray() % self.p
        _, piv = fp.rref(lead, self.p)
        if len(piv) != rows.shape[0]:
            raise AssertionError("leads of degree %d are dependent" % d)
        self.groups[d] = dict(rows=rows, lead=lead, piv=piv, tinv=fp.inverse(lead[:, piv], self.p))

    def _reduce_at(self, d, R):
        """Cancel the degree-d part of rows R against group d as far as possible.

        Returns (coefficients, reduced rows, residual lead)."""
        p = self.p
        X = R[:, self.cols[d]].toarray() % p
        g = self.groups.get(d)
        if g is None:
            return None, R, X
        c = fp.matmul(X[:, g["piv"]], g["tinv"], p)
        X2 = (X - fp.matmul(c, g["lead"], p)) % p
        R2 = modp(R - sp.csr_matrix(c) @ g["rows"], p)
        return c, R2, X2

    # -- main entry points ---------------------------------------------------
    def insert(self, V):
        """Add the rows of V to the span; returns the newly created basis rows."""
        p = self.p
        pending = modp(V, p)
        new = []
        while pending.shape[0]:
            low = self.lowest_degree(pending)
            live = low < np.iinfo(np.int64).max
            pending = pending[live]
            low = low[live]
            if not pending.shape[0]:
                break
            d = int(low.min())
            here = low == d
            R = pending[here]
            rest = pending[~here]
            _, R, X = self._reduce_at(d, R)
            fresh = X.any(1)
            carry = [rest, R[~fresh]]
            if fresh.any():
                Rf = R[fresh]
                sel = fp.independent_rows(X[fresh], p)
                chosen = Rf[sel]
                g = self.groups.get(d)
                allrows = chosen if g is None else sp.vstack([g["rows"], chosen], format="csr")
                self._set_group(d, allrows)
                new.append(chosen)
                others = np.setdiff1d(np.arange(Rf.shape[0]), sel)
                if len(others):
                    _, R3, X3 = self._reduce_at(d, Rf[others])
                    assert not X3.any()
                    carry.append(R3)
            pending = sp.vstack(carry, format="csr")
        self._order = None
        if not new:
            return sp.csr_matrix((0, self.N), dtype=np.int64)
        return sp.vstack(new, format="csr")

    def decompose(self, V):
        """Coefficients of V in the basis (degree order) and the leftover part.

        The leftover is zero exactly for rows lying in the span."""
        p = self.p
        R = modp(V, p)
        offs, o = {}, 0
        for d in self.degrees():
            offs[d] = o
            o += self.groups[d]["rows"].shape[0]
        C = np.zeros((R.shape[0], o), dtype=np.int64)
        resid = np.zeros(R.shape[0], dtype=bool)
        for d in self.all_degrees:
            d = int(d)
            cols = self.cols[d]
            sub = R[:, cols]
            if sub.nnz == 0:
                continue
            c, R, X = self._reduce_at(d, R)
            if c is not None:
                C[:, offs[d]:offs[d] + c.shape[1]] = c
            bad = X.any(1)
            if bad.any():
                resid |= bad
                # drop the unreducible part so later degrees stay meaningful
                R = R.tolil()
                for r in np.flatnonzero(bad):
                    for cc in cols:
                        R[r, cc] = 0
                R = modp(R.tocsr(), p)
        return C, resid

    def coords(self, V):
        C, bad = self.decompose(V)
        if bad.any():
            raise ValueError("%d vectors are not in the span" % int(bad.sum()))
        return C

    def contains(self, V):
        _, bad = self.decompose(V)
        return ~bad

    def copy(self):
        fb = FilteredBasis(self.p, self.col_degree)
        fb.groups = {d: dict(g) for d, g in self.groups.items()}
        return fb


def spin_filtered(amb, start, gens, fb=None):
    """Span of start under repeated ad(g), g in gens, computed in W coordinates."""
    fb = fb or FilteredBasis(amb.p, amb.degree)
    ads = [amb.ad(g) for g in gens]
    frontier = fb.insert(start)
    while frontier.shape[0]:
        cand = sp.vstack([modp((A @ frontier.T).T, amb.p) for A in ads], format="csr")
        frontier = fb.insert(cand)
    return fb


__all__ = ["WittAmbient", "FilteredBasis", "spin_filtered", "AlgebraShape", "DPElement"]
