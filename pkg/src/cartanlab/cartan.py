"""Graded Cartan type algebras W, S, H, K and the d_i valuation."""

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from . import fp
from .ambient import WittAmbient
from .dpalg import (AlgebraShape, DPElement, DifferentialForm, WittDerivation, dp_mul,
                    fmt_index, lie_derivative, partial, lucas_binom)
from .embedded import EmbeddedLieAlgebra
from .liecore import LieAlgebra, derived_series

TAGS = ("W", "S0", "S1", "H0", "H1", "H2", "K1")


@dataclass(frozen=True)
class FamilyId:
    tag: str
    shape: AlgebraShape

    def __post_init__(self):
        m, p = self.shape.m, self.shape.p
        if self.tag not in TAGS:
            raise ValueError("unknown family tag %r" % self.tag)
        if self.tag.startswith("S") and m < 2:
            raise ValueError("S needs m >= 2")
        if self.tag.startswith("H") and m % 2:
            raise ValueError("H needs even m")
        if self.tag == "K1" and (m % 2 == 0 or p == 2):
            raise ValueError("K needs odd m and p > 2")


# -- sigma and prime ---------------------------------------------------------

def prime(i, m):
    """i' for 1 <= i <= 2r (m = 2r or 2r+1)."""
    r = m // 2
    if not 1 <= i <= 2 * r:
        raise IndexError(i)
    return i + r if i <= r else i - r


def sigma(i, m):
    r = m // 2
    if not 1 <= i <= 2 * r:
        raise IndexError(i)
    return 1 if i <= r else -1


# -- the Witt algebra ----------------------------------------------------------

class WittAlgebra(LieAlgebra):
    """W(m;n) on its standard basis X^(a) d_j (lex in a, then j)."""

    def __init__(self, shape, weights=None):
        self.amb = WittAmbient(shape, weights)
        labels = [self.amb.label(c) for c in range(self.amb.N)]
        super().__init__(shape.p, labels, None, grading=self.amb.degree.tolist(),
                         name="W%s" % shape.tag())
        self.shape = shape

    def ad(self, x):
        x = self._vec(x)
        return self.amb.ad(sp.csr_matrix(x[None, :])).toarray() % self.p

    def ad_basis(self, i):
        return self.ad(self.unit(i))

    def _build_adT(self):
        n = self.dim
        rows, cols, vals = [], [], []
        for i in range(n):
            r, k, v = self.amb._ad_column(i)
            rows.append(np.full(len(r), i))
            cols.append(r * n + k)
            vals.append(v)
        return sp.csr_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                             shape=(n, n * n))

    def element(self, D):
        return self.amb.vector(D).toarray()[0] % self.p

    def derivation(self, x):
        return self.amb.derivation(sp.csr_matrix(np.asarray(x)[None, :]))


def build_witt(shape):
    return WittAlgebra(shape)


# -- special algebras --------------------------------------------------------

def D_ij(i, j, f):
    """d_j(f) d_i - d_i(f) d_j."""
    if i == j:
        raise ValueError("D_ij needs i != j")
    sh = f.shape
    co = [DPElement.zero(sh)] * sh.m
    co[i - 1] = partial(j, f)
    co[j - 1] = co[j - 1] - partial(i, f)
    return WittDerivation(sh, co)


def _kernel_by_degree(amb, build_map):
    """Basis of the kernel of a linear map on W, computed one degree at a time.

    build_map(cols) returns a dense matrix whose columns are images of the
    given ambient basis columns."""
    rows = []
    for d in np.unique(amb.degree):
        cols = np.flatnonzero(amb.degree == d)
        M = build_map(cols)
        K = fp.nullspace(M, amb.p)
        for v in K:
            rows.append((cols, v))
    data, ri, ci = [], [], []
    for r, (cols, v) in enumerate(rows):
        nz = np.flatnonzero(v)
        data += v[nz].tolist()
        ri += [r] * len(nz)
        ci += cols[nz].tolist()
    return sp.csr_matrix((data, (ri, ci)), shape=(len(rows), amb.N), dtype=np.int64)


def _divergence_map(amb):
    sh = amb.shape

    def build(cols):
        M = np.zeros((amb.dimA, len(cols)), dtype=np.int64)
        for c, col in enumerate(cols):
            a = amb.col_exp[col]
            j = amb.col_j[col]
            if a[j] > 0:
                b = a.copy()
                b[j] -= 1
                M[sh.index(tuple(b)), c] = 1
        return M
    return build


def build_special(shape, level=1):
    if shape.m < 2:
        raise ValueError("S needs m >= 2")
    amb = WittAmbient(shape)
    tag = "S%s^(%d)" % (shape.tag(), level)
    if level == 0:
        rows = _kernel_by_degree(amb, _divergence_map(amb))
        return EmbeddedLieAlgebra.from_rows(amb, rows, name=tag)
    if level != 1:
        raise ValueError("level must be 0 or 1")
    Ds = []
    for i in range(1, shape.m + 1):
        for j in range(i + 1, shape.m + 1):
            for a in shape.monomials():
                D = D_ij(i, j, DPElement.monomial(shape, a))
                if D:
                    Ds.append(D)
    return EmbeddedLieAlgebra.from_derivations(amb, Ds, name=tag)


# -- Hamiltonian algebras ------------------------------------------------------

def omega_H(shape):
    r = shape.m // 2
    one = DPElement.one(shape)
    return DifferentialForm(shape, 2, {(i, i + r): one for i in range(1, r + 1)})


def D_H(f):
    """sum_i sigma(i) d_i(f) d_{i'}."""
    sh = f.shape
    m = sh.m
    co = [DPElement.zero(sh)] * m
    for i in range(1, m + 1):
        co[prime(i, m) - 1] = co[prime(i, m) - 1] + partial(i, f).scale(sigma(i, m))
    return WittDerivation(sh, co)


def poisson(f, g):
    """{f, g} = D_H(f)(g)."""
    return D_H(f)(g)


def _form_map(amb, omega):
    """Linear map D -> D(omega) on ambient columns, as coefficient vectors."""
    sh = amb.shape
    m = sh.m
    pairs = [(i, j) for i in range(1, m + 1) for j in range(i + 1, m + 1)]

    def build(cols):
        M = np.zeros((len(pairs) * amb.dimA, len(cols)), dtype=np.int64)
        for c, col in enumerate(cols):
            D = WittDerivation.basis(sh, tuple(int(x) for x in amb.col_exp[col]), int(amb.col_j[col]) + 1)
            w = lie_derivative(D, omega)
            for q, (i, j) in enumerate(pairs):
                for a, v in w.coefficient(i, j).terms.items():
                    M[q * amb.dimA + sh.index(a), c] = v
        return M % sh.p
    return build


def build_hamiltonian(shape, level=2):
    if shape.m % 2:
        raise ValueError("H needs even m")
    amb = WittAmbient(shape)
    rows = _kernel_by_degree(amb, _form_map(amb, omega_H(shape)))
    H0 = EmbeddedLieAlgebra.from_rows(amb, rows, name="H%s^(0)" % shape.tag())
    if level == 0:
        return H0
    subs, algs = derived_series(H0, extract=True)
    # the series is stable after its last entry
    A = algs[min(level, len(algs) - 1)]
    if A is None:
        raise ValueError("derived series reaches zero")
    if A is H0:
        A = EmbeddedLieAlgebra(amb, H0.fb.copy())
    A.name = "H%s^(%d)" % (shape.tag(), level)
    return A


def hamiltonian_span(shape, include_top=True):
    """span{D_H(X^(a)) : 0 < a <= tau} (or a < tau)."""
    top = shape.top
    Ds = []
    for a in shape.monomials():
        if not any(a) or (not include_top and tuple(a) == tuple(top)):
            continue
        Ds.append(D_H(DPElement.monomial(shape, a)))
    return Ds


# -- contact algebras ----------------------------------------------------------

def contact_norm(a):
    """||a|| = sum_{j<=2r} a_j + 2 a_{2r+1} - 2."""
    return sum(a[:-1]) + 2 * a[-1] - 2


def D_K(f):
    sh = f.shape
    m = sh.m
    r = (m - 1) // 2
    co = [DPElement.zero(sh)] * m
    dlast = partial(m, f)
    for j in range(1, 2 * r + 1):
        jp = prime(j, m)
        term = partial(j, f).scale(sigma(j, m)) + dp_mul(DPElement.var(sh, jp), dlast)
        co[jp - 1] = co[jp - 1] + term
    euler = DPElement.zero(sh)
    for j in range(1, 2 * r + 1):
        euler = euler + dp_mul(DPElement.var(sh, j), partial(j, f))
    co[m - 1] = f.scale(2) - euler
    return WittDerivation(sh, co)


def contact_indices(shape):
    """Index range of the D_K basis of K^(1), lex within each ||a||, degrees ascending."""
    m, p = shape.m, shape.p
    top = tuple(shape.top)
    excl = (m + 3) % p == 0
    idx = [tuple(a) for a in shape.monomials() if not (excl and tuple(a) == top)]
    return sorted(idx, key=lambda a: contact_norm(a))


def build_contact(shape):
    m, p = shape.m, shape.p
    if m % 2 == 0 or p == 2:
        raise ValueError("K needs odd m and p > 2")
    amb = WittAmbient(shape, weights=[1] * (m - 1) + [2])
    idx = contact_indices(shape)
    Ds = [D_K(DPElement.monomial(shape, a)) for a in idx]
    labels = ["D_K(X^%s)" % fmt_index(a) for a in idx]
    L = EmbeddedLieAlgebra.from_rows(amb, amb.matrix(Ds), name="K%s^(1)" % shape.tag())
    if L.dim == len(idx):
        # insertion order is kept within each degree, so the labels line up
        order = np.argsort([contact_norm(a) for a in idx], kind="stable")
        L.labels = [labels[i] for i in order]
        L.contact_index = [idx[i] for i in order]
    return L


def contact_bracket(f, g):
    """<f, g> from the monomial formula, extended bilinearly.

    The Poisson part sum_j sigma(j) d_j(f) d_{j'}(g) treats X_{2r+1} as a
    parameter."""
    sh = f.shape
    m, p = sh.m, sh.p
    eps = tuple([0] * (m - 1) + [1])
    out = DPElement.zero(sh)
    for a, ca in f.terms.items():
        for b, cb in g.terms.items():
            xa = DPElement.monomial(sh, a)
            xb = DPElement.monomial(sh, b)
            term = DPElement.zero(sh)
            for j in range(1, m):
                term = term + dp_mul(partial(j, xa), partial(prime(j, m), xb)).scale(sigma(j, m))
            s = tuple(x + y - e for x, y, e in zip(a, b, eps))
            if min(s) >= 0 and sh.contains(s):
                c = (contact_norm(b) * lucas_binom(s, b, p) - contact_norm(a) * lucas_binom(s, a, p)) % p
                term = term + DPElement.monomial(sh, s, c)
            out = out + term.scale(ca * cb)
    return out


def contact_bracket_closed(f, g):
    """Delta(f) d_{m}(g) - d_m(f) Delta(g) + sum sigma(j) d_j(f) d_{j'}(g), Delta = 2 - Euler."""
    sh = f.shape
    m = sh.m

    def delta(h):
        e = DPElement.zero(sh)
        for j in range(1, m):
            e = e + dp_mul(DPElement.var(sh, j), partial(j, h))
        return h.scale(2) - e

    out = dp_mul(delta(f), partial(m, g)) - dp_mul(partial(m, f), delta(g))
    for j in range(1, m):
        out = out + dp_mul(partial(j, f), partial(prime(j, m), g)).scale(sigma(j, m))
    return out


def contact_height_formulas(shape):
    """The two closed-form heights for K(2r+1;n)^(1), keyed by which case applies."""
    m, p = shape.m, shape.p
    r = (m - 1) // 2
    s = sum(p ** k for k in shape.n) + p ** shape.n[-1]
    return {"generic": s - (2 * r + 4), "exceptional": s - (2 * r + 5),
            "case": "exceptional" if (m + 3) % p == 0 else "generic"}


# -- d_i calculus ----------------------------------------------------------------

def v_valuation(i, f):
    """min{a_i : c_a != 0}; p^{n_i} for f = 0."""
    return f.valuation(i)


def d_valuation(i, D):
    sh = D.shape
    if not D:
        return sh.p ** sh.n[i - 1]
    best = None
    for a, j, c in D.terms():
        v = a[i - 1] - (1 if j == i else 0)
        best = v if best is None else min(best, v)
    return best


# -- dispatcher ----------------------------------------------------------------------

def build(fid):
    tag, sh = fid.tag, fid.shape
    if tag == "W":
        return build_witt(sh)
    if tag in ("S0", "S1"):
        return build_special(sh, int(tag[1]))
    if tag in ("H0", "H1", "H2"):
        return build_hamiltonian(sh, int(tag[1]))
    if tag == "K1":
        return build_contact(sh)
    raise ValueError(tag)
