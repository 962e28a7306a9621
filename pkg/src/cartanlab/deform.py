"""Filtered (non-graded) Special and Hamiltonian algebras inside W(m;n)."""

from dataclasses import dataclass, field

import numpy as np

from .ambient import WittAmbient
from .cartan import D_H, D_ij, prime, sigma
from .dpalg import DPElement, WittDerivation, dp_invert, dp_mul, partial
from .embedded import EmbeddedLieAlgebra
from . import fp

DEFORM_TAGS = ("S_PhiTau", "S_PhiL", "H_First", "H_Second")


@dataclass(frozen=True)
class DeformationId:
    tag: str
    shape: object
    l: int = None
    alpha: tuple = field(default=None)

    def __post_init__(self):
        m = self.shape.m
        if self.tag not in DEFORM_TAGS:
            raise ValueError("unknown deformation %r" % self.tag)
        if self.tag.startswith("S") and m < 2:
            raise ValueError("S deformations need m >= 2")
        if self.tag.startswith("H") and (m % 2 or m < 4):
            raise ValueError("H deformations need even m >= 4")
        if self.tag in ("S_PhiL", "H_Second") and not (self.l and 1 <= self.l <= m):
            raise ValueError("need 1 <= l <= m")


def top_monomial(shape):
    return DPElement.monomial(shape, shape.top)


def var_power(shape, i, k):
    """X_i^(k)."""
    a = [0] * shape.m
    a[i - 1] = k
    return DPElement.monomial(shape, tuple(a))


def f_d(f, j):
    """The derivation f d_j."""
    co = [DPElement.zero(f.shape)] * f.shape.m
    co[j - 1] = f
    return WittDerivation(f.shape, co)


def _filtered(amb, Ds, name, expect=None):
    L = EmbeddedLieAlgebra.from_rows(amb, amb.matrix(Ds), name=name)
    if expect is not None and L.dim != expect:
        raise AssertionError("%s: spanning set has rank %d, expected %d" % (name, L.dim, expect))
    return L


# -- special deformations ---------------------------------------------------------

def s_phi_tau_spanning(shape):
    from .cartan import build_special
    S1 = build_special(shape, 1)
    one = DPElement.one(shape)
    u = one - top_monomial(shape)
    Ds = [f_d(u, i) for i in range(1, shape.m + 1)]
    pos = [S1.amb.derivation(S1.B[r]) for r in range(S1.dim) if S1.levels[r] >= 0]
    return Ds + pos


def build_s_phi_tau(shape):
    if shape.m < 2 or shape.p == 2:
        raise ValueError("S(m;n;Phi(tau)) needs m >= 2 and p > 2")
    amb = WittAmbient(shape)
    L = _filtered(amb, s_phi_tau_spanning(shape), "S%s;Phi(tau)^(1)" % shape.tag())
    L.deformation = DeformationId("S_PhiTau", shape)
    return L


def s_phi_l_spanning(shape, l):
    m = shape.m
    Xl = var_power(shape, l, shape.p ** shape.n[l - 1] - 1)
    Ds = []
    for j in range(1, m + 1):
        if j == l:
            continue
        for a in shape.monomials():
            xa = DPElement.monomial(shape, a)
            D = D_ij(l, j, xa) - f_d(dp_mul(Xl, xa), j)
            if D:
                Ds.append(D)
    for j in range(1, m + 1):
        for k in range(j + 1, m + 1):
            if l in (j, k):
                continue
            for a in shape.monomials():
                D = D_ij(j, k, DPElement.monomial(shape, a))
                if D:
                    Ds.append(D)
    for j in range(1, m + 1):
        if j == l:
            continue
        a = list(shape.top)
        a[j - 1] = 0
        Ds.append(WittDerivation.basis(shape, tuple(a), j))
    return Ds


def build_s_phi_l(shape, l):
    if shape.m < 2 or not 1 <= l <= shape.m:
        raise ValueError("invalid l for S(m;n;Phi(l))")
    amb = WittAmbient(shape)
    L = _filtered(amb, s_phi_l_spanning(shape, l), "S%s;Phi(%d)" % (shape.tag(), l))
    L.deformation = DeformationId("S_PhiL", shape, l=l)
    return L


# -- Hamiltonian forms and their operators ----------------------------------------

def dp_matrix_inverse(M):
    """Inverse of a square matrix over A(m;n) by Gauss-Jordan elimination.

    The pivot in each column is the first entry with nonzero constant term."""
    n = len(M)
    sh = M[0][0].shape
    A = [list(row) + [DPElement.one(sh) if i == j else DPElement.zero(sh) for j in range(n)]
         for i, row in enumerate(M)]
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c].constant % sh.p), None)
        if piv is None:
            raise ArithmeticError("matrix is not invertible over A(m;n)")
        A[c], A[piv] = A[piv], A[c]
        inv = dp_invert(A[c][c])
        A[c] = [dp_mul(inv, x) for x in A[c]]
        for r in range(n):
            if r != c and A[r][c]:
                f = A[r][c]
                A[r] = [x - dp_mul(f, y) for x, y in zip(A[r], A[c])]
    return [row[n:] for row in A]


def omega_alpha_matrix(shape, alpha):
    """Coefficient matrix (omega_ij) of omega(alpha)."""
    m = shape.m
    alpha = np.asarray(alpha, dtype=np.int64) % shape.p
    if alpha.shape != (m, m) or ((alpha + alpha.T) % shape.p).any():
        raise ValueError("alpha must be an antisymmetric %dx%d matrix" % (m, m))
    M = [[DPElement.zero(shape) for _ in range(m)] for _ in range(m)]
    for i in range(1, m + 1):
        M[i - 1][prime(i, m) - 1] = DPElement.one(shape).scale(sigma(i, m))
    for i in range(m):
        for j in range(m):
            if alpha[i, j] and i != j:
                t = dp_mul(var_power(shape, i + 1, shape.p ** shape.n[i] - 1),
                           var_power(shape, j + 1, shape.p ** shape.n[j] - 1))
                M[i][j] = M[i][j] + t.scale(int(alpha[i, j]))
    return M


class HamiltonianOperator:
    """f -> -sum g_ij d_i(f) d_j with (g_ij) the inverse of the form's matrix."""

    def __init__(self, shape, omega_matrix):
        self.shape = shape
        self.g = dp_matrix_inverse(omega_matrix)

    def __call__(self, f):
        m = self.shape.m
        co = [DPElement.zero(self.shape)] * m
        parts = [partial(i, f) for i in range(1, m + 1)]
        for i in range(m):
            if not parts[i]:
                continue
            for j in range(m):
                if self.g[i][j]:
                    co[j] = co[j] - dp_mul(self.g[i][j], parts[i])
        return WittDerivation(self.shape, co)


def alpha_det_nonzero(alpha, p):
    return fp.rank(np.asarray(alpha, dtype=np.int64) % p, p) == len(alpha)


def h_first_indices(shape, alpha):
    top = tuple(shape.top)
    full = alpha_det_nonzero(alpha, shape.p)
    return [tuple(a) for a in shape.monomials() if any(a) and (full or tuple(a) != top)]


def build_h_first(shape, alpha):
    m = shape.m
    if m % 2 or m < 4:
        raise ValueError("H(2r;n;omega(alpha)) needs even m >= 4")
    op = HamiltonianOperator(shape, omega_alpha_matrix(shape, alpha))
    idx = h_first_indices(shape, alpha)
    amb = WittAmbient(shape)
    Ds = [op(DPElement.monomial(shape, a)) for a in idx]
    L = _filtered(amb, Ds, "H%s;omega(alpha)^(1)" % shape.tag(), expect=len(idx))
    L.deformation = DeformationId("H_First", shape, alpha=tuple(map(tuple, np.asarray(alpha) % shape.p)))
    L.operator = op
    return L


def D_Hl(l, f):
    """D_H(f) + sigma(l)/2 X_l^(top)(2 f d_{l'} + d_{l'}(f) E - E(f) d_{l'}), E = sum X_j d_j."""
    sh = f.shape
    m, p = sh.m, sh.p
    lp = prime(l, m)
    half = (sigma(l, m) * pow(2, -1, p)) % p
    Xl = var_power(sh, l, p ** sh.n[l - 1] - 1)
    co = list(D_H(f).coeffs)
    dlp = partial(lp, f)
    euler_f = DPElement.zero(sh)
    for j in range(1, m + 1):
        euler_f = euler_f + dp_mul(DPElement.var(sh, j), partial(j, f))
    for j in range(1, m + 1):
        co[j - 1] = co[j - 1] + dp_mul(Xl, dp_mul(dlp, DPElement.var(sh, j))).scale(half)
    co[lp - 1] = co[lp - 1] + dp_mul(Xl, f.scale(2) - euler_f).scale(half)
    return WittDerivation(sh, co)


def h_second_indices(shape):
    r = shape.m // 2
    top = tuple(shape.top)
    excl = (r + 1) % shape.p == 0
    return [tuple(a) for a in shape.monomials() if not (excl and tuple(a) == top)]


def build_h_second(shape, l):
    m = shape.m
    if m % 2 or m < 4:
        raise ValueError("H(2r;n;omega_H,l) needs even m >= 4")
    if not 1 <= l <= m:
        raise ValueError("invalid l")
    idx = h_second_indices(shape)
    amb = WittAmbient(shape)
    Ds = [D_Hl(l, DPElement.monomial(shape, a)) for a in idx]
    L = _filtered(amb, Ds, "H%s;omega_H,%d^(1)" % (shape.tag(), l), expect=len(idx))
    L.deformation = DeformationId("H_Second", shape, l=l)
    return L


def build_deformation(did):
    if did.tag == "S_PhiTau":
        return build_s_phi_tau(did.shape)
    if did.tag == "S_PhiL":
        return build_s_phi_l(did.shape, did.l)
    if did.tag == "H_First":
        return build_h_first(did.shape, did.alpha)
    if did.tag == "H_Second":
        return build_h_second(did.shape, did.l)
    raise ValueError(did.tag)


# -- graded comparisons -------------------------------------------------------------

def expected_gr_h_first(shape, alpha):
    """D_H(X^(b)) over the range used for gr of the first-type algebra."""
    return [D_H(DPElement.monomial(shape, a)) for a in h_first_indices(shape, alpha)]


def expected_gr_h_second(shape, l):
    """D_H(X^(a)), a > 0, together with X_l^(top) d_{l'}."""
    Ds = [D_H(DPElement.monomial(shape, a)) for a in shape.monomials() if any(a)]
    Ds.append(WittDerivation.basis(shape, tuple(
        (shape.p ** shape.n[l - 1] - 1) if i == l - 1 else 0 for i in range(shape.m)), prime(l, shape.m)))
    return Ds
