"""Artin-Hasse exponentials, Witt vector addition and the maps f_X into GL_n(F_p)."""

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import factorial

import numpy as np

from . import fp
from .liecore import Subspace, matrix_power


# -- Artin-Hasse series ------------------------------------------------------------

@dataclass(frozen=True)
class AHSeries:
    p: int
    exact: tuple        # Fractions c_0..c_N
    mod: tuple          # reductions mod p

    @property
    def degree(self):
        return len(self.exact) - 1


def exp_series(g, N):
    """exp(g) for a power series g with g[0] = 0, through degree N, via n c_n = sum k g_k c_{n-k}."""
    c = [Fraction(1)] + [Fraction(0)] * N
    for n in range(1, N + 1):
        s = Fraction(0)
        for k in range(1, n + 1):
            if k < len(g) and g[k]:
                s += k * g[k] * c[n - k]
        c[n] = s / n
    return c


def reduce_fraction(x, p):
    if x.denominator % p == 0:
        raise ArithmeticError("%s is not %d-integral" % (x, p))
    return x.numerator * pow(x.denominator, -1, p) % p


@lru_cache(maxsize=None)
def artin_hasse(p, N):
    if N < 1:
        raise ValueError("N must be positive")
    g = [Fraction(0)] * (N + 1)
    q = 1
    while q <= N:
        g[q] = Fraction(1, q)
        q *= p
    c = exp_series(g, N)
    return AHSeries(p, tuple(c), tuple(reduce_fraction(x, p) for x in c))


def truncated_exp(p, N):
    """sum_{k<p} T^k/k!, padded with zeros through degree N (the plain exponential mod p)."""
    c = [Fraction(1, factorial(k)) if k < p else Fraction(0) for k in range(N + 1)]
    return AHSeries(p, tuple(c), tuple(reduce_fraction(x, p) for x in c))


# -- Witt vectors -------------------------------------------------------------------

@dataclass(frozen=True)
class WittPoint:
    p: int
    coords: tuple

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(int(a) % self.p for a in self.coords))

    @property
    def length(self):
        return len(self.coords)

    def __add__(self, other):
        return witt_add(self, other)

    def __neg__(self):
        return witt_neg(self)


def ghost(a, p):
    """Ghost components w_k = sum_{i<=k} p^i a_i^{p^{k-i}} of an integer vector."""
    return [sum(p ** i * a[i] ** (p ** (k - i)) for i in range(k + 1)) for k in range(len(a))]


def from_ghost(w, p):
    """Integer Witt coordinates with the given ghost components."""
    s = []
    for k, wk in enumerate(w):
        rest = wk - sum(p ** i * s[i] ** (p ** (k - i)) for i in range(k))
        q, r = divmod(rest, p ** k)
        assert r == 0, "ghost components are not integral"
        s.append(q)
    return s


def _check_pair(a, b):
    if a.p != b.p or a.length != b.length:
        raise ValueError("Witt points differ in p or length")


def witt_add(a, b):
    _check_pair(a, b)
    p = a.p
    w = [x + y for x, y in zip(ghost(a.coords, p), ghost(b.coords, p))]
    return WittPoint(p, from_ghost(w, p))


def witt_neg(a):
    p = a.p
    return WittPoint(p, from_ghost([-x for x in ghost(a.coords, p)], p))


def witt_points(p, n):
    return [WittPoint(p, c) for c in itertools.product(range(p), repeat=n)]


# -- nilpotent matrices and f_X ---------------------------------------------------

@dataclass
class NilpotentMatrix:
    X: np.ndarray
    p: int
    n: int

    @classmethod
    def of(cls, X, p):
        X = fp.as_array(X) % p
        size = X.shape[0]
        n, P = 0, X.copy()
        # P = X^{p^n}
        while P.any():
            n += 1
            P = matrix_power(P, p, p)
            if n > size:
                raise ValueError("matrix is not nilpotent")
        return cls(X, p, n)


def jordan_block(size, p):
    return NilpotentMatrix.of(np.eye(size, k=1, dtype=np.int64), p)


def nilpotent_degree(M, p):
    """Least k with M^k = 0."""
    k, P = 1, M % p
    while P.any():
        P = fp.matmul(P, M, p)
        k += 1
    return k


def eval_series(coeffs, M, p):
    """sum c_k M^k by Horner, with coeffs already truncated."""
    n = M.shape[0]
    R = np.zeros((n, n), dtype=np.int64)
    I = np.eye(n, dtype=np.int64)
    for c in reversed(coeffs):
        R = (fp.matmul(R, M, p) + c * I) % p
    return R


def exp_map(X, a, series=artin_hasse):
    """f_X(a) = e_p(a_0 X) e_p(a_1 X^p) ... e_p(a_{n-1} X^{p^{n-1}})."""
    if a.length != X.n or a.p != X.p:
        raise ValueError("Witt point length must equal the nilpotency index of X")
    p = X.p
    size = X.X.shape[0]
    R = np.eye(size, dtype=np.int64)
    Y = X.X
    for i, ai in enumerate(a.coords):
        if i:
            Y = matrix_power(Y, p, p)
        if ai:
            M = (ai * Y) % p
            N = nilpotent_degree(M, p) - 1
            c = series(p, max(N, 1)).mod[:N + 1]
            R = fp.matmul(R, eval_series(c, M, p), p)
    return R


@dataclass
class HomVerdict:
    ok: bool
    pairs: int
    failure: object = None


def check_fX_homomorphism(X, p=None, series=artin_hasse, commuting=()):
    """Exhaustive f_X(a + b) = f_X(a) f_X(b) over W_n(F_p)^2.

    commuting: optional (X2, a1, a2) triples for which f_X(a1) and f_X2(a2) must commute."""
    p = p or X.p
    pts = witt_points(p, X.n)
    img = {a.coords: exp_map(X, a, series) for a in pts}
    count = 0
    for a in pts:
        for b in pts:
            count += 1
            lhs = img[witt_add(a, b).coords]
            rhs = fp.matmul(img[a.coords], img[b.coords], p)
            if not np.array_equal(lhs, rhs):
                return HomVerdict(False, count, (a.coords, b.coords))
    for X2, a1, a2 in commuting:
        A = exp_map(X, a1, series)
        B = exp_map(X2, a2, series)
        if not np.array_equal(fp.matmul(A, B, p), fp.matmul(B, A, p)):
            return HomVerdict(False, count, ("commuting", a1.coords, a2.coords))
    return HomVerdict(True, count)


# -- first-order check over dual numbers ------------------------------------------

class DualMatrix:
    """A + eps B over F_p[eps]/(eps^2)."""

    def __init__(self, A, B, p):
        self.A, self.B, self.p = A % p, B % p, p

    def __matmul__(self, o):
        p = self.p
        return DualMatrix(fp.matmul(self.A, o.A, p),
                          (fp.matmul(self.A, o.B, p) + fp.matmul(self.B, o.A, p)) % p, p)

    def __add__(self, o):
        return DualMatrix(self.A + o.A, self.B + o.B, self.p)

    def scale(self, c):
        return DualMatrix(c * self.A, c * self.B, self.p)


def dual_exp_map(X, i):
    """f_X at the point with a_i = eps and the other coordinates 0, as a DualMatrix."""
    p = X.p
    size = X.X.shape[0]
    I = np.eye(size, dtype=np.int64)
    Z = np.zeros_like(I)
    Y = X.X
    for _ in range(i):
        Y = matrix_power(Y, p, p)
    M = DualMatrix(Z, Y, p)           # eps * X^{p^i}
    N = max(nilpotent_degree(Y, p) - 1, 1)
    c = artin_hasse(p, N).mod
    R = DualMatrix(Z, Z, p)
    for ck in reversed(c):
        R = (R @ M) + DualMatrix(ck * I, Z, p)
    return R


def check_dfX(X):
    """df_X(d/dT_i) = X^{p^i} for every i, read off the eps-part of f_X(eps e_i)."""
    p = X.p
    out = []
    Y = X.X
    for i in range(X.n):
        if i:
            Y = matrix_power(Y, p, p)
        R = dual_exp_map(X, i)
        out.append(bool(np.array_equal(R.A, np.eye(Y.shape[0], dtype=np.int64))
                        and np.array_equal(R.B, Y % p)))
    return all(out)


# -- conjugation stability ----------------------------------------------------------

def conjugation_stability(D, G, p):
    """[A, D] and D A D lie in G for every basis matrix A of G (D^2 = 0)."""
    D = fp.as_array(D) % p
    n = D.shape[0]
    if fp.matmul(D, D, p).any():
        raise ValueError("D must square to zero")
    if not D.any():
        return True
    if not G.contains(D.reshape(-1)):
        raise ValueError("D must lie in G")
    if p == 2:
        raise ValueError("conjugation test needs p > 2")
    rows = []
    for r in G.rows:
        A = r.reshape(n, n)
        AD = fp.matmul(A, D, p)
        DA = fp.matmul(D, A, p)
        rows.append(((AD - DA) % p).reshape(-1))
        rows.append(fp.matmul(D, AD, p).reshape(-1))
    return G.contains_all(np.array(rows))


def matrix_span(mats, p):
    mats = [fp.as_array(M) % p for M in mats]
    n = mats[0].shape[0]
    return Subspace.span(p, n * n, np.array([M.reshape(-1) for M in mats]))
