"""Melikian algebras M(n1, n2) over F_5: A(2;n) + W(2;n) + a twisted copy of W(2;n)."""

from dataclasses import dataclass

import numpy as np

from .dpalg import AlgebraShape, DPElement, WittDerivation, divergence, dp_mul, partial, fmt_index
from .liecore import LieAlgebra, lie_closure, Subspace

P = 5


@dataclass(frozen=True)
class MelikianElement:
    f: DPElement
    D: WittDerivation
    E: WittDerivation       # coefficients of the tilde copy

    @classmethod
    def zero(cls, shape):
        return cls(DPElement.zero(shape), WittDerivation.zero(shape), WittDerivation.zero(shape))

    def __add__(self, o):
        return MelikianElement(self.f + o.f, self.D + o.D, self.E + o.E)

    def __neg__(self):
        return MelikianElement(-self.f, -self.D, -self.E)

    def __sub__(self, o):
        return self + (-o)

    def scale(self, c):
        return MelikianElement(self.f.scale(c), self.D.scale(c), self.E.scale(c))

    def bracket(self, o):
        return melikian_bracket(self, o)


def _fD(f, D):
    return WittDerivation(f.shape, [dp_mul(f, c) for c in D.coeffs])


def melikian_bracket(x, y):
    sh = x.f.shape
    z = DPElement.zero(sh)
    zW = WittDerivation.zero(sh)
    f, dD, dE = z, zW, zW
    # W x W
    if x.D and y.D:
        dD = dD + x.D.bracket(y.D)
    # W x W~ and W~ x W:  [D, E~] = [D,E]~ + 2 div(D) E~
    if x.D and y.E:
        dE = dE + x.D.bracket(y.E) + _fD(divergence(x.D).scale(2), y.E)
    if x.E and y.D:
        dE = dE - y.D.bracket(x.E) - _fD(divergence(y.D).scale(2), x.E)
    # W x A:  [D, f] = D(f) - 2 div(D) f
    if x.D and y.f:
        f = f + x.D(y.f) - dp_mul(divergence(x.D), y.f).scale(2)
    if x.f and y.D:
        f = f - (y.D(x.f) - dp_mul(divergence(y.D), x.f).scale(2))
    # W~ x W~:  [f1 d1~ + f2 d2~, g1 d1~ + g2 d2~] = f1 g2 - f2 g1
    if x.E and y.E:
        f1, f2 = x.E.coeffs
        g1, g2 = y.E.coeffs
        f = f + dp_mul(f1, g2) - dp_mul(f2, g1)
    # A x W~:  [f, E~] = f E
    if x.f and y.E:
        dD = dD + _fD(x.f, y.E)
    if x.E and y.f:
        dD = dD - _fD(y.f, x.E)
    # A x A
    if x.f and y.f:
        a, b = x.f, y.f
        c1 = (dp_mul(b, partial(2, a)) - dp_mul(a, partial(2, b))).scale(2)
        c2 = (dp_mul(a, partial(1, b)) - dp_mul(b, partial(1, a))).scale(2)
        dE = dE + WittDerivation(sh, [c1, c2])
    return MelikianElement(f, dD, dE)


class MelikianBasis:
    """Basis order: A monomials, then X^(a) d_j, then X^(a) d_j~ (lex in a, then j)."""

    def __init__(self, n1, n2):
        self.shape = AlgebraShape.of(P, (n1, n2))
        self.mons = list(self.shape.monomials())
        na = len(self.mons)
        self.na = na
        self.dim = 5 * na
        self.kinds = []
        for a in self.mons:
            self.kinds.append(("A", a, 0))
        for kind in ("W", "T"):
            for a in self.mons:
                for j in (1, 2):
                    self.kinds.append((kind, a, j))
        self.pos = {k: i for i, k in enumerate(self.kinds)}

    def element(self, i):
        kind, a, j = self.kinds[i]
        sh = self.shape
        z = MelikianElement.zero(sh)
        if kind == "A":
            return MelikianElement(DPElement.monomial(sh, a), z.D, z.E)
        D = WittDerivation.basis(sh, a, j)
        if kind == "W":
            return MelikianElement(z.f, D, z.E)
        return MelikianElement(z.f, z.D, D)

    def vector(self, x):
        v = np.zeros(self.dim, dtype=np.int64)
        for a, c in x.f.terms.items():
            v[self.pos[("A", a, 0)]] += c
        for kind, D in (("W", x.D), ("T", x.E)):
            for a, j, c in D.terms():
                v[self.pos[(kind, a, j)]] += c
        return v % P

    def degree(self, i):
        kind, a, _ = self.kinds[i]
        return 3 * sum(a) + {"W": -3, "A": -2, "T": -1}[kind]

    def label(self, i):
        kind, a, j = self.kinds[i]
        x = "X^%s" % fmt_index(a) if any(a) else ""
        if kind == "A":
            return x or "1"
        d = "d%d" % j if kind == "W" else "d%d~" % j
        return (x + " " + d).strip()


def build_melikian(n1, n2, p=P):
    if p != P:
        raise ValueError("Melikian algebras are defined here only for p = 5")
    if n1 < 1 or n2 < 1:
        raise ValueError("n1, n2 must be positive")
    B = MelikianBasis(n1, n2)
    els = [B.element(i) for i in range(B.dim)]
    triples = []
    for i in range(B.dim):
        for j in range(i + 1, B.dim):
            v = B.vector(els[i].bracket(els[j]))
            for k in np.flatnonzero(v):
                triples.append((i, j, int(k), int(v[k])))
    degs = [B.degree(i) for i in range(B.dim)]
    L = LieAlgebra.from_triples(P, [B.label(i) for i in range(B.dim)], triples,
                                grading=degs, name="M(%d,%d)" % (n1, n2))
    L.melikian_basis = B
    return L


def melikian_layer(L, d):
    idx = [i for i, g in enumerate(L.grading) if g == d]
    return Subspace(L.p, L.dim, np.eye(L.dim, dtype=np.int64)[idx])


def listed_layers(L):
    """The five layers displayed for M(n), built directly from their spanning elements."""
    B = L.melikian_basis
    sh = B.shape
    zero = (0, 0)
    top = tuple(sh.top)
    e = {(1, 0), (0, 1)}

    def span(keys):
        return Subspace.span(L.p, L.dim, np.eye(L.dim, dtype=np.int64)[[B.pos[k] for k in keys]])
    h = 3 * sum(top) - 1
    return {
        -3: span([("W", zero, 1), ("W", zero, 2)]),
        -2: span([("A", zero, 0)]),
        -1: span([("T", zero, 1), ("T", zero, 2)]),
        0: span([("W", a, j) for a in e for j in (1, 2)]),
        h: span([("T", top, 1), ("T", top, 2)]),
    }


def check_listed_layers(L):
    return all(melikian_layer(L, d) == S for d, S in listed_layers(L).items())


def stated_height(n1, n2):
    """The closed form quoted for the height, kept for comparison only."""
    return 3 * 5 ** (n1 + n2) - 7


def computed_height_formula(n1, n2):
    return 3 * (5 ** n1 + 5 ** n2) - 7


def height_flags(L):
    n1, n2 = L.melikian_basis.shape.n
    h = max(L.grading)
    flags = []
    if h != stated_height(n1, n2):
        flags.append("height-formula-mismatch")
    return flags


def melikian_generation_check(L):
    lo, hi = min(L.grading), max(L.grading)
    U = np.vstack([melikian_layer(L, lo).rows, melikian_layer(L, hi).rows])
    return lie_closure(U, L).dim == L.dim
