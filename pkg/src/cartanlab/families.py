"""One entry point from (family tag, p, n, extras) to a built algebra."""

from dataclasses import dataclass

import numpy as np

from .cartan import FamilyId, build as build_graded
from .deform import build_h_first, build_h_second, build_s_phi_l, build_s_phi_tau
from .dpalg import AlgebraShape
from .melikian import build_melikian

FAMILIES = ("W", "S", "H", "K", "SPhiTau", "SPhiL", "H1st", "H2nd", "M")
DEFAULT_LEVEL = {"S": 1, "H": 2}


@dataclass(frozen=True)
class FamilySpec:
    family: str
    p: int
    n: tuple
    l: int = None
    alpha: tuple = None       # row-major entries of an antisymmetric matrix
    level: int = None

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError("unknown family %r (choose from %s)" % (self.family, ", ".join(FAMILIES)))
        object.__setattr__(self, "n", tuple(int(x) for x in self.n))
        if self.level is None and self.family in DEFAULT_LEVEL:
            object.__setattr__(self, "level", DEFAULT_LEVEL[self.family])
        if self.l is None and self.family in ("SPhiL", "H2nd"):
            object.__setattr__(self, "l", 1)
        if self.family == "M" and self.p != 5:
            raise ValueError("Melikian algebras need p = 5")
        if self.family == "M" and len(self.n) != 2:
            raise ValueError("Melikian algebras need n = (n1, n2)")

    @property
    def m(self):
        return len(self.n)

    def shape(self):
        return AlgebraShape.of(self.p, self.n)

    def alpha_matrix(self):
        m = self.m
        if self.alpha is None:
            return np.zeros((m, m), dtype=np.int64)
        a = np.array(self.alpha, dtype=np.int64).reshape(m, m)
        return a % self.p

    def canonical(self):
        parts = [self.family, "p%d" % self.p, "m%d" % self.m, "n" + "".join(map(str, self.n))]
        if self.level is not None:
            parts.append("level%d" % self.level)
        if self.l is not None:
            parts.append("l%d" % self.l)
        if self.alpha is not None:
            parts.append("alpha" + "".join(str(int(x) % self.p) for x in self.alpha))
        return "_".join(parts)


def build_family(spec):
    sh = spec.shape()
    f = spec.family
    if f == "W":
        L = build_graded(FamilyId("W", sh))
    elif f == "S":
        L = build_graded(FamilyId("S%d" % spec.level, sh))
    elif f == "H":
        L = build_graded(FamilyId("H%d" % spec.level, sh))
    elif f == "K":
        L = build_graded(FamilyId("K1", sh))
    elif f == "SPhiTau":
        L = build_s_phi_tau(sh)
    elif f == "SPhiL":
        L = build_s_phi_l(sh, spec.l)
    elif f == "H1st":
        L = build_h_first(sh, spec.alpha_matrix())
    elif f == "H2nd":
        L = build_h_second(sh, spec.l)
    else:
        L = build_melikian(*spec.n)
    L.spec = spec
    return L
