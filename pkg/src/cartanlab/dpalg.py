"""Truncated divided-power algebras A(m;n) over F_p, their special
derivations W(m;n) and differential forms of degree 1 and 2.

Variables and partials are numbered from 1, as in X_1, ..., X_m.
Multi-indices are plain tuples; monomials X^(a) are enumerated in
lexicographic order of a.
"""

import itertools
from dataclasses import dataclass
from math import comb

from .fp import inv_mod, is_prime


class ShapeMismatch(ValueError):
    pass


class NotUnit(ArithmeticError):
    pass


@dataclass(frozen=True)
class AlgebraShape:
    p: int
    m: int
    n: tuple

    def __post_init__(self):
        n = self.n
        if isinstance(n, int):
            n = (n,) * self.m
        n = tuple(int(x) for x in n)
        object.__setattr__(self, "n", n)
        if not is_prime(self.p):
            raise ValueError("p=%d is not prime" % self.p)
        if self.m < 1 or len(n) != self.m:
            raise ValueError("n must have m=%d entries" % self.m)
        if min(n) < 1:
            raise ValueError("all n_i must be >= 1")

    @classmethod
    def of(cls, p, n, m=None):
        if isinstance(n, int):
            return cls(p, m or 1, (n,) * (m or 1))
        n = tuple(n)
        return cls(p, len(n), n)

    @property
    def bounds(self):
        """The top multi-index p^n - 1."""
        return tuple(self.p ** k - 1 for k in self.n)

    top = bounds

    @property
    def radices(self):
        return tuple(self.p ** k for k in self.n)

    @property
    def dim(self):
        return self.p ** sum(self.n)

    def monomials(self):
        return itertools.product(*(range(b + 1) for b in self.bounds))

    def index(self, a):
        i = 0
        for x, r in zip(a, self.radices):
            i = i * r + x
        return i

    def contains(self, a):
        return all(0 <= x <= b for x, b in zip(a, self.bounds))

    def eps(self, i):
        """The unit multi-index epsilon_i (1-based)."""
        return tuple(1 if k == i - 1 else 0 for k in range(self.m))

    def tag(self):
        return "p%d_m%d_n%s" % (self.p, self.m, "".join(map(str, self.n)))


def binom_mod(a, b, p):
    """binom(a, b) mod p by Lucas' theorem."""
    if b < 0 or a < 0 or b > a:
        return 0
    r = 1
    while a or b:
        da, db = a % p, b % p
        if db > da:
            return 0
        r = r * comb(da, db) % p
        a //= p
        b //= p
    return r


def lucas_binom(a, b, p):
    r = 1
    for x, y in zip(a, b):
        r = r * binom_mod(x, y, p) % p
        if not r:
            return 0
    return r


def add_idx(a, b):
    return tuple(x + y for x, y in zip(a, b))


def sub_idx(a, b):
    return tuple(x - y for x, y in zip(a, b))


def fmt_index(a):
    return "(" + ",".join(map(str, a)) + ")"


class DPElement:
    """Sparse element sum c_a X^(a) of A(m;n)."""

    __slots__ = ("shape", "terms")

    def __init__(self, shape, terms=None):
        p = shape.p
        clean = {}
        for a, c in (terms or {}).items():
            a = tuple(a)
            c %= p
            if c:
                if not shape.contains(a):
                    raise ValueError("index %s outside %s" % (a, shape.bounds))
                clean[a] = c
        self.shape = shape
        self.terms = clean

    @classmethod
    def monomial(cls, shape, a, c=1):
        return cls(shape, {tuple(a): c})

    @classmethod
    def one(cls, shape):
        return cls(shape, {(0,) * shape.m: 1})

    @classmethod
    def zero(cls, shape):
        return cls(shape)

    @classmethod
    def var(cls, shape, i):
        return cls(shape, {shape.eps(i): 1})

    def _check(self, other):
        if other.shape != self.shape:
            raise ShapeMismatch("%s vs %s" % (self.shape, other.shape))

    def __add__(self, other):
        self._check(other)
        t = dict(self.terms)
        for a, c in other.terms.items():
            t[a] = t.get(a, 0) + c
        return DPElement(self.shape, t)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        return DPElement(self.shape, {a: c * v for a, v in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, DPElement):
            return dp_mul(self, other)
        return self.scale(other)

    def __rmul__(self, c):
        return self.scale(c)

    def __eq__(self, other):
        if isinstance(other, int):
            return self == DPElement.one(self.shape).scale(other)
        return isinstance(other, DPElement) and self.shape == other.shape and self.terms == other.terms

    def __hash__(self):
        return hash((self.shape, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for a in sorted(self.terms):
            c = self.terms[a]
            parts.append("%d*X^%s" % (c, fmt_index(a)) if any(a) else str(c))
        return " + ".join(parts)

    @property
    def constant(self):
        return self.terms.get((0,) * self.shape.m, 0)

    def valuation(self, i):
        """v_i(f): least exponent of X_i in the support; p^{n_i} for f = 0."""
        if not self.terms:
            return self.shape.p ** self.shape.n[i - 1]
        return min(a[i - 1] for a in self.terms)

    def is_zero(self):
        return not self.terms


def dp_mul(f, g):
    f._check(g)
    p = f.shape.p
    out = {}
    for a, c in f.terms.items():
        for b, d in g.terms.items():
            s = add_idx(a, b)
            k = lucas_binom(s, a, p)
            if k:
                # a nonzero binomial means no carry, so s is in bounds
                out[s] = (out.get(s, 0) + k * c * d) % p
    return DPElement(f.shape, out)


def partial(i, f):
    if not 1 <= i <= f.shape.m:
        raise IndexError("partial index %d out of range" % i)
    out = {}
    for a, c in f.terms.items():
        if a[i - 1]:
            b = list(a)
            b[i - 1] -= 1
            out[tuple(b)] = c
    return DPElement(f.shape, out)


def dp_power(f, k):
    r = DPElement.one(f.shape)
    for _ in range(k):
        r = dp_mul(r, f)
    return r


def dp_invert(f):
    """Inverse of a unit: c(1+u) with u nilpotent, inverted by a finite geometric series."""
    c = f.constant
    if not c:
        raise NotUnit("constant term is zero")
    ci = inv_mod(c, f.shape.p)
    u = f.scale(ci) - DPElement.one(f.shape)
    total = DPElement.one(f.shape)
    term = DPElement.one(f.shape)
    while True:
        term = -dp_mul(term, u)
        if not term:
            break
        total = total + term
    return total.scale(ci)


class WittDerivation:
    """sum_i f_i d_i with coefficients f_i in A(m;n)."""

    __slots__ = ("shape", "coeffs")

    def __init__(self, shape, coeffs):
        coeffs = tuple(coeffs)
        if len(coeffs) != shape.m:
            raise ValueError("need %d coefficients" % shape.m)
        for f in coeffs:
            if f.shape != shape:
                raise ShapeMismatch("coefficient shape differs")
        self.shape = shape
        self.coeffs = coeffs

    @classmethod
    def zero(cls, shape):
        return cls(shape, [DPElement.zero(shape)] * shape.m)

    @classmethod
    def basis(cls, shape, a, j, c=1):
        """c X^(a) d_j."""
        co = [DPElement.zero(shape)] * shape.m
        co[j - 1] = DPElement.monomial(shape, a, c)
        return cls(shape, co)

    @classmethod
    def d(cls, shape, i):
        return cls.basis(shape, (0,) * shape.m, i)

    @classmethod
    def from_terms(cls, shape, terms):
        """terms: iterable of (a, j, c)."""
        acc = [dict() for _ in range(shape.m)]
        for a, j, c in terms:
            t = acc[j - 1]
            t[tuple(a)] = t.get(tuple(a), 0) + c
        return cls(shape, [DPElement(shape, t) for t in acc])

    def terms(self):
        for j, f in enumerate(self.coeffs, 1):
            for a, c in f.terms.items():
                yield a, j, c

    def _check(self, other):
        if other.shape != self.shape:
            raise ShapeMismatch("%s vs %s" % (self.shape, other.shape))

    def __add__(self, other):
        self._check(other)
        return WittDerivation(self.shape, [f + g for f, g in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other):
        self._check(other)
        return WittDerivation(self.shape, [f - g for f, g in zip(self.coeffs, other.coeffs)])

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c):
        return WittDerivation(self.shape, [f.scale(c) for f in self.coeffs])

    def __rmul__(self, c):
        if isinstance(c, DPElement):
            return WittDerivation(self.shape, [dp_mul(c, f) for f in self.coeffs])
        return self.scale(c)

    def __call__(self, f):
        return apply_derivation(self, f)

    def bracket(self, other):
        self._check(other)
        return WittDerivation(
            self.shape,
            [apply_derivation(self, g) - apply_derivation(other, f)
             for f, g in zip(self.coeffs, other.coeffs)])

    def __eq__(self, other):
        return isinstance(other, WittDerivation) and self.shape == other.shape and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __bool__(self):
        return any(self.coeffs)

    def is_zero(self):
        return not any(self.coeffs)

    def __repr__(self):
        parts = []
        for a, j, c in sorted(self.terms(), key=lambda t: (t[0], t[1])):
            mono = "X^%s" % fmt_index(a) if any(a) else ""
            parts.append("%d*%sd%d" % (c, mono, j))
        return " + ".join(parts) if parts else "0"


def apply_derivation(D, f):
    if D.shape != f.shape:
        raise ShapeMismatch("%s vs %s" % (D.shape, f.shape))
    out = DPElement.zero(f.shape)
    for i, g in enumerate(D.coeffs, 1):
        if g:
            out = out + dp_mul(g, partial(i, f))
    return out


def divergence(D):
    out = DPElement.zero(D.shape)
    for i, g in enumerate(D.coeffs, 1):
        out = out + partial(i, g)
    return out


def witt_bracket(D, E):
    return D.bracket(E)


class DifferentialForm:
    """A 1-form sum g_i dX_i or a 2-form sum_{i<j} g_ij dX_i^dX_j."""

    __slots__ = ("shape", "degree", "terms")

    def __init__(self, shape, degree, terms=None):
        if degree not in (1, 2):
            raise ValueError("only degrees 1 and 2 are supported")
        acc = {}
        for key, g in (terms or {}).items():
            key = (key,) if isinstance(key, int) else tuple(key)
            if len(key) != degree:
                raise ValueError("bad index %s for degree %d" % (key, degree))
            if g.shape != shape:
                raise ShapeMismatch("coefficient shape differs")
            if degree == 2:
                i, j = key
                if i == j:
                    continue
                if i > j:
                    key, g = (j, i), -g
            acc[key] = acc[key] + g if key in acc else g
        self.shape = shape
        self.degree = degree
        self.terms = {k: g for k, g in acc.items() if g}

    def __add__(self, other):
        if other.degree != self.degree or other.shape != self.shape:
            raise ShapeMismatch("incompatible forms")
        t = dict(self.terms)
        for k, g in other.terms.items():
            t[k] = t[k] + g if k in t else g
        return DifferentialForm(self.shape, self.degree, t)

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return DifferentialForm(self.shape, self.degree, {k: g.scale(c) for k, g in self.terms.items()})

    def __eq__(self, other):
        return (isinstance(other, DifferentialForm) and self.degree == other.degree
                and self.shape == other.shape and self.terms == other.terms)

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def coefficient(self, *key):
        if self.degree == 2:
            i, j = key
            if i > j:
                return -self.coefficient(j, i)
        return self.terms.get(tuple(key), DPElement.zero(self.shape))

    def __repr__(self):
        if not self.terms:
            return "0"
        return " + ".join("(%r)d%s" % (g, "^d".join("X%d" % i for i in k)) for k, g in sorted(self.terms.items()))


def exterior_d(f):
    """df = sum_k d_k(f) dX_k."""
    return DifferentialForm(f.shape, 1, {(k,): partial(k, f) for k in range(1, f.shape.m + 1)})


def lie_derivative(D, w):
    """Action of D on a form: D(w(-)) - w([D,-]), extended to 2-forms by Leibniz."""
    if D.shape != w.shape:
        raise ShapeMismatch("shapes differ")
    sh = D.shape
    dcoef = [exterior_d(f) for f in D.coeffs]  # d(D(X_i))
    if w.degree == 1:
        out = {}
        for (i,), g in w.terms.items():
            out[(i,)] = out.get((i,), DPElement.zero(sh)) + apply_derivation(D, g)
            for (k,), h in dcoef[i - 1].terms.items():
                out[(k,)] = out.get((k,), DPElement.zero(sh)) + dp_mul(g, h)
        return DifferentialForm(sh, 1, out)
    out = {}

    def put(i, j, v):
        if i == j or not v:
            return
        if i > j:
            i, j, v = j, i, -v
        out[(i, j)] = out[(i, j)] + v if (i, j) in out else v

    for (i, j), g in w.terms.items():
        put(i, j, apply_derivation(D, g))
        for (k,), h in dcoef[i - 1].terms.items():
            put(k, j, dp_mul(g, h))
        for (k,), h in dcoef[j - 1].terms.items():
            put(i, k, dp_mul(g, h))
    return DifferentialForm(sh, 2, out)
