"""Mechanical checks of the generator criteria (I)-(III) and (G I)-(G III), and two counterexamples.

Every check runs against a representation rho; the recipes all use ad.  For
subalgebras of W(m;n) the adjoint action is evaluated inside W (L is
ad-stable there), which avoids forming dense dim(L) x dim(L) matrices.
"""

import time
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp

from . import fp
from .ambient import modp
from .cartan import D_K, D_ij, build_contact, prime
from .deform import D_Hl, alpha_det_nonzero, f_d, top_monomial, var_power
from .dpalg import AlgebraShape, DPElement, WittDerivation, dp_mul
from .embedded import EmbeddedLieAlgebra
from .liecore import (LieAlgebra, Subspace, adjoint_rep, build_rumynin, center, depth_height,
                      is_simple, p_envelope, restricted_closure)

CONTAINMENT_FLAG = "p2-envelope-condition-read-as-containment"


# -- reports -------------------------------------------------------------------------

@dataclass
class Condition:
    name: str
    ok: bool
    detail: str = ""
    witness: object = None

    def to_json(self):
        out = {"ok": bool(self.ok), "detail": self.detail}
        if self.witness is not None:
            out["witness"] = _jsonable(self.witness)
        return out


def _jsonable(x):
    if isinstance(x, np.ndarray):
        return x.astype(int).tolist()
    if isinstance(x, Subspace):
        return {"dim": x.dim, "rows": x.rows.astype(int).tolist()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


@dataclass
class CriterionReport:
    family: str
    shape: str
    mode: str
    conditions: dict = field(default_factory=dict)
    p2_extras: object = None
    flags: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)

    @property
    def ok(self):
        good = all(c.ok for c in self.conditions.values())
        if self.p2_extras is not None:
            good = good and all(c.ok for c in self.p2_extras.values())
        return good

    def failed(self):
        out = [k for k, c in self.conditions.items() if not c.ok]
        if self.p2_extras:
            out += [k for k, c in self.p2_extras.items() if not c.ok]
        return out

    def to_json(self, timings=False):
        out = {"family": self.family, "shape": self.shape, "mode": self.mode, "ok": self.ok,
               "conditions": {k: c.to_json() for k, c in self.conditions.items()},
               "flags": list(self.flags)}
        if self.p2_extras is not None:
            out["p2_extras"] = {k: c.to_json() for k, c in self.p2_extras.items()}
        if timings:
            out["timings"] = dict(self.timings)
        return out


@dataclass
class GeneratorRecipe:
    family: str
    mode: str                  # "theorem" or "corollary"
    source: str                # which construction the subspaces come from
    Uplus: np.ndarray = None   # rows = the chosen basis D_1..D_n (coordinates in L)
    Uminus: np.ndarray = None
    U: np.ndarray = None

    def subspaces(self, L):
        out = {}
        for k in ("Uplus", "Uminus", "U"):
            V = getattr(self, k)
            if V is not None:
                out[k] = Subspace.span(L.p, L.dim, V)
        return out


# -- the action of rho on a block of vectors --------------------------------------------

class _Action:
    """rho(x) applied to blocks; start() is a block whose annihilator detects rho(y) = 0."""

    def __init__(self, L, rho=None):
        self.L = L
        self.p = L.p
        self.rho = rho
        self.embedded = rho is None and isinstance(L, EmbeddedLieAlgebra)

    def start(self):
        L = self.L
        if self.embedded:
            return sp.csr_matrix(L.B.T)
        n = self.rho.degree if self.rho is not None else L.dim
        return np.eye(n, dtype=np.int64)

    def apply(self, x, V):
        p = self.p
        if self.embedded:
            return modp(self.L.ad_w(x) @ V, p)
        M = self.rho.image(x) if self.rho is not None else self.L.ad(x)
        return fp.matmul(M, V, p)

    @staticmethod
    def is_zero(V):
        return V.nnz == 0 if sp.issparse(V) else not V.any()

    def nilpotency(self, x, bound):
        V = self.start()
        for k in range(1, bound + 1):
            V = self.apply(x, V)
            if self.is_zero(V):
                return k
        return None

    def square_is_zero(self, x):
        return self.is_zero(self.apply(x, self.apply(x, self.start())))


def _closure_dim(L, S):
    S = np.atleast_2d(S)
    if S.shape[0] == 0 or not S.any():
        return Subspace.zero(L.p, L.dim)
    return L.closure(S)


def _rows(L, V):
    if V is None:
        return np.zeros((0, L.dim), dtype=np.int64)
    V = np.atleast_2d(fp.as_array(V)) % L.p
    if V.shape[1] != L.dim:
        raise ValueError("subspace does not live in L (width %d, dim L = %d)" % (V.shape[1], L.dim))
    return V


def _shape_str(L):
    spec = getattr(L, "spec", None)
    if spec is not None:
        return spec.canonical()
    return L.name


# -- theorem mode ----------------------------------------------------------------------

def check_theorem(L, Uplus, Uminus, rho=None, family=None):
    """Conditions (I), (II), (III) for the bases Uplus (D_i) and Uminus (d_i)."""
    t0 = time.perf_counter()
    p = L.p
    Up, Um = _rows(L, Uplus), _rows(L, Uminus)
    if rho is not None and not rho.is_faithful():
        raise ValueError("rho must be faithful")
    act = _Action(L, rho)
    rep = CriterionReport(family or L.name, _shape_str(L), "theorem")

    # (I)
    C = _closure_dim(L, np.vstack([Up, Um]))
    rep.conditions["I"] = Condition("I", C.dim == L.dim, "closure dim %d of %d" % (C.dim, L.dim),
                                    None if C.dim == L.dim else C)
    t1 = time.perf_counter()

    # (II)
    ok, detail, wit = True, "", None
    for a in range(len(Um)):
        for b in range(a + 1, len(Um)):
            if L.bracket(Um[a], Um[b]).any():
                ok, detail, wit = False, "[U-, U-] != 0", (a, b)
                break
        if not ok:
            break
    bound = (rho.degree if rho is not None else L.dim) + 1
    indices = []
    if ok:
        for a in range(len(Um)):
            k = act.nilpotency(Um[a], bound)
            indices.append(k)
            if k is None:
                ok, detail, wit = False, "rho(d_%d) is not nilpotent" % (a + 1), Um[a]
                break
    if ok:
        detail = "nilpotency indices %s" % indices
    rep.conditions["II"] = Condition("II", ok, detail, wit)
    t2 = time.perf_counter()

    # (III)
    bad = [a for a in range(len(Up)) if not act.square_is_zero(Up[a])]
    rep.conditions["III"] = Condition(
        "III", not bad, "%d of %d basis elements have rho(D)^2 != 0" % (len(bad), len(Up)),
        Up[bad[0]] if bad else None)
    t3 = time.perf_counter()

    if p == 2:
        rep.p2_extras = _p2_extras(L, Up, Um, rho)
        rep.flags.append(CONTAINMENT_FLAG)
    rep.timings = {"I": t1 - t0, "II": t2 - t1, "III": t3 - t2, "total": time.perf_counter() - t0}
    return rep


def _p2_extras(L, Up, Um, rho):
    """rho(D_i) rho(D_j) = 0 (i != j) and rho(D_i) u rho(D_i) in L_[p] for u in U^-_[p]."""
    rho = rho or adjoint_rep(L)
    p = L.p
    Ds = [rho.image(x) for x in Up]
    out = {}
    bad = [(i, j) for i in range(len(Ds)) for j in range(len(Ds))
           if i != j and fp.matmul(Ds[i], Ds[j], p).any()]
    out["products"] = Condition("products", not bad, "%d nonzero products" % len(bad),
                                bad[0] if bad else None)
    env_L = p_envelope(L, rho)
    if len(Um):
        env_U = restricted_closure([rho.image(x) for x in Um], p)
        N = rho.degree
        bad = []
        for i, D in enumerate(Ds):
            for r in env_U.rows:
                M = fp.matmul(fp.matmul(D, r.reshape(N, N), p), D, p)
                if not env_L.contains(M.ravel()):
                    bad.append(i)
                    break
        out["sandwich"] = Condition("sandwich", not bad,
                                    "envelope containment fails for D_%s" % [b + 1 for b in bad] if bad
                                    else "all products lie in the envelope of L",
                                    bad or None)
    return out


# -- corollary mode ----------------------------------------------------------------------

def _degree_rows(L, d):
    idx = [i for i, g in enumerate(L.grading) if g == d]
    return np.eye(L.dim, dtype=np.int64)[idx]


def ad_power_vanishing(L, U, limit=64):
    """Least N with ad(u_1)...ad(u_N) = 0 for all u_i in U (None if above limit)."""
    act = _Action(L)
    V = act.start()
    for N in range(1, limit + 1):
        blocks = [act.apply(u, V) for u in U]
        if act.embedded:
            V = modp(sp.hstack(blocks, format="csr"), L.p)
            # keep the block small: independent columns only
            if V.shape[1] > L.amb.N:
                V = sp.csr_matrix(fp.rref(V.T.toarray(), L.p)[0].T)
        else:
            V = np.hstack(blocks) % L.p
            if V.shape[1] > L.dim:
                V = fp.rref(V.T, L.p)[0].T
        if act.is_zero(V):
            return N
    return None


def check_corollary(L, U, family=None, check_center=True):
    t0 = time.perf_counter()
    if L.grading is None:
        raise ValueError("corollary mode needs a graded algebra")
    U = _rows(L, U)
    deg = np.array(L.grading)
    for r in U:
        if (deg[np.flatnonzero(r)] > -1).any():
            raise ValueError("U must lie in degrees <= -1")
    if check_center and center(L).dim:
        raise ValueError("corollary mode needs a centerless algebra")
    s, h = depth_height(L)
    rep = CriterionReport(family or L.name, _shape_str(L), "corollary")

    bad = [(a, b) for a in range(len(U)) for b in range(a + 1, len(U)) if L.bracket(U[a], U[b]).any()]
    rep.conditions["G I"] = Condition("G I", not bad, "[U,U] = 0" if not bad else "[U,U] != 0",
                                      bad[0] if bad else None)
    Lh = _degree_rows(L, h)
    C = _closure_dim(L, np.vstack([U, Lh]))
    rep.conditions["G II"] = Condition("G II", C.dim == L.dim, "closure dim %d of %d" % (C.dim, L.dim),
                                       None if C.dim == L.dim else C)
    if L.p > 2:
        rep.conditions["G III"] = Condition("G III", s < h, "s = %d, h = %d" % (s, h))
    else:
        N = ad_power_vanishing(L, U)
        l = None
        if N is not None:
            l = 1
            while 2 ** l < N:
                l += 1
        ok = l is not None and (2 ** (l - 1) + 1) * s < h
        rep.conditions["G III"] = Condition("G III", ok, "s = %d, h = %d, l = %s" % (s, h, l))
    rep.timings = {"total": time.perf_counter() - t0}
    return rep


def corollary_as_theorem(L, U, family=None):
    """Theorem mode with U^- = U and U^+ = L_h, as in the corollary's reduction."""
    _, h = depth_height(L)
    return check_theorem(L, _degree_rows(L, h), U, family=family)


# -- recipes -----------------------------------------------------------------------------

def _in_L(L, Ds):
    """Coordinates in L of derivations lying in L."""
    amb = L.amb
    return L.from_w(amb.matrix(Ds)) % L.p


def _top_piece(L):
    """Basis rows of L_(h): the basis vectors with the largest lead degree."""
    lev = np.array(L.levels if L.levels is not None else L.grading)
    idx = np.flatnonzero(lev == lev.max())
    return np.eye(L.dim, dtype=np.int64)[idx]


def h_first_l(shape):
    """Smallest l whose partner l' carries the largest n."""
    m, nmax = shape.m, max(shape.n)
    return min(i for i in range(1, m + 1) if shape.n[prime(i, m) - 1] == nmax)


def recipe_for(L, spec=None):
    spec = spec or getattr(L, "spec", None)
    if spec is None:
        raise ValueError("recipe_for needs the family spec")
    f, p = spec.family, spec.p
    sh = spec.shape()
    m = sh.m
    tau = tuple(sh.top)
    if f in ("W", "S", "H"):
        if (f, spec.level) not in (("W", None), ("S", 1), ("H", 2)):
            raise ValueError("no recipe for %s at level %s" % (f, spec.level))
        return GeneratorRecipe(f, "corollary", "degree -1 layer", U=_degree_rows(L, -1))
    if f == "M":
        return GeneratorRecipe(f, "corollary", "degree -3 layer", U=_degree_rows(L, min(L.grading)))
    if f == "K":
        r = (m - 1) // 2
        Um = [D_K(DPElement.var(sh, i)) for i in range(1, r + 1)]
        Up = [D_K(var_power(sh, j, p ** sh.n[j - 1] - 1)) for j in range(r + 1, 2 * r + 1)]
        return GeneratorRecipe(f, "theorem", "contact: D_K(X_i), D_K(X_j^(top)) and L_h",
                               Uplus=np.vstack([_in_L(L, Up), _top_piece(L)]), Uminus=_in_L(L, Um))
    if f == "SPhiTau":
        one = DPElement.one(sh)
        Um = [f_d(one - top_monomial(sh), 1)]
        Up = [f_d(var_power(sh, 1, p ** sh.n[0] - 2), j) for j in range(2, m + 1)]
        return GeneratorRecipe(f, "theorem", "special deformation Phi(tau)",
                               Uplus=np.vstack([_in_L(L, Up), _top_piece(L)]), Uminus=_in_L(L, Um))
    if f == "SPhiL":
        l = spec.l
        Um = [WittDerivation.d(sh, i) for i in range(1, m + 1) if i != l]
        a = list(tau)
        a[l - 1] = 0
        rest = DPElement.monomial(sh, tuple(a))
        Up = [D_ij(l, j, rest) - f_d(top_monomial(sh), j) for j in range(1, m + 1) if j != l]
        top = [D_ij(i, j, top_monomial(sh)) for i in range(1, m + 1) for j in range(i + 1, m + 1)]
        top = [D for D in top if D]
        return GeneratorRecipe(f, "theorem", "special deformation Phi(l)",
                               Uplus=np.vstack([_in_L(L, Up), _in_L(L, top)]), Uminus=_in_L(L, Um))
    if f == "H1st":
        op = L.operator
        l = h_first_l(sh)
        lp = prime(l, m)
        Um = [op(DPElement.var(sh, l))]
        Xtop = var_power(sh, lp, p ** sh.n[lp - 1] - 1)
        Up = [op(dp_mul(Xtop, DPElement.var(sh, j))) for j in range(1, m + 1) if j not in (l, lp)]
        if alpha_det_nonzero(spec.alpha_matrix(), p):
            top = [op(top_monomial(sh))]
        else:
            top = [op(DPElement.monomial(sh, tuple(t - (k == i) for k, t in enumerate(tau))))
                   for i in range(m)]
        rec = GeneratorRecipe(f, "theorem", "Hamiltonian form omega(alpha)",
                              Uplus=np.vstack([_in_L(L, Up), _in_L(L, top)]), Uminus=_in_L(L, Um))
        rec.l = l
        return rec
    if f == "H2nd":
        l = spec.l
        lp = prime(l, m)
        r = m // 2
        Um = [D_Hl(l, DPElement.var(sh, i)) for i in range(1, r + 1) if i not in (l, lp)]
        Um.append(D_Hl(l, DPElement.var(sh, l)))
        Up = [D_Hl(l, var_power(sh, prime(j, m), p ** sh.n[prime(j, m) - 1] - 1))
              for j in range(1, r + 1) if j not in (l, lp)]
        Up.append(D_Hl(l, var_power(sh, lp, p ** sh.n[lp - 1] - 1)))
        if (r + 1) % p:
            top = [D_Hl(l, top_monomial(sh))]
        else:
            top = [D_Hl(l, DPElement.monomial(sh, tuple(t - (k == i) for k, t in enumerate(tau))))
                   for i in range(m)]
        return GeneratorRecipe(f, "theorem", "Hamiltonian form omega_H,l",
                               Uplus=np.vstack([_in_L(L, Up), _in_L(L, top)]), Uminus=_in_L(L, Um))
    raise ValueError("no recipe for family %r" % f)


def run_recipe(L, recipe=None):
    recipe = recipe or recipe_for(L)
    if recipe.mode == "corollary":
        return check_corollary(L, recipe.U, family=recipe.family)
    return check_theorem(L, recipe.Uplus, recipe.Uminus, family=recipe.family)


def generation_of_envelope(L, recipe):
    """p-envelope of L equals the restricted algebra generated by the envelopes of U^+ and U^-."""
    rho = adjoint_rep(L)
    env = p_envelope(L, rho)
    parts = []
    for V in (recipe.Uplus, recipe.Uminus):
        parts += list(restricted_closure([rho.image(x) for x in V], L.p).rows)
    N = L.dim
    gen = restricted_closure([r.reshape(N, N) for r in parts], L.p)
    return gen == env, env.dim, gen.dim


# -- counterexamples -----------------------------------------------------------------------

def rumynin_analysis(perm=None):
    """The p = 2 algebra spanned by e~, f~, h~ and the conjugated element.

    perm reorders the basis; results are reported in the original labels."""
    L = build_rumynin()
    if perm is not None:
        L = _permuted(L, perm)
    p = L.p
    e, f, h = (L.unit(L.index(x)) for x in ("e", "f", "h"))
    ad = L.ad
    I = np.eye(L.dim, dtype=np.int64)
    Ae, Af, Ah = ad(e), ad(f), ad(h)
    M = fp.matmul(fp.matmul((I + Af) % p, Ae, p), (I + Af) % p, p)
    span = Subspace(p, L.dim ** 2, np.array([ad(L.unit(i)).ravel() for i in range(L.dim)]))
    FH = fp.matmul(Af, Ah, p)
    stated = (Ae + Ah + FH) % p
    residue = span.reduce(M.ravel()[None, :])[0].reshape(L.dim, L.dim)
    fh_residue = span.reduce(FH.ravel()[None, :])[0].reshape(L.dim, L.dim)
    return {
        "simple": is_simple(L).status,
        "membership": bool(span.contains(M.ravel())),
        "residue": residue,
        "residue_is_adf_adh": bool(fh_residue.any() and np.array_equal(residue, fh_residue)),
        "stated_decomposition_holds": bool(np.array_equal(M, stated)),
        "adf_adh_in_adL": bool(span.contains(FH.ravel())),
        "conjugated": M,
        "adf_adf_ade": fp.matmul(fp.matmul(Af, Af, p), Ae, p),
        "algebra": L,
    }


def _permuted(L, perm):
    n = L.dim
    inv = np.argsort(perm)
    trip = []
    for i, j, k, c in L.triples():
        a, b = inv[i], inv[j]
        if a < b:
            trip.append((int(a), int(b), int(inv[k]), c))
        else:
            trip.append((int(b), int(a), int(inv[k]), -c))
    return LieAlgebra.from_triples(L.p, [L.labels[perm[t]] for t in range(n)], trip, name=L.name)


def derivation_matrix(amb_shape, D, order=None):
    """Matrix of a derivation acting on A(m;n) (columns = images of monomials)."""
    mons = list(amb_shape.monomials())
    if order is not None:
        mons = [mons[i] for i in order]
    pos = {a: i for i, a in enumerate(mons)}
    n = len(mons)
    M = np.zeros((n, n), dtype=np.int64)
    for c, a in enumerate(mons):
        for b, v in D(DPElement.monomial(amb_shape, a)).terms.items():
            M[pos[b], c] = v % amb_shape.p
    return M, mons


def _vec_to_dp(shape, v, mons):
    return DPElement(shape, {mons[i]: int(v[i]) for i in np.flatnonzero(v)})


def _dp_to_vec(f, mons):
    pos = {a: i for i, a in enumerate(mons)}
    v = np.zeros(len(mons), dtype=np.int64)
    for a, c in f.terms.items():
        v[pos[a]] = c % f.shape.p
    return v


def contact_p3_analysis(order=None):
    """nabla = D_K(X_1)^2 d_3 on A(3;1) at p = 3, its Leibniz defect and E = delta^-1 D_K(X_2) delta."""
    sh = AlgebraShape.of(3, (1, 1, 1))
    p = 3
    L = build_contact(sh)
    A1, mons = derivation_matrix(sh, D_K(DPElement.var(sh, 1)), order)
    A2, _ = derivation_matrix(sh, D_K(DPElement.var(sh, 2)), order)
    d3, _ = derivation_matrix(sh, WittDerivation.d(sh, 3), order)
    nabla = fp.matmul(fp.matmul(A1, A1, p), d3, p)

    def apply(M, g):
        return _vec_to_dp(sh, fp.matmul(M, _dp_to_vec(g, mons)[:, None], p)[:, 0], mons)
    x2 = DPElement.var(sh, 2)
    x3 = DPElement.monomial(sh, (0, 0, 2))
    defect = apply(nabla, dp_mul(x2, x3)) - dp_mul(x2, apply(nabla, x3)) - dp_mul(x3, apply(nabla, x2))
    # delta_1(1) = 1 + D + D^2/2 and its inverse delta_1(-1)
    I = np.eye(len(mons), dtype=np.int64)
    half = pow(2, -1, p)
    A1sq = fp.matmul(A1, A1, p)
    d_plus = (I + A1 + half * A1sq) % p
    d_minus = (I - A1 + half * A1sq) % p
    E = fp.matmul(fp.matmul(d_minus, A2, p), d_plus, p)
    stated_E = (A2 + d3 + nabla) % p
    Lmats = [derivation_matrix(sh, L.amb.derivation(L.B[r]), order)[0].ravel() for r in range(L.dim)]
    span = Subspace.span(p, len(mons) ** 2, np.array(Lmats))
    return {
        "defect": defect,
        "defect_equals_minus_x1": defect == DPElement.var(sh, 1).scale(-1),
        "E_matches_stated_form": bool(np.array_equal(E, stated_E)),
        "E_in_L": bool(span.contains(E.ravel())),
        "nabla_in_L": bool(span.contains(nabla.ravel())),
        "dim_L": L.dim,
    }


def reproduce_counterexample(name):
    if name == "rumynin":
        r = rumynin_analysis()
        return {k: _jsonable(v) for k, v in r.items() if k not in ("algebra",)}
    if name == "contact_p3":
        r = contact_p3_analysis()
        r = dict(r)
        r["defect"] = str(r["defect"])
        return r
    raise ValueError("unknown counterexample %r (choose rumynin or contact_p3)" % name)
