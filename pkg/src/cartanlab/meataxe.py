"""Irreducibility of the adjoint module, Holt-Rees style.

Ideals of L are exactly the submodules of L under the associative algebra
generated by ad(g), g running over a Lie generating set.  A random element
theta of that algebra whose characteristic polynomial has an irreducible
factor f with dim ker f(theta) = deg f settles irreducibility: spin one
kernel vector of f(theta) and one kernel vector of f(theta)^T under the
transposed generators.  Both spins are everything iff the module is
irreducible; a proper spin is a submodule (for the dual one, its
annihilator is).
"""

from dataclasses import dataclass

import numpy as np

from . import fp
from .liecore import Subspace, spin, center, derived_algebra


@dataclass
class Verdict:
    status: str                 # "Simple", "NotSimple" or "Inconclusive"
    witness: object = None      # Subspace of L (a proper nonzero ideal) for NotSimple
    reason: str = ""
    trials: int = 0

    def __bool__(self):
        return self.status == "Simple"


def _random_element(gens, rng, p):
    """Random combination of words of length <= 2 in the generators, plus a scalar."""
    n = gens[0].shape[0]
    theta = int(rng.integers(0, p)) * np.eye(n, dtype=np.int64)
    for _ in range(2):
        a, b = rng.integers(0, len(gens), 2)
        c = int(rng.integers(1, p))
        theta = (theta + c * fp.matmul(gens[a], gens[b], p)) % p
    for g in gens:
        theta = (theta + int(rng.integers(0, p)) * g) % p
    return theta


def _certify(gens, theta, p):
    """Run the Norton test for one element.

    Returns ("irreducible", None), ("reducible", Subspace) or (None, kernels)
    when no usable factor exists.  kernels lists the (matrix, poly) pairs
    tried, for the exhaustive fallback."""
    n = theta.shape[0]
    gensT = [g.T.copy() for g in gens]
    facs = sorted(fp.charpoly_factors(theta, p), key=lambda fe: len(fe[0]))
    seen = []
    for coeffs, _ in facs:
        deg = len(coeffs) - 1
        if deg > 8:
            continue
        F = fp.poly_at_matrix(coeffs, theta, p)
        K = fp.nullspace(F, p)
        seen.append((F, K))
        if len(K) != deg:
            continue
        V = spin(p, n, K[:1], gens)
        if V.dim < n:
            return "reducible", V
        W = spin(p, n, fp.nullspace(F.T, p)[:1], gensT)
        if W.dim < n:
            return "reducible", W.annihilator()
        return "irreducible", None
    return None, seen


def module_irreducible(gens, p, seed=0, budget=50):
    """Decide irreducibility of F_p^n under the matrices gens.

    Returns (status, witness, trials) with status in
    {"irreducible", "reducible", "unknown"}."""
    gens = [fp.as_array(g) % p for g in gens]
    n = gens[0].shape[0]
    if n == 1:
        return "irreducible", None, 0
    rng = np.random.default_rng(seed)
    tried = []
    for t in range(1, budget + 1):
        theta = _random_element(gens, rng, p)
        status, info = _certify(gens, theta, p)
        if status == "irreducible":
            return status, None, t
        if status == "reducible":
            return status, info, t
        tried.append(info)
    # exhaustive fallback: spin every kernel vector of every singular element tried
    gensT = [g.T.copy() for g in gens]
    for seen in tried:
        for F, K in seen:
            for v in K:
                V = spin(p, n, v[None, :], gens)
                if V.dim < n:
                    return "reducible", V, budget
            for w in fp.nullspace(F.T, p):
                W = spin(p, n, w[None, :], gensT)
                if W.dim < n:
                    return "reducible", W.annihilator(), budget
    return "unknown", None, budget


def simplicity(L, seed=0, budget=50):
    n, p = L.dim, L.p
    G = L.generators()
    ads = [L.ad(g) for g in G]
    if all(not A.any() for A in ads):
        if n == 1:
            return Verdict("NotSimple", Subspace.full(p, n), "abelian")
        return Verdict("NotSimple", Subspace(p, n, np.eye(n, dtype=np.int64)[:1]), "abelian")
    Z = center(L)
    if Z.dim:
        return Verdict("NotSimple", Z, "nonzero center")
    D = derived_algebra(L)
    if D.dim < n:
        return Verdict("NotSimple", D, "not perfect")
    # ad of two random elements makes random words generic; they lie in the
    # algebra spanned by ad(L), so the submodule lattice is unchanged
    rng = np.random.default_rng(seed)
    extra = [L.ad(rng.integers(0, p, n)) for _ in range(2)]
    status, W, trials = module_irreducible(ads + extra, p, seed=seed, budget=budget)
    if status == "irreducible":
        return Verdict("Simple", None, "adjoint module irreducible", trials)
    if status == "reducible":
        return Verdict("NotSimple", W, "proper ideal found", trials)
    return Verdict("Inconclusive", None, "budget exhausted", trials)
