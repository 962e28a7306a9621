"""Acceptance suite: one test (or a few) per numbered criterion.

Each check records (criterion, claim, ok); the terminal summary prints one
PASS/FAIL line per criterion.  Claims that the computation contradicts are
strict xfails, so they stay visible and turn red if they ever start holding.
"""

from collections import defaultdict
from functools import lru_cache

import numpy as np
import pytest

from cartanlab import cli
from cartanlab.cartan import build_hamiltonian, build_special, build_witt
from cartanlab.criterion import (contact_p3_analysis, generation_of_envelope, recipe_for,
                                 rumynin_analysis)
from cartanlab.dpalg import AlgebraShape
from cartanlab.embedded import same_span_w
from cartanlab.liecore import (Subspace, build_rumynin, build_sl, center, check_jacobi, derived_series,
                               is_simple, p_envelope, verify_grading)
from cartanlab.melikian import check_listed_layers, height_flags
from cartanlab.wittexp import (artin_hasse, check_dfX, check_fX_homomorphism, jordan_block,
                               truncated_exp)

from conftest import ALPHA_ND, family
from test_cartan import _di_parts_hold, _high_bias

TITLES = {
    1: "dimensions",
    2: "gradings and height flags",
    3: "Jacobi identity",
    4: "simplicity verdicts",
    5: "d_i calculus",
    6: "Artin-Hasse series",
    7: "f_X homomorphism",
    8: "p-envelopes and generation",
    9: "criterion grid",
    10: "counterexamples",
    11: "determinism",
}
RESULTS = defaultdict(list)


def record(n, claim, ok):
    RESULTS[n].append((claim, bool(ok)))
    return bool(ok)


def summary_lines():
    lines = []
    for n in sorted(TITLES):
        rows = RESULTS.get(n)
        if not rows:
            continue
        bad = [c for c, ok in rows if not ok]
        status = "FAIL" if bad else "PASS"
        line = "%s criterion %d: %s (%d/%d claims)" % (status, n, TITLES[n], len(rows) - len(bad), len(rows))
        if bad:
            line += "; failing: " + "; ".join(bad)
        lines.append(line)
    return lines


@lru_cache(maxsize=None)
def from_spec(spec):
    kw = {k: getattr(spec, k) for k in ("l", "alpha", "level") if getattr(spec, k) is not None}
    return family(spec.family, spec.p, spec.n, **kw)


# -- 1 -----------------------------------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3, 5, 7])
@pytest.mark.parametrize("n", [(1,), (2,), (1, 1)])
def test_c1_divided_power_and_witt_dims(p, n):
    sh = AlgebraShape.of(p, n)
    W = build_witt(sh)
    ok = (sh.dim == p ** sum(n) == len(list(sh.monomials()))) and W.dim == len(n) * p ** sum(n)
    assert record(1, "A and W dims at p=%d n=%s" % (p, n), ok)


def test_c1_graded_family_dims():
    sh = AlgebraShape.of(5, (1, 1, 1))
    S1 = family("S", 5, (1, 1, 1))
    # second route for S: derived algebra of the divergence-free derivations
    D = derived_series(build_special(sh, 0))[1]
    s_ok = S1.dim == D.dim == 248
    s_ok = s_ok and same_span_w(5, S1.to_w(np.eye(S1.dim, dtype=np.int64)),
                                build_special(sh, 0).to_w(D.rows))
    assert record(1, "S(3;1)^(1) = 248 two routes", s_ok)
    # second route for H: second derived algebra of H(2;1)
    H0 = build_hamiltonian(AlgebraShape.of(5, (1, 1)), level=0)
    assert record(1, "H(2;1)^(2) = 23 two routes",
                  family("H", 5, (1, 1)).dim == derived_series(H0)[2].dim == 23)
    assert record(1, "K(3;1)^(1) = 125 at p=5, 26 at p=3",
                  (family("K", 5, (1, 1, 1)).dim, family("K", 3, (1, 1, 1)).dim) == (125, 26))
    M = family("M", 5, (1, 1))
    assert record(1, "M(1,1) = 125 with listed layers", M.dim == 125 and check_listed_layers(M))


# -- 2 -----------------------------------------------------------------------------------------

@pytest.mark.parametrize("name, p, n, sh", [
    ("W", 5, (1,), (1, 3)),
    ("S", 5, (1, 1, 1), (1, 10)),
    ("H", 5, (1, 1), (1, 5)),
    ("K", 5, (1, 1, 1), (2, 14)),
    ("M", 5, (1, 1), (3, 23)),
])
def test_c2_gradings(name, p, n, sh):
    g = verify_grading(family(name, p, n))
    assert record(2, "%s p=%d (s,h)=%s" % (name, p, sh), g.ok and (g.depth, g.height) == sh)


def test_c2_height_flags():
    M = family("M", 5, (1, 1))
    assert record(2, "Melikian height flag", height_flags(M) == ["height-formula-mismatch"])
    flags = set(cli.base_report(cli.FamilySpec("K", 5, (1, 1, 1)), family("K", 5, (1, 1, 1)), 0)["flags"])
    assert record(2, "contact height flags",
                  flags == {"contact-height-generic-formula-agrees",
                            "contact-height-exceptional-formula-disagrees"})


# -- 3 -----------------------------------------------------------------------------------------

JACOBI_EXHAUSTIVE = [("W", p, n) for p in (2, 3, 5, 7) for n in [(1,), (2,), (1, 1)]] + [
    ("H", 5, (1, 1)), ("K", 5, (1, 1, 1)), ("K", 3, (1, 1, 1)), ("M", 5, (1, 1))]


@pytest.mark.parametrize("name, p, n", JACOBI_EXHAUSTIVE)
def test_c3_jacobi_exhaustive(name, p, n):
    L = family(name, p, n)
    assert L.dim <= 130
    assert record(3, "%s p=%d n=%s exhaustive" % (name, p, n), check_jacobi(L) == 0)


def test_c3_jacobi_small_fixtures():
    assert record(3, "sl_3 and Rumynin exhaustive",
                  check_jacobi(build_sl(3, 3)) == 0 and check_jacobi(build_rumynin()) == 0)


def test_c3_jacobi_sampled_special():
    L = family("S", 5, (1, 1, 1))
    assert record(3, "S(3;1)^(1) 10^4 samples", check_jacobi(L, samples=10 ** 4, seed=0) == 0)


# -- 4 -----------------------------------------------------------------------------------------

SIMPLE = [("W", 3, (1,), {}), ("W", 5, (1,), {}), ("W", 7, (1,), {}), ("S", 5, (1, 1, 1), {}),
          ("H", 5, (1, 1), {}), ("K", 3, (1, 1, 1), {}), ("K", 5, (1, 1, 1), {}),
          ("SPhiTau", 5, (1, 1, 1), {}), ("SPhiL", 5, (1, 1, 1), {}), ("H1st", 5, (1, 1, 1, 1), {}),
          ("H1st", 5, (1, 1, 1, 1), {"alpha": ALPHA_ND}), ("H2nd", 5, (1, 1, 1, 1), {}),
          ("M", 5, (1, 1), {})]


@pytest.mark.parametrize("name, p, n, kw", SIMPLE,
                         ids=["%s-p%d-n%s%s" % (a, p, "".join(map(str, n)), "-alpha" if kw else "")
                              for a, p, n, kw in SIMPLE])
def test_c4_simple(name, p, n, kw):
    v = is_simple(family(name, p, n, **kw))
    assert record(4, "%s p=%d n=%s%s Simple" % (name, p, n, " alpha" if kw else ""), v.status == "Simple")


def test_c4_not_simple_witnesses():
    W = family("W", 2, (1,))
    v = is_simple(W)
    ok = v.status == "NotSimple" and v.witness == Subspace.span(2, 2, W.unit(W.index("d1"))[None, :])
    assert record(4, "W(1;1) p=2 NotSimple with span(d)", ok)
    S = build_sl(3, 3)
    v = is_simple(S)
    assert record(4, "sl_3 p=3 NotSimple with center", v.status == "NotSimple" and v.witness == center(S))


# -- 5 -----------------------------------------------------------------------------------------

@pytest.mark.parametrize("p, n", [(5, (1,)), (3, (2,))])
def test_c5_d_calculus_exhaustive(p, n):
    W = build_witt(AlgebraShape.of(p, n))
    Ds = [W.derivation(W.unit(k)) for k in range(W.dim)]
    ok = all(_di_parts_hold(W, D, E, 1) for D in Ds for E in Ds)
    assert record(5, "W(1;%d) p=%d all basis pairs" % (n[0], p), ok)


def test_c5_d_calculus_random():
    W = build_witt(AlgebraShape.of(5, (1, 1)))
    rng = np.random.default_rng(1)
    ok = True
    for _ in range(1000):
        x = np.zeros((2, W.dim), dtype=np.int64)
        for r in range(2):
            idx = rng.choice(W.dim, size=rng.integers(2, 5), replace=False, p=_high_bias(W))
            x[r, idx] = rng.integers(1, 5, len(idx))
        D, E = W.derivation(x[0]), W.derivation(x[1])
        ok = ok and all(_di_parts_hold(W, D, E, i) for i in (1, 2))
    assert record(5, "W(2;(1,1)) p=5 1000 random pairs", ok)


# -- 6 -----------------------------------------------------------------------------------------

def test_c6_artin_hasse():
    integral = all(c.denominator % p for p in (2, 3, 5, 7) for c in artin_hasse(p, 64).exact)
    assert record(6, "p-integral through degree 64", integral)
    assert record(6, "mod 2 and mod 3 prefixes",
                  artin_hasse(2, 4).mod == (1, 1, 1, 0, 0) and artin_hasse(3, 3).mod == (1, 1, 2, 2))


@pytest.mark.xfail(strict=True, reason="plain truncated exp is a homomorphism on every criterion-7 point")
def test_c6_negative_control_breaks_criterion_7():
    broken = [not check_fX_homomorphism(jordan_block(s, p), series=truncated_exp).ok
              for p, s in [(2, 2), (2, 4), (3, 3), (5, 5)]]
    assert record(6, "plain exp breaks criterion 7", any(broken))


# -- 7 -----------------------------------------------------------------------------------------

@pytest.mark.parametrize("p, size, pairs", [(2, 2, 4), (2, 4, 16), (3, 3, 9), (5, 5, 25)])
def test_c7_fX(p, size, pairs):
    X = jordan_block(size, p)
    v = check_fX_homomorphism(X)
    assert record(7, "J_%d p=%d homomorphism on %d pairs" % (size, p, pairs), v.ok and v.pairs == pairs)
    assert record(7, "J_%d p=%d df_X" % (size, p), check_dfX(X))


# -- 8 -----------------------------------------------------------------------------------------

@pytest.mark.parametrize("n, dim", [((1,), 5), ((2,), 26)])
def test_c8_witt_envelopes(n, dim):
    assert record(8, "W(1;%d) p=5 envelope %d" % (n[0], dim), p_envelope(family("W", 5, n)).dim == dim)


@pytest.mark.xfail(strict=True, reason="ad(f)^2 e = f, so the envelope has dimension 5")
def test_c8_rumynin_envelope():
    assert record(8, "Rumynin envelope 3", p_envelope(build_rumynin()).dim == 3)


def test_c8_contact_generation():
    K = family("K", 5, (1, 1, 1))
    same, env, gen = generation_of_envelope(K, recipe_for(K))
    assert record(8, "K(3;1)^(1) p=5 envelope generated by U+ and U-", same and env == gen)


# -- 9 -----------------------------------------------------------------------------------------

POSITIVE = [g for g in cli.CRITERION_GRID if not g.expect_fail]
NEGATIVE = [g for g in cli.CRITERION_GRID if g.expect_fail]
MODES = {"W": "corollary", "S": "corollary", "H": "corollary", "M": "corollary"}


@pytest.mark.parametrize("g", POSITIVE, ids=lambda g: g.spec.canonical())
def test_c9_positive(g):
    L = from_spec(g.spec)
    r = cli.run_criterion(L, g.spec, g.mode)
    ok = r.ok and r.mode == MODES.get(g.spec.family, "theorem")
    assert record(9, "%s all pass" % g.spec.canonical(), ok)


def test_c9_witt_p3_fails_at_G_III():
    g = NEGATIVE[0]
    r = cli.run_criterion(from_spec(g.spec), g.spec, g.mode)
    assert record(9, "W(1;1) p=3 fails exactly at G III", r.failed() == ["G III"])


@pytest.mark.xfail(strict=True, reason="condition (III) holds for H(4;1;omega(0)) under the stated recipe")
def test_c9_h_first_n1_fails_at_III():
    g = NEGATIVE[1]
    r = cli.run_criterion(from_spec(g.spec), g.spec, g.mode)
    assert record(9, "H(4;1;omega(alpha)) fails exactly at III", r.failed() == ["III"])


# -- 10 ----------------------------------------------------------------------------------------

def test_c10_contact_p3():
    base = contact_p3_analysis()
    assert record(10, "contact_p3 defect equals -X_1", base["defect_equals_minus_x1"])
    rng = np.random.default_rng(0)
    stable = all(contact_p3_analysis(order=list(rng.permutation(27)))["defect"] == base["defect"]
                 for _ in range(3))
    assert record(10, "contact_p3 stable under reordering", stable)


def test_c10_rumynin_stable_under_reordering():
    perms = [[0, 1, 2], [1, 0, 2], [2, 1, 0], [1, 2, 0]]
    rs = [rumynin_analysis(q) for q in perms]
    ok = len({(r["membership"], bool(r["residue"].any())) for r in rs}) == 1
    assert record(10, "rumynin stable under reordering", ok)


@pytest.mark.xfail(strict=True, reason="the conjugated element lies in ad(L) with zero residue")
def test_c10_rumynin_membership():
    r = rumynin_analysis()
    ok = r["membership"] is False and r["residue_is_adf_adh"]
    assert record(10, "rumynin membership false with residue ad(f)ad(h)", ok)


# -- 11 ----------------------------------------------------------------------------------------

def test_c11_selftest_is_byte_identical():
    a = cli.run(["selftest", "--seed", "0"])
    b = cli.run(["selftest", "--seed", "0"])
    assert record(11, "two selftest runs give identical JSON", a[2] == b[2] and a[0]["seed"] == 0)
