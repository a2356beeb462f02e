"""Sign-engine tests: Sturm verdicts, Newton polygon, B bounds, strips."""

import random
from fractions import Fraction as F

import pytest

from intcover.exactalg import (
    BiPoly,
    BiRatB,
    UniPoly,
    b_symbol,
    binom_poly_in_sum,
    binomial,
    const,
    eval_scalar,
    make_biratb,
    make_unirat,
    scalar_sub,
)
from intcover.signcert import (
    Region,
    SignOracle,
    SignVerdict,
    half_line,
    quadrant,
    sign_const,
)


def bp(terms):
    return BiPoly({e: F(c) for e, c in terms.items()})


R = BiPoly.var_r()
K = BiPoly.var_k()
ONE = BiPoly.const(1)


@pytest.fixture
def oracle():
    return SignOracle()


# ---------------------------------------------------------------------------
# constants and univariate
# ---------------------------------------------------------------------------


def test_sign_const():
    assert sign_const(F(5, 3)).verdict == SignVerdict.POSITIVE
    assert sign_const(F(0)).verdict == SignVerdict.ZERO
    assert sign_const(F(-2)).verdict == SignVerdict.NEGATIVE


def test_cubic_positive_above_five(oracle):
    p = UniPoly.make("k", [240, -118, -2, 4])
    res = oracle.sign_uni(p, UniPoly.const("k", 1), 5)
    assert res.verdict == SignVerdict.POSITIVE
    assert res.certificate["num"]["method"] == "SturmBoundary"
    # same polynomial is not one-signed from k >= 2 (root between 2 and 3)
    assert oracle.sign_uni(p, UniPoly.const("k", 1), 2).verdict == SignVerdict.UNKNOWN


def test_boundary_zero_is_nonnegative(oracle):
    p = UniPoly.make("x", [-3, 1])  # x - 3
    res = oracle.sign_uni(p, UniPoly.const("x", 1), 3)
    assert res.verdict == SignVerdict.NONNEGATIVE


def test_sign_change_in_region_unknown(oracle):
    p = UniPoly.make("x", [-100, 0, 1])  # x^2 - 100, root at 10 > 4
    res = oracle.sign_uni(p, UniPoly.const("x", 1), 4)
    assert res.verdict == SignVerdict.UNKNOWN


def test_even_multiplicity_nonnegative(oracle):
    x = UniPoly.x("x")
    p = (x - UniPoly.const("x", 5)) ** 2
    res = oracle.sign_uni(p, UniPoly.const("x", 1), 3)
    assert res.verdict == SignVerdict.NONNEGATIVE


def test_denominator_with_root_in_region(oracle):
    # x/(x-1) from x >= 1: pole at 1, no verdict.
    x = UniPoly.x("x")
    one = UniPoly.const("x", 1)
    assert oracle.sign_uni(x, x - one, 1).verdict == SignVerdict.UNKNOWN
    assert oracle.sign_uni(x, x - one, 2).verdict == SignVerdict.POSITIVE


def test_sign_unirat_via_region(oracle):
    s = make_unirat(UniPoly.make("r", [0, -1, 1]), UniPoly.const("r", 1))  # r^2 - r
    res = oracle.sign(s, half_line("r", 3))
    assert res.verdict == SignVerdict.POSITIVE
    neg = oracle.sign(const(-1) * s, half_line("r", 3))
    assert neg.verdict == SignVerdict.NEGATIVE


# ---------------------------------------------------------------------------
# bivariate polynomials
# ---------------------------------------------------------------------------


def test_shifted_expansion_positive(oracle):
    p = bp({(1, 1): 1, (1, 0): -1, (0, 1): -1})  # rk - r - k
    res = oracle.bipoly_sign(p, quadrant(4, 3))
    assert res.verdict == SignVerdict.POSITIVE
    assert res.certificate["method"] == "ShiftedExpansion"


def test_newton_positivity_direct(oracle):
    p = bp({(1, 1): 1, (1, 0): -1, (0, 1): -1})
    res = oracle.newton_positivity(p, 4, 3)
    assert res.verdict == SignVerdict.POSITIVE
    assert res.certificate["method"] == "NewtonPolygon"
    assert {"exponent": [1, 1], "coefficient": "1"} in res.certificate["dominating"]


def test_newton_constant(oracle):
    assert oracle.newton_positivity(ONE, 0, 0).verdict == SignVerdict.POSITIVE


def test_newton_sign_change_unknown(oracle):
    p = bp({(1, 0): 1, (0, 1): -1})  # r - k
    assert oracle.newton_positivity(p, 4, 3).verdict == SignVerdict.UNKNOWN
    assert oracle.bipoly_sign(p, quadrant(4, 3)).verdict == SignVerdict.UNKNOWN


def test_newton_never_contradicted_on_grid(oracle):
    rng = random.Random(20240)
    checked = 0
    while checked < 60:
        terms = {}
        for _ in range(rng.randint(1, 5)):
            terms[(rng.randint(0, 2), rng.randint(0, 2))] = F(rng.randint(-6, 6))
        p = BiPoly(terms)
        if p.is_zero():
            continue
        r0, k0 = rng.randint(0, 4), rng.randint(0, 4)
        res = oracle.newton_positivity(p, r0, k0)
        checked += 1
        if res.verdict == SignVerdict.POSITIVE:
            for rv in range(r0, r0 + 31):
                for kv in range(k0, k0 + 31):
                    assert p.eval(rv, kv) > 0, (p, rv, kv)


def test_bipoly_strip_split(oracle):
    # r(k-3)(k-4) + 1: zero leading slice at the corner defeats both the
    # shifted expansion and the Newton test, but one exact strip resolves it.
    p = R * (K - BiPoly.const(3)) * (K - BiPoly.const(4)) + ONE
    res = oracle.bipoly_sign(p, quadrant(4, 3))
    assert res.verdict == SignVerdict.POSITIVE
    assert res.certificate["method"] == "StripSplit"
    assert res.certificate["reconstructed"] is True


# ---------------------------------------------------------------------------
# B-carrying scalars
# ---------------------------------------------------------------------------


def test_b_at_least_binom3(oracle):
    # B - binom(r+k,3) >= 0 on {r >= 4, k >= 3} via the registered bound.
    s = make_biratb(ONE, -binom_poly_in_sum(3), ONE)
    res = oracle.sign(s, quadrant(4, 3))
    assert res.verdict in (SignVerdict.POSITIVE, SignVerdict.NONNEGATIVE)


def test_appendix_binomial_difference_via_b_bound(oracle):
    # B >= (r+k)(k^3-k^2-2k+1)/(rk-r-k) on {r >= 4, k >= 4}: the B coefficient
    # (rk-r-k) is certified positive, then B >= binom(r+k,4) settles it.
    rk = bp({(1, 1): 1, (1, 0): -1, (0, 1): -1})
    kpoly = bp({(0, 3): 1, (0, 2): -1, (0, 1): -2, (0, 0): 1})
    s = make_biratb(rk, -(R + K) * kpoly, rk)
    res = oracle.sign(s, quadrant(4, 4))
    assert res.verdict in (SignVerdict.POSITIVE, SignVerdict.NONNEGATIVE)
    assert res.certificate["num"]["method"] == "BSubstitution"
    assert res.certificate["num"]["bound"] == "binom(r+k,4)"


def test_cleared_denominator_difference_shifted_expansion(oracle):
    # binom(r+k,4) - (r+k)(k^3-k^2-2k+1)/(rk-r-k) >= 0 on {r >= 4, k >= 4};
    # the cleared-denominator numerator expands with nonnegative coefficients
    # around (4, 4).
    rk = bp({(1, 1): 1, (1, 0): -1, (0, 1): -1})
    kpoly = bp({(0, 3): 1, (0, 2): -1, (0, 1): -2, (0, 0): 1})
    num = binom_poly_in_sum(4) * rk - (R + K) * kpoly
    s = make_biratb(BiPoly.const(0), num, rk)
    res = oracle.sign(s, quadrant(4, 4))
    assert res.verdict in (SignVerdict.POSITIVE, SignVerdict.NONNEGATIVE)
    assert res.certificate["num"]["method"] == "ShiftedExpansion"
    # cross-check against exact evaluation on a grid
    for rv in range(4, 12):
        for kv in range(4, 12):
            assert eval_scalar(s, {"r": rv, "k": kv}) >= 0


def test_b_linear_negative_direction(oracle):
    # -(B - binom(r+k,3)) <= 0 on {r >= 4, k >= 3}: nonpositive B coefficient,
    # lower bound substitution is sound downward.
    s = make_biratb(-ONE, binom_poly_in_sum(3), ONE)
    res = oracle.sign(s, quadrant(4, 3))
    assert res.verdict in (SignVerdict.NEGATIVE, SignVerdict.NONPOSITIVE)


def test_b_strip_split_integer_k(oracle):
    # (k-3)(k-4)B + 1 > 0 holds for integer k >= 3 although the B coefficient
    # changes sign on real k in (3, 4); strips handle k = 3, 4 exactly.
    p = (K - BiPoly.const(3)) * (K - BiPoly.const(4))
    s = make_biratb(p, ONE, ONE)
    res = oracle.sign(s, quadrant(4, 3))
    assert res.verdict == SignVerdict.POSITIVE
    assert res.certificate["num"]["method"] == "StripSplit"


def test_zero_scalar(oracle):
    s = scalar_sub(b_symbol(), b_symbol())
    assert oracle.sign(s, quadrant(4, 3)).verdict == SignVerdict.ZERO


# ---------------------------------------------------------------------------
# soundness sampling and monotonicity
# ---------------------------------------------------------------------------

CORPUS = [
    (make_biratb(ONE, -binom_poly_in_sum(3), ONE), 4, 3),
    (make_biratb(BiPoly.var_k(), BiPoly.const(0), R + K), 4, 2),
    (make_biratb(bp({(1, 1): 1, (1, 0): -1, (0, 1): -1}), -(R + K), ONE), 4, 3),
    (make_biratb(BiPoly.const(0), bp({(2, 0): 1, (0, 2): 1, (0, 0): 7}), ONE), 0, 0),
    (make_biratb(-ONE, binom_poly_in_sum(4), ONE), 4, 4),
]


def test_soundness_sampling():
    rng = random.Random(99)
    oracle = SignOracle()
    for scalar, r0, k0 in CORPUS:
        res = oracle.sign(scalar, quadrant(r0, k0))
        if res.verdict == SignVerdict.UNKNOWN:
            continue
        for _ in range(50):
            pt = {"r": rng.randint(r0, r0 + 40), "k": rng.randint(k0, k0 + 40)}
            v = eval_scalar(scalar, pt)
            if res.verdict == SignVerdict.POSITIVE:
                assert v > 0, (scalar, pt)
            elif res.verdict == SignVerdict.NONNEGATIVE:
                assert v >= 0, (scalar, pt)
            elif res.verdict == SignVerdict.ZERO:
                assert v == 0
            elif res.verdict == SignVerdict.NONPOSITIVE:
                assert v <= 0
            elif res.verdict == SignVerdict.NEGATIVE:
                assert v < 0


def test_monotonicity_on_corpus():
    # A Positive verdict on a region must not flip to Negative on a subregion.
    oracle = SignOracle()
    for scalar, r0, k0 in CORPUS:
        base = oracle.sign(scalar, quadrant(r0, k0)).verdict
        for dr in (0, 1, 3):
            for dk in (0, 1, 3):
                sub = oracle.sign(scalar, quadrant(r0 + dr, k0 + dk)).verdict
                if base == SignVerdict.POSITIVE:
                    assert sub != SignVerdict.NEGATIVE
                if base == SignVerdict.NEGATIVE:
                    assert sub != SignVerdict.POSITIVE


def test_point_evaluation_certificate():
    oracle = SignOracle()
    res = oracle.point_evaluation(b_symbol(), [{"r": 2, "k": 2}, {"r": 3, "k": 1}])
    assert res.verdict == SignVerdict.POSITIVE
    assert res.certificate["method"] == "PointEvaluation"
    assert res.certificate["grid"][0]["value"] == str(binomial(4, 2))
