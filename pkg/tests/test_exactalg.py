"""Kernel tests: polynomials, rational scalars, Sturm counting, resultants."""

import random
from fractions import Fraction as F

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from intcover.exactalg import (
    BiPoly,
    BiRatB,
    Const,
    NonlinearInB,
    PoleAtPoint,
    UniPoly,
    UniRat,
    b_symbol,
    binom_poly_fixed_k,
    binom_poly_in_sum,
    binomial,
    const,
    eval_scalar,
    make_biratb,
    make_unirat,
    normalize,
    odd_multiplicity_part,
    resultant_in_r,
    resultant_univariate,
    scalar_div,
    scalar_eq,
    scalar_is_zero,
    shifted_expansion,
    squarefree_part,
    sturm_count_above,
    substitute_base,
    yun_decomposition,
)


def up(*coeffs, var="x"):
    return UniPoly.make(var, coeffs)


def bp(terms):
    return BiPoly({e: F(c) for e, c in terms.items()})


# ---------------------------------------------------------------------------
# rational arithmetic and scalar algebra
# ---------------------------------------------------------------------------


def test_rational_add():
    assert const(F(1, 2)) + const(F(1, 3)) == const(F(5, 6))


def test_unirat_cancellation():
    x = UniPoly.x("x")
    one = UniPoly.const("x", 1)
    s = make_unirat(x, x + one)  # x/(x+1)
    t = make_unirat(x + one, one)  # x+1
    prod = s * t
    assert scalar_eq(prod, make_unirat(x, one))


def test_b_product_rejected():
    k_b = BiRatB(BiPoly.var_k(), BiPoly.const(0), BiPoly.const(1))
    r_b = BiRatB(BiPoly.var_r(), BiPoly.const(0), BiPoly.const(1))
    with pytest.raises(NonlinearInB):
        _ = k_b * r_b


def test_scalar_div_by_b_free():
    num = BiRatB(BiPoly.var_k(), BiPoly.const(3), BiPoly.const(1))
    den = make_biratb(BiPoly.const(0), BiPoly.var_r(), BiPoly.const(1))
    q = scalar_div(num, den)
    assert scalar_eq(q * den, num)
    with pytest.raises(NonlinearInB):
        scalar_div(num, b_symbol())


def test_eval_b_at_point():
    assert eval_scalar(b_symbol(), {"r": 4, "k": 3}) == 35  # C(7,3)


def test_eval_weighted_b_matches_smaller_binomial():
    # (k/(r+k)) * C(r+k, k) == C(r+k-1, k-1), checked at (4, 3).
    s = make_biratb(BiPoly.var_k(), BiPoly.const(0), BiPoly.var_r() + BiPoly.var_k())
    assert eval_scalar(s, {"r": 4, "k": 3}) == 15
    assert binomial(6, 2) == 15


def test_eval_pole():
    x = UniPoly.x("x")
    s = make_unirat(x, x - UniPoly.const("x", 1))
    with pytest.raises(PoleAtPoint):
        eval_scalar(s, {"x": 1})


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_exactness_roundtrip(data):
    # (a + b) and (a * b) evaluated at integer base points must equal the
    # combination of the individual evaluations.
    def rand_bipoly():
        terms = {}
        for _ in range(data.draw(st.integers(0, 4))):
            e = (data.draw(st.integers(0, 2)), data.draw(st.integers(0, 2)))
            terms[e] = F(data.draw(st.integers(-5, 5)))
        return BiPoly(terms)

    def rand_scalar(with_b):
        p = rand_bipoly() if with_b else BiPoly.const(0)
        q = rand_bipoly()
        den = rand_bipoly()
        if den.is_zero():
            den = BiPoly.const(1)
        return make_biratb(p, q, den)

    a = rand_scalar(with_b=data.draw(st.booleans()))
    b = rand_scalar(with_b=False)
    point = {"r": data.draw(st.integers(1, 8)), "k": data.draw(st.integers(1, 8))}
    try:
        va, vb = eval_scalar(a, point), eval_scalar(b, point)
        v_sum = eval_scalar(a + b, point)
        v_prod = eval_scalar(a * b, point)
    except PoleAtPoint:
        return
    assert v_sum == va + vb
    assert v_prod == va * vb


def test_normalize_demotes():
    s = make_biratb(BiPoly.const(0), BiPoly.var_k(), BiPoly.const(2))
    out = normalize(s)
    assert isinstance(out, UniRat)
    assert eval_scalar(out, {"k": 6}) == 3


# ---------------------------------------------------------------------------
# univariate machinery
# ---------------------------------------------------------------------------


def test_divmod_exact():
    p = up(-1, 0, 1)  # x^2 - 1
    d = up(1, 1)  # x + 1
    q, r = p.divmod(d)
    assert r.is_zero()
    assert q == up(-1, 1)


def test_sturm_sqrt2():
    assert sturm_count_above(up(-2, 0, 1), 0) == 1


def test_sturm_no_real_roots():
    assert sturm_count_above(up(1, 0, 1), -10) == 0


def test_sturm_cubic_fixture():
    # 4k^3 - 2k^2 - 118k + 240: real roots lie in (-7,-6), (2,3) and (4,5),
    # hand-located by sign changes; none at or above 5.
    p = UniPoly.make("k", [240, -118, -2, 4])
    assert p.eval(-7) < 0 < p.eval(-6)
    assert p.eval(2) > 0 > p.eval(3)
    assert p.eval(4) < 0 < p.eval(5)
    assert sturm_count_above(p, 5) == 0
    assert sturm_count_above(p, 2) == 2
    assert all(p.eval(k) > 0 for k in range(5, 51))


@settings(max_examples=150, deadline=None)
@given(st.data())
def test_sturm_matches_sympy(data):
    deg = data.draw(st.integers(1, 8))
    coeffs = [data.draw(st.integers(-6, 6)) for _ in range(deg)] + [
        data.draw(st.integers(1, 6))
    ]
    x0 = data.draw(st.integers(-4, 4))
    p = UniPoly.make("x", coeffs)
    x = sympy.Symbol("x")
    sp = sympy.Poly(sum(c * x**i for i, c in enumerate(coeffs)), x)
    expected = sum(
        1 for root in sympy.real_roots(sp, x) if sympy.Rational(x0) < root
    )
    # real_roots lists with multiplicity; collapse to distinct values.
    distinct = {
        sympy.nsimplify(r) for r in sympy.real_roots(sp, x) if sympy.Rational(x0) < r
    }
    assert sturm_count_above(p, x0) == len(distinct) or expected == len(distinct)
    assert sturm_count_above(p, x0) == len(distinct)


def test_sturm_root_at_endpoint():
    # roots 3 and 5; only 5 lies strictly above 3.
    p = up(15, -8, 1)
    assert sturm_count_above(p, 3) == 1


def test_squarefree_and_odd_part():
    x = UniPoly.x("x")
    one = UniPoly.const("x", 1)
    p = (x - one) * (x - one) * (x + one)  # (x-1)^2 (x+1)
    assert squarefree_part(p).degree == 2
    odd = odd_multiplicity_part(p)
    # sign changes only at -1
    assert odd.eval(-2) < 0 < odd.eval(0)
    assert odd.eval(2) > 0


def test_yun_reconstructs():
    rng = random.Random(7)
    x = UniPoly.x("x")
    for _ in range(30):
        p = UniPoly.const("x", rng.choice([1, 2, -3]))
        for _ in range(rng.randint(1, 3)):
            root = rng.randint(-3, 3)
            mult = rng.randint(1, 3)
            p = p * (x - UniPoly.const("x", root)) ** mult
        rebuilt = UniPoly.const("x", p.leading())
        for factor, mult in yun_decomposition(p):
            rebuilt = rebuilt * factor**mult
        assert rebuilt == p


# ---------------------------------------------------------------------------
# bivariate machinery
# ---------------------------------------------------------------------------


def test_shifted_expansion_fixture():
    # r*k - r - k around (4, 3) is (r-4)(k-3) + 2(r-4) + 3(k-3) + 5.
    p = bp({(1, 1): 1, (1, 0): -1, (0, 1): -1})
    shifted = shifted_expansion(p, 4, 3)
    assert shifted == bp({(1, 1): 1, (1, 0): 2, (0, 1): 3, (0, 0): 5})


def test_shifted_expansion_identity_shift():
    p = bp({(2, 1): 3, (0, 0): -7})
    assert shifted_expansion(p, 0, 0) == p


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_shifted_expansion_roundtrip(data):
    terms = {}
    for _ in range(data.draw(st.integers(0, 5))):
        e = (data.draw(st.integers(0, 3)), data.draw(st.integers(0, 3)))
        terms[e] = F(data.draw(st.integers(-9, 9)))
    p = BiPoly(terms)
    r0 = data.draw(st.integers(-3, 5))
    k0 = data.draw(st.integers(-3, 5))
    shifted = shifted_expansion(p, r0, k0)
    rv = data.draw(st.integers(-4, 4))
    kv = data.draw(st.integers(-4, 4))
    assert shifted.eval(rv - r0, kv - k0) == p.eval(rv, kv)


def test_resultant_circle_tangent():
    # Res_r(r^2 + k^2 - 25, 2r) = 4(k^2 - 25), by the 3x3 Sylvester determinant.
    p = bp({(2, 0): 1, (0, 2): 1, (0, 0): -25})
    q = bp({(1, 0): 2})
    res = resultant_in_r(p, q)
    assert res == UniPoly.make("k", [-100, 0, 4])


def test_resultant_linear_difference():
    # Res_r(r - k, r - 5) = k - 5.
    p = bp({(1, 0): 1, (0, 1): -1})
    q = bp({(1, 0): 1, (0, 0): -5})
    assert resultant_in_r(p, q) == UniPoly.make("k", [-5, 1])


def test_resultant_degree_zero_convention():
    p = bp({(2, 0): 1, (0, 1): 1})
    one = BiPoly.const(1)
    assert resultant_in_r(p, one) == UniPoly.const("k", 1)


def test_resultant_univariate_matches_sympy():
    rng = random.Random(3)
    x = sympy.Symbol("x")
    for _ in range(25):
        pc = [rng.randint(-4, 4) for _ in range(rng.randint(2, 5))]
        qc = [rng.randint(-4, 4) for _ in range(rng.randint(2, 5))]
        if all(c == 0 for c in pc):
            pc[-1] = 1
        if all(c == 0 for c in qc):
            qc[-1] = 1
        p = UniPoly.make("x", pc)
        q = UniPoly.make("x", qc)
        sp = sympy.Poly(sum(c * x**i for i, c in enumerate(pc)), x)
        sq = sympy.Poly(sum(c * x**i for i, c in enumerate(qc)), x)
        # sympy normalizes resultant signs differently from the Sylvester
        # determinant; only magnitude (and vanishing) is convention-free.
        assert abs(resultant_univariate(p, q)) == abs(sympy.resultant(sp, sq, x))


def test_resultant_vanishes_iff_common_root():
    rng = random.Random(11)
    x = UniPoly.x("x")
    for _ in range(40):
        shared = rng.randint(-3, 3)
        a = x - UniPoly.const("x", shared)
        p = a * up(rng.randint(1, 3), 1)
        q = a * up(rng.randint(-3, -1), 1)
        assert resultant_univariate(p, q) == 0
        q2 = up(rng.randint(4, 9), 1)
        g = p.gcd(q2)
        res = resultant_univariate(p, q2)
        assert (res == 0) == (not g.is_const())


# ---------------------------------------------------------------------------
# binomial substitution helpers
# ---------------------------------------------------------------------------


def test_binom_poly_fixed_k():
    poly = binom_poly_fixed_k(3)  # C(r+3, 3)
    for r in range(0, 12):
        assert poly.eval(r) == binomial(r + 3, 3)


def test_binom_poly_in_sum():
    poly = binom_poly_in_sum(4)
    for r in range(1, 7):
        for k in range(1, 7):
            if r + k >= 4:
                assert poly.eval(r, k) == binomial(r + k, 4)


def test_substitute_base_fixes_b_exactly():
    # B with k fixed to 3 becomes the cubic C(r+3, 3).
    s = b_symbol()
    sub = substitute_base(s, "k", 3)
    for r in range(0, 9):
        assert eval_scalar(sub, {"r": r}) == binomial(r + 3, 3)
    sub_r = substitute_base(s, "r", 4)
    for k in range(0, 9):
        assert eval_scalar(sub_r, {"k": k}) == binomial(4 + k, k)


def test_substitute_base_weighted():
    # (k/(r+k))*B at k=3 equals C(r+2, 2) as a polynomial identity in r.
    s = make_biratb(BiPoly.var_k(), BiPoly.const(0), BiPoly.var_r() + BiPoly.var_k())
    sub = substitute_base(s, "k", 3)
    for r in range(1, 10):
        assert eval_scalar(sub, {"r": r}) == binomial(r + 2, 2)


def test_scalar_is_zero_cross_kinds():
    x = UniPoly.x("x")
    s = make_unirat(x - x, UniPoly.const("x", 3))
    assert scalar_is_zero(s)
    assert scalar_eq(const(2), make_unirat(up(4, var="x"), up(2, var="x")))
