"""Polyhedron tests: vertex enumeration, boundedness, membership, coverage."""

import itertools
import random
from fractions import Fraction as F

import pytest

from intcover.exactalg import Const, const, eval_scalar, scalar_str
from intcover.geom import (
    CoverageVerdict,
    Membership,
    Polyhedron,
    Unbounded,
    bareiss_det,
    covered_by_two,
    is_bounded,
    line_meets_intersection,
    point_in,
    vertices,
)
from intcover.linsys import InequalitySystem, LinearForm, parse_file, parse_system
from intcover.signcert import SignOracle, point_region

WORKED = """
base r >= 3
system X:
  vars d g;
  g - d >= 0;
  r - g >= 0;
system Y:
  vars d g h;
  g - 3 >= 0;
  d - g >= 0;
  h - d >= 0;
  r^2 - h >= 0;
system Z:
  vars d;
  d >= 0;
  r^2 - d >= 0;
system C1:
  vars d;
  r - d >= 0;
system C2:
  vars d;
  d - 3 >= 0;
  r^2 - d >= 0;
"""


@pytest.fixture
def oracle():
    return SignOracle()


@pytest.fixture
def worked():
    return parse_file(WORKED)


def mk_poly(text, name=None):
    return Polyhedron(parse_system(text, name))


# ---------------------------------------------------------------------------
# determinants and solving
# ---------------------------------------------------------------------------


def test_bareiss_det_rational():
    m = [[const(2), const(1)], [const(5), const(3)]]
    assert bareiss_det(m) == const(1)
    m = [[const(1), const(2)], [const(2), const(4)]]
    assert bareiss_det(m) == const(0)


def test_bareiss_det_symbolic(worked, oracle):
    # det [[r, 1], [1, r]] = r^2 - 1
    X = worked.systems["X"]
    r = X.forms[1].constant  # the scalar r
    m = [[r, const(1)], [const(1), r]]
    det = bareiss_det(m)
    assert eval_scalar(det, {"r": 5}) == 24


# ---------------------------------------------------------------------------
# vertices
# ---------------------------------------------------------------------------


def test_vertices_interval(worked, oracle):
    Z = Polyhedron(worked.systems["Z"])
    verts = vertices(Z, oracle)
    values = sorted(eval_scalar(v.coordinates[0], {"r": 3}) for v in verts)
    assert values == [0, 9]  # d = 0 and d = r^2


def test_vertices_unit_square(oracle):
    sq = mk_poly(
        "system S:\n  vars x y;\n  x >= 0;\n  y >= 0;\n  1 - x >= 0;\n  1 - y >= 0;\n"
    )
    verts = vertices(sq, oracle)
    pts = sorted(tuple(c.value for c in v.coordinates) for v in verts)
    assert pts == [(0, 0), (0, 1), (1, 0), (1, 1)]


def test_vertices_empty(oracle):
    empty = mk_poly("system S:\n  vars x;\n  x >= 0;\n  -1 - x >= 0;\n")
    assert vertices(empty, oracle) == []


def test_degenerate_vertex_merged_tight_set(oracle):
    tri = mk_poly(
        "system S:\n  vars x y;\n  x >= 0;\n  y >= 0;\n  x + y >= 0;\n  2 - x - y >= 0;\n"
    )
    verts = vertices(tri, oracle)
    origin = [v for v in verts if all(c.value == 0 for c in v.coordinates)]
    assert len(origin) == 1
    assert origin[0].tight_set == frozenset({0, 1, 2})


def test_vertices_match_brute_force_at_fixed_bases(oracle):
    # independent oracle: exhaustive subset solving in plain Fractions
    rng = random.Random(5)
    for _ in range(20):
        nvars = rng.randint(1, 3)
        names = tuple("xyz"[:nvars])
        forms = [
            LinearForm(
                tuple(const(rng.randint(-3, 3)) for _ in range(nvars)),
                const(rng.randint(0, 6)),
            )
            for _ in range(nvars + rng.randint(1, 3))
        ]
        # box the polytope so it is bounded
        for i in range(nvars):
            forms.append(
                LinearForm(
                    tuple(const(1 if j == i else 0) for j in range(nvars)), const(5)
                )
            )
            forms.append(
                LinearForm(
                    tuple(const(-1 if j == i else 0) for j in range(nvars)), const(5)
                )
            )
        sys = InequalitySystem("S", point_region(), names, tuple(forms))
        got = {
            tuple(c.value for c in v.coordinates)
            for v in vertices(Polyhedron(sys), oracle)
        }
        expected = set()
        rows = [(tuple(c.value for c in f.coeffs), f.constant.value) for f in forms]
        for subset in itertools.combinations(range(len(rows)), nvars):
            sol = _solve_fractions([rows[i] for i in subset], nvars)
            if sol is None:
                continue
            if all(
                sum(c * x for c, x in zip(coeffs, sol)) + c0 >= 0
                for coeffs, c0 in rows
            ):
                expected.add(tuple(sol))
        # candidates may be a superset only through undetermined feasibility,
        # which cannot happen over plain rationals
        assert got == expected


def _solve_fractions(rows, n):
    import copy

    a = [[F(c) for c in coeffs] + [F(-c0)] for coeffs, c0 in rows]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        a[col], a[piv] = a[piv], a[col]
        for r in range(n):
            if r != col and a[r][col] != 0:
                f = a[r][col] / a[col][col]
                for c in range(col, n + 1):
                    a[r][c] -= f * a[col][c]
    try:
        return [a[i][n] / a[i][i] for i in range(n)]
    except ZeroDivisionError:
        return None


# ---------------------------------------------------------------------------
# boundedness
# ---------------------------------------------------------------------------


def test_interval_bounded(worked, oracle):
    assert is_bounded(Polyhedron(worked.systems["Z"]), oracle).bounded


def test_halfline_unbounded(oracle):
    p = mk_poly("system S:\n  vars d;\n  d >= 0;\n")
    res = is_bounded(p, oracle)
    assert res.certified and not res.bounded
    assert res.evidence["unbounded_direction"] == "d"


def test_symbolic_coefficient_bounded(oracle):
    p = mk_poly(
        "base r >= 3\nsystem S:\n  vars d;\n  d >= 0;\n  r^2 - d >= 0;\n"
    )
    assert is_bounded(p, oracle).bounded


# ---------------------------------------------------------------------------
# membership and lines
# ---------------------------------------------------------------------------


def test_point_in_symbolic(worked, oracle):
    C1 = worked.systems["C1"]
    Z = Polyhedron(worked.systems["Z"])
    verts = vertices(Z, oracle)
    by_val = {eval_scalar(v.coordinates[0], {"r": 3}): v for v in verts}
    v0, vr2 = by_val[0], by_val[9]
    assert point_in(C1, v0.coordinates, oracle)[0] == Membership.YES
    # r - r^2 < 0 for r >= 3
    assert point_in(C1, vr2.coordinates, oracle)[0] == Membership.NO


def test_point_in_full_space(oracle):
    full = parse_system("system F:\n  vars d;\n")
    assert point_in(full, (const(0),), oracle)[0] == Membership.YES


def test_line_meets_intersection(worked, oracle):
    C1, C2 = worked.systems["C1"], worked.systems["C2"]
    Z = Polyhedron(worked.systems["Z"])
    verts = vertices(Z, oracle)
    res, _ = line_meets_intersection(verts[0], verts[1], C1, C2, oracle)
    assert res == Membership.YES  # 3 <= d <= r nonempty for r >= 3


def test_line_misses_intersection_at_fixed_base(oracle):
    parsed = parse_file(WORKED.replace("base r >= 3", "base r >= 2"))
    for name in ("Z", "C1", "C2"):
        pass
    Z2 = Polyhedron(parsed.systems["Z"].substitute_base("r", 2))
    C1 = parsed.systems["C1"].substitute_base("r", 2)
    C2 = parsed.systems["C2"].substitute_base("r", 2)
    verts = vertices(Z2, SignOracle())
    res, _ = line_meets_intersection(verts[0], verts[1], C1, C2, SignOracle())
    assert res == Membership.NO  # needs d <= 2 and d >= 3


def test_line_full_spaces(oracle):
    full = parse_system("system F:\n  vars d;\n")
    Z = mk_poly("system Z:\n  vars d;\n  d >= 0;\n  4 - d >= 0;\n")
    verts = vertices(Z, oracle)
    res, _ = line_meets_intersection(verts[0], verts[1], full, full, oracle)
    assert res == Membership.YES


# ---------------------------------------------------------------------------
# coverage
# ---------------------------------------------------------------------------


def test_coverage_worked_example_symbolic(worked, oracle):
    Z = Polyhedron(worked.systems["Z"])
    res = covered_by_two(Z, worked.systems["C1"], worked.systems["C2"], oracle)
    assert res.verdict == CoverageVerdict.PROVEN
    assert res.certificate["edges"]


def test_coverage_fails_at_r2(oracle):
    parsed = parse_file(WORKED.replace("base r >= 3", "base r >= 2"))
    Z = Polyhedron(parsed.systems["Z"].substitute_base("r", 2))
    C1 = parsed.systems["C1"].substitute_base("r", 2)
    C2 = parsed.systems["C2"].substitute_base("r", 2)
    res = covered_by_two(Z, C1, C2, SignOracle())
    assert res.verdict == CoverageVerdict.REFUTED


def test_coverage_empty_polyhedron(oracle):
    empty = mk_poly("system S:\n  vars x;\n  x >= 0;\n  -1 - x >= 0;\n")
    full = parse_system("system F:\n  vars x;\n")
    res = covered_by_two(empty, full, full, oracle)
    assert res.verdict == CoverageVerdict.PROVEN


def test_coverage_unbounded_raises(oracle):
    p = mk_poly("system S:\n  vars x;\n  x >= 0;\n")
    full = parse_system("system F:\n  vars x;\n")
    with pytest.raises(Unbounded):
        covered_by_two(p, full, full, oracle)


def test_coverage_invariant_under_reordering_and_scaling(worked, oracle):
    Z = worked.systems["Z"]
    C1, C2 = worked.systems["C1"], worked.systems["C2"]
    base = covered_by_two(Polyhedron(Z), C1, C2, oracle).verdict
    reordered = Z.with_forms(tuple(reversed(Z.forms)))
    scaled = Z.with_forms(tuple(f.scale(const(3)) for f in Z.forms))
    assert covered_by_two(Polyhedron(reordered), C1, C2, SignOracle()).verdict == base
    assert covered_by_two(Polyhedron(scaled), C1, C2, SignOracle()).verdict == base


def test_coverage_sampled_grid(worked):
    # Proven at symbolic level implies coverage of a fine rational grid at
    # sampled bases.
    oracle = SignOracle()
    Z = worked.systems["Z"]
    C1, C2 = worked.systems["C1"], worked.systems["C2"]
    res = covered_by_two(Polyhedron(Z), C1, C2, oracle)
    assert res.verdict == CoverageVerdict.PROVEN
    for rv in (3, 5, 9):
        zf = Z.fix_base({"r": rv})
        c1f = C1.fix_base({"r": rv})
        c2f = C2.fix_base({"r": rv})
        for num in range(0, 4 * rv * rv + 1):
            d = F(num, 4)
            if zf.satisfies([d]):
                assert c1f.satisfies([d]) or c2f.satisfies([d])
