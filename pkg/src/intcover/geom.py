"""Symbolic polyhedra over the region-ordered scalar field, and the
vertex/edge coverage criterion for a union of two convex sets.

Vertex enumeration solves every d-subset of constraints exactly (fraction-free
determinants, so coordinate denominators are certified-nonzero determinants
and never introduce spurious poles). Candidates whose feasibility cannot be
refuted are kept: over-approximating the vertex and edge sets only strengthens
the checks, never weakens them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence

from .exactalg import (
    BiPoly,
    BiRatB,
    Const,
    UniPoly,
    UniRat,
    BaseScalar,
    ZERO,
    make_biratb,
    make_unirat,
    normalize,
    scalar_add,
    scalar_is_zero,
    scalar_mul,
    scalar_neg,
    scalar_str,
    scalar_sub,
)
from .linsys import InequalitySystem, LinearForm, eliminate_real, UndeterminedCoefficientSign
from .signcert import QuadB, Region, SignOracle, SignResult, SignVerdict

MAX_DIMENSION = 6


class SignUndetermined(RuntimeError):
    def __init__(self, what: str):
        super().__init__(what)


class Membership(Enum):
    YES = "Yes"
    NO = "No"
    UNDETERMINED = "Undetermined"


class CoverageVerdict(Enum):
    PROVEN = "Proven"
    REFUTED = "Refuted-for-method"
    UNDETERMINED = "Undetermined"


@dataclass(frozen=True)
class Vertex:
    coordinates: tuple[BaseScalar, ...]
    tight_set: frozenset[int]

    def key(self) -> tuple[str, ...]:
        return tuple(scalar_str(c) for c in self.coordinates)


@dataclass(frozen=True)
class Polyhedron:
    system: InequalitySystem

    def __post_init__(self):
        if len(self.system.vars) > MAX_DIMENSION:
            raise ValueError(
                f"dimension {len(self.system.vars)} exceeds cap {MAX_DIMENSION}"
            )

    @property
    def dimension(self) -> int:
        return len(self.system.vars)

    @property
    def constraints(self) -> tuple[LinearForm, ...]:
        return self.system.forms

    @property
    def region(self) -> Region:
        return self.system.region


class Unbounded(RuntimeError):
    pass


# ---------------------------------------------------------------------------
# Exact linear solving (Cramer via fraction-free determinants)
# ---------------------------------------------------------------------------


def bareiss_det(matrix: list[list[BaseScalar]]) -> BaseScalar:
    """Bareiss determinant over the scalar field.

    Divisions are by earlier pivots only; callers put any B-carrying column
    last, which is never pivoted on, so every division has a B-free divisor.
    Entries may carry base-variable denominators; those stay nonvanishing on
    the region, so the resulting determinant has no spurious poles there.
    """
    from .exactalg import scalar_div

    n = len(matrix)
    if n == 0:
        return _one()
    m = [row[:] for row in matrix]
    sign = 1
    prev: BaseScalar = _one()
    for col in range(n - 1):
        pivot = None
        for r_ in range(col, n):
            if not scalar_is_zero(m[r_][col]):
                pivot = r_
                break
        if pivot is None:
            return ZERO
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            sign = -sign
        for r_ in range(col + 1, n):
            for c_ in range(col + 1, n):
                num = scalar_sub(
                    scalar_mul(m[col][col], m[r_][c_]),
                    scalar_mul(m[r_][col], m[col][c_]),
                )
                m[r_][c_] = scalar_div(normalize(num), prev)
            m[r_][col] = ZERO
        prev = m[col][col]
    det = m[n - 1][n - 1]
    return normalize(det if sign == 1 else scalar_neg(det))


def _one() -> BaseScalar:
    from .exactalg import ONE

    return ONE


def solve_square(
    rows: list[LinearForm], dim: int
) -> Optional[tuple[BaseScalar, list[BaseScalar]]]:
    """Solve coeffs . x + const = 0 for a d-subset; returns (det, coords) with
    coords expressed over the common denominator det, or None when singular."""
    a = [[f.coeffs[j] for j in range(dim)] for f in rows]
    det = bareiss_det(a)
    if scalar_is_zero(det):
        return None
    coords = []
    for i in range(dim):
        # replace column i by -const, moved to the last position so Bareiss
        # never pivots on the (possibly B-carrying) column
        cols = [j for j in range(dim) if j != i]
        mat = [[f.coeffs[j] for j in cols] + [normalize(scalar_neg(f.constant))] for f in rows]
        det_i = bareiss_det(mat)
        # moving column i to the end costs (dim - 1 - i) transpositions
        if (dim - 1 - i) % 2 == 1:
            det_i = scalar_neg(det_i)
        coords.append(_ratio(det_i, det))
    return det, coords


def _ratio(num: BaseScalar, den: BaseScalar) -> BaseScalar:
    """num/den for polynomial scalars with den B-free."""
    from .exactalg import scalar_div

    return normalize(scalar_div(num, den))


# ---------------------------------------------------------------------------
# Vertex enumeration
# ---------------------------------------------------------------------------


def vertices(p: Polyhedron, oracle: SignOracle) -> list[Vertex]:
    """Candidate vertices: exact solutions of d-subsets that no constraint
    refutes. The list over-approximates the vertex set at every base value."""
    dim = p.dimension
    forms = p.constraints
    region = p.region
    found: dict[tuple[str, ...], Vertex] = {}
    for subset in itertools.combinations(range(len(forms)), dim):
        rows = [forms[i] for i in subset]
        solved = solve_square(rows, dim)
        if solved is None:
            continue
        det, coords = solved
        det_sign = oracle.sign(det, region).verdict
        if det_sign == SignVerdict.ZERO:
            continue
        if det_sign not in (SignVerdict.POSITIVE, SignVerdict.NEGATIVE):
            raise SignUndetermined(
                f"determinant sign for subset {subset}: {scalar_str(det)}"
            )
        tight = set(subset)
        feasible = True
        for j, f in enumerate(forms):
            if j in subset:
                continue
            value = f.value_at(coords)
            if scalar_is_zero(value):
                tight.add(j)
                continue
            v = oracle.sign(value, region).verdict
            if v == SignVerdict.NEGATIVE:
                feasible = False
                break
        if not feasible:
            continue
        vert = Vertex(tuple(coords), frozenset(tight))
        key = vert.key()
        if key in found:
            found[key] = Vertex(
                found[key].coordinates, found[key].tight_set | vert.tight_set
            )
        else:
            found[key] = vert
    return [found[k] for k in sorted(found)]


# ---------------------------------------------------------------------------
# Boundedness via the recession cone
# ---------------------------------------------------------------------------


@dataclass
class BoundednessResult:
    bounded: bool
    certified: bool
    evidence: dict


def is_bounded(p: Polyhedron, oracle: SignOracle) -> BoundednessResult:
    """True iff the recession system admits only the zero ray, decided by real
    elimination per coordinate."""
    base = p.system
    cone = InequalitySystem(
        base.name + ".cone",
        base.region,
        base.vars,
        tuple(LinearForm(f.coeffs, ZERO) for f in base.forms if not f.is_var_free()),
    )
    evidence: dict = {"per_variable": {}}
    for var in base.vars:
        current = cone
        try:
            for other in reversed([v for v in base.vars if v != var]):
                current = eliminate_real(current, other, oracle)
        except UndeterminedCoefficientSign as e:
            return BoundednessResult(False, False, {"undetermined": str(e)})
        has_upper = False
        has_lower = False
        idx = current.var_index(var)
        for f in current.forms:
            c = f.coeffs[idx]
            if scalar_is_zero(c):
                continue
            v = oracle.sign(c, base.region).verdict
            if v == SignVerdict.POSITIVE:
                has_lower = True
            elif v == SignVerdict.NEGATIVE:
                has_upper = True
        if not (has_upper and has_lower):
            return BoundednessResult(
                False,
                True,
                {"unbounded_direction": var, "per_variable": evidence["per_variable"]},
            )
        evidence["per_variable"][var] = "pinned to zero in the recession cone"
    return BoundednessResult(True, True, evidence)


# ---------------------------------------------------------------------------
# Membership and edge checks
# ---------------------------------------------------------------------------


def point_in(
    c: InequalitySystem, x: Sequence[BaseScalar], oracle: SignOracle
) -> tuple[Membership, list[dict]]:
    """Yes iff every form certified >= 0 at x; No iff some form certified < 0."""
    if len(x) != len(c.vars):
        raise ValueError("dimension mismatch")
    evidence = []
    out = Membership.YES
    for i, f in enumerate(c.forms):
        value = f.value_at(x)
        res = oracle.sign(value, c.region)
        evidence.append({"form": i, "verdict": res.verdict.value})
        if res.verdict == SignVerdict.NEGATIVE:
            return Membership.NO, evidence
        if not res.verdict.at_least_nonneg():
            out = Membership.UNDETERMINED
    return out, evidence


def line_meets_intersection(
    v1: Vertex,
    v2: Vertex,
    c1: InequalitySystem,
    c2: InequalitySystem,
    oracle: SignOracle,
) -> tuple[Membership, dict]:
    """Does the line through v1, v2 meet C1 and C2 simultaneously?

    Restricting an affine form to the line x(t) = v1 + t (v2 - v1) gives
    a*t + b with a = f(v2) - f(v1) and b = f(v1). One-dimensional real
    feasibility is decided by the pairwise cross conditions of the real
    elimination of t; the products are handled by the quadratic sign layer.
    """
    region = c1.region
    arity2 = region.arity == 2
    uppers: list[tuple[BaseScalar, BaseScalar]] = []  # a < 0: (a, b)
    lowers: list[tuple[BaseScalar, BaseScalar]] = []
    evidence: dict = {"restrictions": []}
    for sysname, c in (("c1", c1), ("c2", c2)):
        for i, f in enumerate(c.forms):
            b = f.value_at(v1.coordinates)
            a = normalize(scalar_sub(f.value_at(v2.coordinates), b))
            if scalar_is_zero(a):
                res = oracle.sign(b, region)
                evidence["restrictions"].append(
                    {"system": sysname, "form": i, "constant": res.verdict.value}
                )
                if res.verdict == SignVerdict.NEGATIVE:
                    return Membership.NO, evidence
                if not res.verdict.at_least_nonneg():
                    return Membership.UNDETERMINED, evidence
                continue
            va = oracle.sign(a, region).verdict
            if va == SignVerdict.POSITIVE:
                lowers.append((a, b))
            elif va == SignVerdict.NEGATIVE:
                uppers.append((a, b))
            else:
                return Membership.UNDETERMINED, evidence
    crosses = []
    verdict = Membership.YES
    for au, bu in uppers:
        for al, bl in lowers:
            # feasibility needs al*bu - au*bl >= 0
            if arity2:
                q = QuadB.product(al, bu).sub(QuadB.product(au, bl))
                res = oracle.sign_quad(q, region)
            else:
                value = normalize(
                    scalar_sub(scalar_mul(al, bu), scalar_mul(au, bl))
                )
                res = oracle.sign(value, region)
            crosses.append(res.verdict.value)
            if res.verdict == SignVerdict.NEGATIVE:
                evidence["crosses"] = crosses
                return Membership.NO, evidence
            if not res.verdict.at_least_nonneg():
                verdict = Membership.UNDETERMINED
    evidence["crosses"] = crosses
    return verdict, evidence


# ---------------------------------------------------------------------------
# Two-set coverage
# ---------------------------------------------------------------------------


@dataclass
class CoverageResult:
    verdict: CoverageVerdict
    certificate: dict


def covered_by_two(
    p: Polyhedron,
    c1: InequalitySystem,
    c2: InequalitySystem,
    oracle: SignOracle,
    check_bounded: bool = True,
) -> CoverageResult:
    """Vertex condition plus mixed-edge condition for P subset of C1 union C2.

    Candidate vertices and vertex pairs over-approximate the true vertex and
    edge sets, so Proven is sound for every base value in the region; Refuted
    means the method failed (a check returned No), not that integer coverage
    is false.
    """
    cert: dict = {"polyhedron": p.system.name, "c1": c1.name, "c2": c2.name}
    if check_bounded:
        bd = is_bounded(p, oracle)
        cert["bounded"] = bd.evidence
        if not bd.certified:
            return CoverageResult(CoverageVerdict.UNDETERMINED, cert)
        if not bd.bounded:
            raise Unbounded(f"{p.system.name} is not bounded: {bd.evidence}")
    try:
        verts = vertices(p, oracle)
    except SignUndetermined as e:
        cert["vertices"] = {"undetermined": str(e)}
        return CoverageResult(CoverageVerdict.UNDETERMINED, cert)
    vert_entries = []
    membership: list[tuple[Membership, Membership]] = []
    undetermined = False
    refuted = False
    for v in verts:
        in1, ev1 = point_in(c1, v.coordinates, oracle)
        in2, ev2 = point_in(c2, v.coordinates, oracle)
        membership.append((in1, in2))
        vert_entries.append(
            {
                "coordinates": [scalar_str(c) for c in v.coordinates],
                "tight": sorted(v.tight_set),
                "in_c1": in1.value,
                "in_c2": in2.value,
            }
        )
        if in1 == Membership.NO and in2 == Membership.NO:
            refuted = True
        elif in1 != Membership.YES and in2 != Membership.YES:
            undetermined = True
    cert["vertices"] = vert_entries
    if refuted:
        cert["failure"] = "vertex outside both sets"
        return CoverageResult(CoverageVerdict.REFUTED, cert)
    if undetermined:
        return CoverageResult(CoverageVerdict.UNDETERMINED, cert)
    edge_entries = []
    for i, j in itertools.combinations(range(len(verts)), 2):
        for a, b in ((i, j), (j, i)):
            not_in_1 = membership[a][0] != Membership.YES
            not_in_2 = membership[b][1] != Membership.YES
            if not_in_1 and not_in_2:
                res, ev = line_meets_intersection(
                    verts[a], verts[b], c1, c2, oracle
                )
                edge_entries.append(
                    {"pair": [a, b], "meets_intersection": res.value, "detail": ev}
                )
                if res == Membership.NO:
                    cert["edges"] = edge_entries
                    cert["failure"] = "mixed edge misses the intersection"
                    return CoverageResult(CoverageVerdict.REFUTED, cert)
                if res == Membership.UNDETERMINED:
                    undetermined = True
                break  # the line through {i, j} is checked once
    cert["edges"] = edge_entries
    if undetermined:
        return CoverageResult(CoverageVerdict.UNDETERMINED, cert)
    return CoverageResult(CoverageVerdict.PROVEN, cert)
