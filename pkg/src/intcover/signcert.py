"""Sign certificates for exact scalars over half-line and quadrant regions.

The central entry point is :meth:`SignOracle.sign`, which decides the sign of
a scalar over a region ``{x >= x0}`` / ``{r >= r0, k >= k0}`` / a point, and
returns a verdict together with replayable evidence. ``UNKNOWN`` is always a
legal answer; every other verdict is sound for every integer point of the
region (in fact for every real point, except where the strip decomposition
quantifies over integer k only).

Strategy chain for a bivariate scalar (p*B + q)/den:

1. exact constants;
2. univariate reduction + Sturm analysis;
3. substitution of a valid lower bound for B when the sign of p is certified
   (sound upward when p >= 0, downward when p <= 0);
4. all-nonnegative shifted expansion at the region corner;
5. the five-condition Newton-polygon test;
6. strip decomposition on k: exact binomial substitution on finitely many
   strips plus a recursive tail certificate with a raised lower bound.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from fractions import Fraction as Rat
from typing import Optional

from .exactalg import (
    BASE_PAIR,
    BiPoly,
    BiRatB,
    Const,
    UniPoly,
    UniRat,
    BaseScalar,
    binom_poly_in_sum,
    bipoly_str,
    eval_scalar,
    normalize,
    odd_multiplicity_part,
    resultant_in_r,
    scalar_str,
    shifted_expansion,
    squarefree_part,
    sturm_count_above,
    substitute_base,
    unipoly_str,
)


class SignVerdict(enum.Enum):
    POSITIVE = "Positive"
    NONNEGATIVE = "Nonnegative"
    ZERO = "Zero"
    NONPOSITIVE = "Nonpositive"
    NEGATIVE = "Negative"
    UNKNOWN = "Unknown"

    def at_least_nonneg(self) -> bool:
        return self in (SignVerdict.POSITIVE, SignVerdict.NONNEGATIVE, SignVerdict.ZERO)

    def at_most_nonpos(self) -> bool:
        return self in (SignVerdict.NEGATIVE, SignVerdict.NONPOSITIVE, SignVerdict.ZERO)

    def negate(self) -> "SignVerdict":
        return _NEGATE[self]

    def __mul__(self, other: "SignVerdict") -> "SignVerdict":
        """Sign of a product, given the signs of the factors."""
        if SignVerdict.ZERO in (self, other):
            return SignVerdict.ZERO
        if SignVerdict.UNKNOWN in (self, other):
            return SignVerdict.UNKNOWN
        strict = {SignVerdict.POSITIVE, SignVerdict.NEGATIVE}
        neg = (self in (SignVerdict.NEGATIVE, SignVerdict.NONPOSITIVE)) != (
            other in (SignVerdict.NEGATIVE, SignVerdict.NONPOSITIVE)
        )
        if self in strict and other in strict:
            return SignVerdict.NEGATIVE if neg else SignVerdict.POSITIVE
        return SignVerdict.NONPOSITIVE if neg else SignVerdict.NONNEGATIVE


_NEGATE = {
    SignVerdict.POSITIVE: SignVerdict.NEGATIVE,
    SignVerdict.NONNEGATIVE: SignVerdict.NONPOSITIVE,
    SignVerdict.ZERO: SignVerdict.ZERO,
    SignVerdict.NONPOSITIVE: SignVerdict.NONNEGATIVE,
    SignVerdict.NEGATIVE: SignVerdict.POSITIVE,
    SignVerdict.UNKNOWN: SignVerdict.UNKNOWN,
}


def _meet(a: SignVerdict, b: SignVerdict) -> SignVerdict:
    """Strongest verdict implied by both (e.g. Positive meet Zero = Nonnegative)."""
    if a == b:
        return a
    if SignVerdict.UNKNOWN in (a, b):
        return SignVerdict.UNKNOWN
    if a.at_least_nonneg() and b.at_least_nonneg():
        return SignVerdict.NONNEGATIVE
    if a.at_most_nonpos() and b.at_most_nonpos():
        return SignVerdict.NONPOSITIVE
    return SignVerdict.UNKNOWN


@dataclass(frozen=True)
class BBound:
    """A registered lower bound for B: valid on {r >= min_r, k >= min_k}."""

    name: str
    min_r: int
    min_k: int
    bound: BiPoly


def default_b_bounds() -> tuple[BBound, ...]:
    # C(r+k, m) <= C(r+k, k) whenever m <= k and m <= r, by unimodality of the
    # binomial row. Registered for m = 2, 3, 4; m = 3, 4 carry the arguments
    # used with bounds binom(r+k,3) and binom(r+k,4).
    return tuple(
        BBound(f"binom(r+k,{m})", m, m, binom_poly_in_sum(m)) for m in (2, 3, 4)
    )


@dataclass(frozen=True)
class Region:
    """Lower-bounded box for the base variables, plus registered B bounds."""

    names: tuple[str, ...]
    lower: tuple[int, ...]
    b_bounds: tuple[BBound, ...] = ()

    def __post_init__(self):
        if len(self.names) != len(self.lower):
            raise ValueError("names and lower bounds must have equal length")
        if self.arity == 2 and not self.b_bounds:
            object.__setattr__(self, "b_bounds", default_b_bounds())

    @property
    def arity(self) -> int:
        return len(self.names)

    def bound_of(self, name: str) -> int:
        return self.lower[self.names.index(name)]

    def raise_bound(self, name: str, value: int) -> "Region":
        lower = tuple(
            value if n == name else b for n, b in zip(self.names, self.lower)
        )
        return Region(self.names, lower, self.b_bounds)

    def drop(self, name: str) -> "Region":
        keep = [(n, b) for n, b in zip(self.names, self.lower) if n != name]
        return Region(
            tuple(n for n, _ in keep), tuple(b for _, b in keep), self.b_bounds
        )

    def valid_b_bounds(self) -> list[BBound]:
        if self.arity != 2:
            return []
        r0, k0 = self.lower
        return [b for b in self.b_bounds if r0 >= b.min_r and k0 >= b.min_k]

    def key(self) -> tuple:
        return (self.names, self.lower, tuple(b.name for b in self.b_bounds))

    def to_json(self) -> dict:
        return {"names": list(self.names), "lower": list(self.lower)}

    def __str__(self) -> str:
        return ", ".join(f"{n} >= {b}" for n, b in zip(self.names, self.lower)) or "()"


def point_region() -> Region:
    return Region((), ())


def half_line(name: str, lo: int) -> Region:
    return Region((name,), (lo,))


def quadrant(r0: int, k0: int, extra_bounds: tuple[BBound, ...] = ()) -> Region:
    return Region(BASE_PAIR, (r0, k0), default_b_bounds() + extra_bounds)


# ---------------------------------------------------------------------------
# Certificates
# ---------------------------------------------------------------------------
#
# A certificate is a JSON-ready dict: {"method": ..., **evidence}. The methods
# are ExactConstant, SturmBoundary, ShiftedExpansion, NewtonPolygon,
# BSubstitution, StripSplit and PointEvaluation, plus the Ratio wrapper used
# to compose a numerator verdict with a denominator verdict.


@dataclass
class SignResult:
    verdict: SignVerdict
    certificate: Optional[dict]

    def to_json(self, scalar: BaseScalar, region: Region) -> dict:
        return {
            "scalar": scalar_str(scalar),
            "region": region.to_json(),
            "verdict": self.verdict.value,
            "method": self.certificate["method"] if self.certificate else None,
            "evidence": self.certificate,
        }


UNKNOWN = SignResult(SignVerdict.UNKNOWN, None)


def _const_result(value: Rat) -> SignResult:
    if value > 0:
        v = SignVerdict.POSITIVE
    elif value < 0:
        v = SignVerdict.NEGATIVE
    else:
        v = SignVerdict.ZERO
    return SignResult(v, {"method": "ExactConstant", "value": str(value)})


def sign_const(value: Rat) -> SignResult:
    """Exact sign of a rational constant; never Unknown."""
    return _const_result(value)


def _unipoly_halfline_sign(p: UniPoly, x0: int) -> SignResult:
    """Sign of a polynomial on the closed half-line [x0, oo)."""
    if p.is_zero():
        return SignResult(SignVerdict.ZERO, {"method": "ExactConstant", "value": "0"})
    if p.is_const():
        return _const_result(p.const_value())
    val0 = p.eval(x0)
    odd = odd_multiplicity_part(p)
    changes_above = 0 if odd.is_const() else sturm_count_above(odd, x0)
    if changes_above > 0:
        return UNKNOWN
    # No sign change above x0: the sign there matches the leading behaviour.
    sigma = 1 if odd.leading() > 0 else -1
    zeros_above = sturm_count_above(squarefree_part(p), x0)
    evidence = {
        "method": "SturmBoundary",
        "poly": unipoly_str(p),
        "x0": x0,
        "value_at_x0": str(val0),
        "odd_part": unipoly_str(odd),
        "sign_changes_above": changes_above,
        "zeros_above": zeros_above,
        "leading_sign": sigma,
    }
    if sigma > 0:
        if val0 > 0 and zeros_above == 0:
            return SignResult(SignVerdict.POSITIVE, evidence)
        if val0 >= 0:
            return SignResult(SignVerdict.NONNEGATIVE, evidence)
        return UNKNOWN
    if val0 < 0 and zeros_above == 0:
        return SignResult(SignVerdict.NEGATIVE, evidence)
    if val0 <= 0:
        return SignResult(SignVerdict.NONPOSITIVE, evidence)
    return UNKNOWN


def _shifted_expansion_sign(p: BiPoly, r0: int, k0: int) -> SignResult:
    """All-nonnegative (or all-nonpositive) re-expansion at the region corner."""
    shifted = shifted_expansion(p, r0, k0) if (r0, k0) != (0, 0) else p
    coeffs = shifted.terms
    if not coeffs:
        return SignResult(SignVerdict.ZERO, {"method": "ExactConstant", "value": "0"})
    table = {f"{e[0]},{e[1]}": str(c) for e, c in sorted(coeffs.items())}
    if all(c >= 0 for c in coeffs.values()):
        const_term = coeffs.get((0, 0), Rat(0))
        verdict = SignVerdict.POSITIVE if const_term > 0 else SignVerdict.NONNEGATIVE
        return SignResult(
            verdict,
            {
                "method": "ShiftedExpansion",
                "shift": [r0, k0],
                "coefficients": table,
            },
        )
    if all(c <= 0 for c in coeffs.values()):
        const_term = coeffs.get((0, 0), Rat(0))
        verdict = SignVerdict.NEGATIVE if const_term < 0 else SignVerdict.NONPOSITIVE
        return SignResult(
            verdict,
            {
                "method": "ShiftedExpansion",
                "shift": [r0, k0],
                "coefficients": table,
                "negated": True,
            },
        )
    return UNKNOWN


# -- Newton polygon ----------------------------------------------------------


def _convex_hull(points: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Monotone-chain convex hull, counter-clockwise, no collinear vertices."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return pts

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower: list[tuple[int, int]] = []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    upper: list[tuple[int, int]] = []
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return lower[:-1] + upper[:-1]


def _dominating_monomials(support: list[tuple[int, int]]) -> list[tuple[int, int]]:
    """Support points that can dominate as r, k -> oo.

    These are the monomials maximizing <(a, b), (u, v)> for some direction with
    u, v > 0: the north-east chain of the Newton polygon, including every
    monomial lying on a hull edge whose outward normal is strictly positive.
    """
    if not support:
        return []
    if len(support) == 1:
        return list(support)
    out: set[tuple[int, int]] = set()
    # A point s dominates for direction (u, v) > 0 iff it maximizes
    # a*u + b*v over the support. Candidate corner directions come from pairs;
    # checking the finitely many edge slopes of the upper-right frontier is
    # equivalent to scanning all positive rational slopes between consecutive
    # support extremes. Enumerating per-point suffices at our sizes.
    slopes: set[Rat] = {Rat(1)}
    for (a1, b1) in support:
        for (a2, b2) in support:
            da, db = a1 - a2, b1 - b2
            if da != 0 and db != 0 and (da > 0) != (db > 0):
                slopes.add(Rat(abs(db), abs(da)))
    probe: list[tuple[Rat, Rat]] = []
    for s in slopes:
        probe.append((s, Rat(1)))
    # Midpoints between consecutive slopes catch vertices whose normal cone
    # lies strictly between two edge normals.
    ordered = sorted(s for s, _ in probe)
    for s1, s2 in zip(ordered, ordered[1:]):
        probe.append(((s1 + s2) / 2, Rat(1)))
    probe.append((ordered[0] / 2, Rat(1)))
    probe.append((ordered[-1] * 2, Rat(1)))
    for u, v in probe:
        best = max(a * u + b * v for a, b in support)
        for a, b in support:
            if a * u + b * v == best:
                out.add((a, b))
    return sorted(out)


@dataclass
class NewtonChecker:
    """Five-condition positivity test for a bivariate polynomial on a quadrant.

    The branch-point condition needs a resultant whose cost grows fast with
    the degree; above ``max_total_degree`` the test abstains and leaves the
    query to the strip decomposition (a completeness cap, never a soundness
    one).
    """

    max_total_degree: int = 12

    def __post_init__(self):
        self._res_cache: dict[BiPoly, UniPoly] = {}

    def _resultant(self, p: BiPoly, dp: BiPoly) -> UniPoly:
        hit = self._res_cache.get(p)
        if hit is None:
            hit = resultant_in_r(p, dp)
            self._res_cache[p] = hit
        return hit

    def check(self, p: BiPoly, r0: int, k0: int) -> SignResult:
        if p.is_zero():
            return UNKNOWN
        if p.deg_r() + p.deg_k() > self.max_total_degree:
            return UNKNOWN
        if p.is_const():
            c = p.const_value()
            if c > 0:
                return SignResult(
                    SignVerdict.POSITIVE,
                    {"method": "NewtonPolygon", "constant": str(c)},
                )
            return UNKNOWN
        evidence: dict = {"method": "NewtonPolygon", "r0": r0, "k0": k0}
        # Condition 1: dominating monomials all positive.
        dom = _dominating_monomials(p.support())
        if any(p.terms[e] <= 0 for e in dom):
            return UNKNOWN
        evidence["dominating"] = [
            {"exponent": list(e), "coefficient": str(p.terms[e])} for e in dom
        ]
        # Condition 2: leading coefficient in r positive for k >= k0.
        deg_r = p.deg_r()
        if deg_r > 0:
            lead_r = p.lead_coeff_r()
            res2 = _unipoly_halfline_sign(lead_r, k0)
            if res2.verdict != SignVerdict.POSITIVE:
                return UNKNOWN
            evidence["lead_r"] = res2.certificate
        # Condition 3: leading coefficient in k positive for r >= r0.
        deg_k = p.deg_k()
        if deg_k > 0:
            lead_k = p.lead_coeff_k()
            res3 = _unipoly_halfline_sign(lead_k, r0)
            if res3.verdict != SignVerdict.POSITIVE:
                return UNKNOWN
            evidence["lead_k"] = res3.certificate
        # Condition 4: boundary slice P(r0, k) positive for k >= k0.
        boundary = p.subst_r(r0)
        res4 = _unipoly_halfline_sign(boundary, k0)
        if res4.verdict != SignVerdict.POSITIVE:
            return UNKNOWN
        evidence["boundary"] = res4.certificate
        # Condition 5: k0 exceeds every branch point of the projection to the
        # k-axis: no real root of Res_r(P, dP/dr), nor of the leading
        # coefficient in r (degree-drop locus), lies at or above k0.
        if deg_r > 0:
            dp = p.derivative_r()
            if dp.is_zero():
                return UNKNOWN
            res_poly = self._resultant(p, dp)
            if res_poly.is_zero():
                return UNKNOWN
            if res_poly.eval(k0) == 0 or (
                not res_poly.is_const() and sturm_count_above(res_poly, k0) > 0
            ):
                return UNKNOWN
            lead_r = p.lead_coeff_r()
            if lead_r.eval(k0) == 0 or (
                not lead_r.is_const() and sturm_count_above(lead_r, k0) > 0
            ):
                return UNKNOWN
            evidence["branch"] = {
                "discriminant_resultant": unipoly_str(res_poly),
                "value_at_k0": str(res_poly.eval(k0)),
                "roots_at_or_above_k0": 0,
            }
        return SignResult(SignVerdict.POSITIVE, evidence)


# ---------------------------------------------------------------------------
# The oracle
# ---------------------------------------------------------------------------


@dataclass
class SignOracle:
    """Caching sign decider; certificates for non-Unknown verdicts are stored.

    ``strip_cap`` bounds how far the strip decomposition may push the split
    point past the region corner.
    """

    strip_cap: int = 64
    newton: NewtonChecker = field(default_factory=NewtonChecker)

    def __post_init__(self):
        self._cache: dict = {}
        self.listeners: list = []

    # -- public API -----------------------------------------------------------

    def sign(self, scalar: BaseScalar, region: Region) -> SignResult:
        scalar = normalize(scalar)
        key = (scalar, region.key())
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        res = self._sign_uncached(scalar, region, allow_strips=True)
        self._cache[key] = res
        if res.verdict != SignVerdict.UNKNOWN:
            for listener in self.listeners:
                listener(res.to_json(scalar, region))
        return res

    def sign_nonneg(self, scalar: BaseScalar, region: Region) -> bool:
        return self.sign(scalar, region).verdict.at_least_nonneg()

    def sign_quad(self, q: "QuadB", region: Region) -> SignResult:
        """Sign of (alpha*B^2 + beta*B + gamma)/den over an arity-2 region."""
        q = q.reduced()
        key = (q.alpha, q.beta, q.gamma, q.den, region.key())
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        den_res = self.bipoly_sign(q.den, region)
        if den_res.verdict not in (SignVerdict.POSITIVE, SignVerdict.NEGATIVE):
            res = UNKNOWN
        else:
            num_res = _sign_quad_core(self, q, region, allow_strips=True)
            if num_res.verdict == SignVerdict.UNKNOWN:
                res = UNKNOWN
            else:
                res = SignResult(
                    num_res.verdict * den_res.verdict,
                    {
                        "method": "Ratio",
                        "num": num_res.certificate,
                        "den": den_res.certificate,
                    },
                )
        self._cache[key] = res
        return res

    # -- dispatch --------------------------------------------------------------

    def _sign_uncached(
        self, scalar: BaseScalar, region: Region, allow_strips: bool
    ) -> SignResult:
        if isinstance(scalar, Const):
            return sign_const(scalar.value)
        if isinstance(scalar, UniRat):
            if region.arity < 1:
                raise ValueError("univariate scalar needs a one-variable region")
            var = scalar.num.var if not scalar.num.is_const() else scalar.den.var
            if region.arity == 2 and var not in region.names:
                raise ValueError(f"scalar variable {var!r} outside region {region}")
            x0 = region.bound_of(var) if var in region.names else region.lower[0]
            return self.sign_uni(scalar.num, scalar.den, x0)
        if region.arity != 2:
            raise ValueError("bivariate scalar needs a two-variable region")
        return self._sign_biratb(scalar, region, allow_strips)

    # -- univariate -------------------------------------------------------------

    def sign_uni(self, num: UniPoly, den: UniPoly, x0: int) -> SignResult:
        """Sign of num/den on [x0, oo); Unknown unless den is root-free there."""
        den_res = _unipoly_halfline_sign(den, x0)
        if den_res.verdict not in (SignVerdict.POSITIVE, SignVerdict.NEGATIVE):
            return UNKNOWN
        num_res = _unipoly_halfline_sign(num, x0)
        if num_res.verdict == SignVerdict.UNKNOWN:
            return UNKNOWN
        verdict = num_res.verdict * den_res.verdict
        cert = {
            "method": "SturmBoundary",
            "num": num_res.certificate,
            "den": den_res.certificate,
        }
        return SignResult(verdict, cert)

    # -- bivariate, B-free --------------------------------------------------------

    def bipoly_sign(
        self, p: BiPoly, region: Region, allow_strips: bool = True
    ) -> SignResult:
        key = (p, region.key(), allow_strips)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        res = self._bipoly_sign_uncached(p, region, allow_strips)
        self._cache[key] = res
        return res

    def _bipoly_sign_uncached(
        self, p: BiPoly, region: Region, allow_strips: bool
    ) -> SignResult:
        r0, k0 = region.lower
        if p.is_zero():
            return SignResult(SignVerdict.ZERO, {"method": "ExactConstant", "value": "0"})
        if p.is_const():
            return _const_result(p.const_value())
        scaled = p.scale(1 / p.content())  # sign-invariant, smaller numbers
        uni = scaled.univariate_in()
        if uni is not None:
            x0 = r0 if uni.var == "r" else k0
            return _unipoly_halfline_sign(uni, x0)
        res = _shifted_expansion_sign(scaled, r0, k0)
        if res.verdict != SignVerdict.UNKNOWN:
            return res
        res = self.newton.check(scaled, r0, k0)
        if res.verdict != SignVerdict.UNKNOWN:
            return res
        neg = self.newton.check(-scaled, r0, k0)
        if neg.verdict == SignVerdict.POSITIVE:
            return SignResult(
                SignVerdict.NEGATIVE, {"method": "NewtonPolygon", "negated": True, **neg.certificate}
            )
        if allow_strips:
            return self._strip_split(
                lambda kv: _strip_of_bipoly(scaled, kv),
                lambda new_region: self.bipoly_sign(scaled, new_region, allow_strips=False),
                region,
                describe=bipoly_str(scaled),
            )
        return UNKNOWN

    def newton_positivity(self, p: BiPoly, r0: int, k0: int) -> SignResult:
        """Expose the Newton-polygon test directly (Positive or Unknown)."""
        return self.newton.check(p, r0, k0)

    # -- bivariate with B -----------------------------------------------------------

    def _sign_biratb(
        self, s: BiRatB, region: Region, allow_strips: bool
    ) -> SignResult:
        den_res = self.bipoly_sign(s.den, region, allow_strips=allow_strips)
        if den_res.verdict not in (SignVerdict.POSITIVE, SignVerdict.NEGATIVE):
            return UNKNOWN
        num_res = self._sign_b_linear(s.p, s.q, region, allow_strips)
        if num_res.verdict == SignVerdict.UNKNOWN:
            return UNKNOWN
        return SignResult(
            num_res.verdict * den_res.verdict,
            {"method": "Ratio", "num": num_res.certificate, "den": den_res.certificate},
        )

    def _sign_b_linear(
        self, p: BiPoly, q: BiPoly, region: Region, allow_strips: bool
    ) -> SignResult:
        if p.is_zero():
            return self.bipoly_sign(q, region, allow_strips=allow_strips)
        p_res = self.bipoly_sign(p, region, allow_strips=allow_strips)
        if p_res.verdict.at_least_nonneg() or p_res.verdict.at_most_nonpos():
            upward = p_res.verdict.at_least_nonneg()
            for bb in region.valid_b_bounds():
                sub = p * bb.bound + q
                sub_res = self.bipoly_sign(sub, region, allow_strips=False)
                if upward and sub_res.verdict in (
                    SignVerdict.POSITIVE,
                    SignVerdict.NONNEGATIVE,
                ):
                    return SignResult(
                        sub_res.verdict,
                        {
                            "method": "BSubstitution",
                            "bound": bb.name,
                            "direction": "lower",
                            "b_coefficient_sign": p_res.verdict.value,
                            "inner": sub_res.certificate,
                        },
                    )
                if not upward and sub_res.verdict in (
                    SignVerdict.NEGATIVE,
                    SignVerdict.NONPOSITIVE,
                ):
                    return SignResult(
                        sub_res.verdict,
                        {
                            "method": "BSubstitution",
                            "bound": bb.name,
                            "direction": "lower",
                            "b_coefficient_sign": p_res.verdict.value,
                            "inner": sub_res.certificate,
                        },
                    )
        if allow_strips:
            scalar = BiRatB(p, q, BiPoly.const(1))
            return self._strip_split(
                lambda kv: _strip_of_scalar(scalar, kv),
                lambda new_region: self._sign_b_linear(
                    p, q, new_region, allow_strips=False
                ),
                region,
                describe=scalar_str(scalar),
            )
        return UNKNOWN

    # -- strip decomposition ------------------------------------------------------

    def _strip_split(self, strip_fn, tail_fn, region: Region, describe: str) -> SignResult:
        """Split k into exact strips [k0, k1] plus a tail {k >= k1 + 1}.

        The per-strip scalars substitute the exact binomial, so strip verdicts
        hold for every integer k in the strip; the combined verdict is the meet
        of all pieces. The tail certificate is found by a doubling search on
        the strip width, capped by ``strip_cap``. Verdicts quantify over
        integer points only (reconstruction of unprinted handling of B for
        unbounded k; flagged in the certificate).
        """
        r0, k0 = region.lower
        width = 1
        while width <= self.strip_cap:
            k1 = k0 + width
            tail = tail_fn(region.raise_bound("k", k1))
            if tail.verdict != SignVerdict.UNKNOWN:
                strips = []
                combined = tail.verdict
                ok = True
                for kv in range(k0, k1):
                    num, den = strip_fn(kv)
                    strip_res = self.sign_uni(num, den, r0)
                    if strip_res.verdict == SignVerdict.UNKNOWN:
                        ok = False
                        break
                    combined = _meet(combined, strip_res.verdict)
                    if combined == SignVerdict.UNKNOWN:
                        ok = False
                        break
                    strips.append({"k": kv, "certificate": strip_res.certificate})
                if ok:
                    return SignResult(
                        combined,
                        {
                            "method": "StripSplit",
                            "scalar": describe,
                            "k1": k1,
                            "strips": strips,
                            "tail": tail.certificate,
                            "integer_k_only": True,
                            "reconstructed": True,
                        },
                    )
            width *= 2
        return UNKNOWN

    # -- grid evidence --------------------------------------------------------------

    def point_evaluation(
        self, scalar: BaseScalar, points: list[dict]
    ) -> SignResult:
        """Exact evaluation on an explicit finite grid (used at fixed bases)."""
        values = []
        verdicts = []
        for pt in points:
            v = eval_scalar(scalar, pt)
            values.append({"point": pt, "value": str(v)})
            verdicts.append(sign_const(v).verdict)
        combined = verdicts[0]
        for v in verdicts[1:]:
            combined = _meet(combined, v)
        return SignResult(
            combined, {"method": "PointEvaluation", "grid": values}
        )


# ---------------------------------------------------------------------------
# Quadratic layer: products of two B-linear scalars
# ---------------------------------------------------------------------------
#
# Edge-of-polyhedron feasibility crosses two B-linear values, leaving the
# linear class. Scalars themselves stay linear in B; the quadratic appears
# only as a transient sign query (alpha*B^2 + beta*B + gamma)/den.


@dataclass(frozen=True)
class QuadB:
    alpha: BiPoly
    beta: BiPoly
    gamma: BiPoly
    den: BiPoly

    @staticmethod
    def from_scalar(s: BaseScalar) -> "QuadB":
        from .exactalg import _lift_to_biratb

        b = _lift_to_biratb(s)
        return QuadB(BiPoly.const(0), b.p, b.q, b.den)

    @staticmethod
    def product(a: BaseScalar, b: BaseScalar) -> "QuadB":
        from .exactalg import _lift_to_biratb

        x = _lift_to_biratb(a)
        y = _lift_to_biratb(b)
        return QuadB(
            x.p * y.p, x.p * y.q + y.p * x.q, x.q * y.q, x.den * y.den
        )

    def sub(self, other: "QuadB") -> "QuadB":
        if self.den == other.den:
            return QuadB(
                self.alpha - other.alpha,
                self.beta - other.beta,
                self.gamma - other.gamma,
                self.den,
            )
        return QuadB(
            self.alpha * other.den - other.alpha * self.den,
            self.beta * other.den - other.beta * self.den,
            self.gamma * other.den - other.gamma * self.den,
            self.den * other.den,
        )

    def is_linear(self) -> bool:
        return self.alpha.is_zero()

    def reduced(self) -> "QuadB":
        """Divide the numerator triple and the denominator by their positive
        contents; the sign is unchanged and the coefficients stay small."""
        from fractions import Fraction as Rat
        import math as _math

        num = 0
        den_ = 1
        for part in (self.alpha, self.beta, self.gamma):
            c = part.content()
            if not part.is_zero():
                num = _math.gcd(num, c.numerator)
                den_ = den_ * c.denominator // _math.gcd(den_, c.denominator)
        if num == 0:
            return QuadB(self.alpha, self.beta, self.gamma, self.den.scale(1 / self.den.content()))
        c = Rat(num, den_)
        return QuadB(
            self.alpha.scale(1 / c),
            self.beta.scale(1 / c),
            self.gamma.scale(1 / c),
            self.den.scale(1 / self.den.content()),
        )

    def describe(self) -> str:
        return (
            f"(({bipoly_str(self.alpha)})*B^2 + ({bipoly_str(self.beta)})*B"
            f" + ({bipoly_str(self.gamma)}))/({bipoly_str(self.den)})"
        )


def _quad_strip(q: QuadB, kv: int) -> tuple[UniPoly, UniPoly]:
    # numerator only; the denominator sign is composed once by the caller
    from .exactalg import binom_poly_fixed_k

    bk = binom_poly_fixed_k(kv)
    num = q.alpha.subst_k(kv) * bk * bk + q.beta.subst_k(kv) * bk + q.gamma.subst_k(kv)
    return num, UniPoly.const("r", 1)


def _sign_quad_core(
    oracle: "SignOracle", q: QuadB, region: Region, allow_strips: bool
) -> SignResult:
    if q.is_linear():
        return oracle._sign_b_linear(q.beta, q.gamma, region, allow_strips)
    sa = oracle.bipoly_sign(q.alpha, region, allow_strips=False)
    # Discriminant rule: alpha > 0 and 4*alpha*gamma - beta^2 >= 0 force the
    # quadratic nonnegative for every real value of B.
    if sa.verdict == SignVerdict.POSITIVE:
        disc = q.alpha * q.gamma * BiPoly.const(4) - q.beta * q.beta
        sd = oracle.bipoly_sign(disc, region, allow_strips=False)
        if sd.verdict.at_least_nonneg():
            return SignResult(
                SignVerdict.NONNEGATIVE,
                {
                    "method": "BSubstitution",
                    "quadratic": q.describe(),
                    "rule": "discriminant",
                    "inner": sd.certificate,
                },
            )
    # Monotone rule: on B >= L the quadratic is monotone when alpha and the
    # derivative at L share a sign, so the value at the bound L decides.
    for bb in region.valid_b_bounds():
        deriv = q.alpha * bb.bound * BiPoly.const(2) + q.beta
        sder = oracle.bipoly_sign(deriv, region, allow_strips=False)
        at_bound = q.alpha * bb.bound * bb.bound + q.beta * bb.bound + q.gamma
        if sa.verdict.at_least_nonneg() and sder.verdict.at_least_nonneg():
            sv = oracle.bipoly_sign(at_bound, region, allow_strips=False)
            if sv.verdict.at_least_nonneg():
                return SignResult(
                    sv.verdict,
                    {
                        "method": "BSubstitution",
                        "quadratic": q.describe(),
                        "bound": bb.name,
                        "rule": "monotone-up",
                        "inner": sv.certificate,
                    },
                )
        if sa.verdict.at_most_nonpos() and sder.verdict.at_most_nonpos():
            sv = oracle.bipoly_sign(at_bound, region, allow_strips=False)
            if sv.verdict.at_most_nonpos():
                return SignResult(
                    sv.verdict,
                    {
                        "method": "BSubstitution",
                        "quadratic": q.describe(),
                        "bound": bb.name,
                        "rule": "monotone-down",
                        "inner": sv.certificate,
                    },
                )
    if allow_strips:
        return oracle._strip_split(
            lambda kv: _quad_strip(q, kv),
            lambda new_region: _sign_quad_core(oracle, q, new_region, False),
            region,
            describe=q.describe(),
        )
    return UNKNOWN


def _strip_of_bipoly(p: BiPoly, kv: int) -> tuple[UniPoly, UniPoly]:
    return p.subst_k(kv), UniPoly.const("r", 1)


def _strip_of_scalar(s: BiRatB, kv: int) -> tuple[UniPoly, UniPoly]:
    sub = substitute_base(s, "k", kv)
    if isinstance(sub, Const):
        return UniPoly.const("r", sub.value), UniPoly.const("r", 1)
    assert isinstance(sub, UniRat)
    return sub.num, sub.den


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------


def replay_sign(oracle: SignOracle, entry: dict) -> bool:
    """Re-verify a serialized sign decision: re-deciding the scalar over the
    stored region must reproduce the stored verdict and method."""
    from .linsys import parse_scalar_text

    region = Region(
        tuple(entry["region"]["names"]), tuple(entry["region"]["lower"])
    )
    scalar = parse_scalar_text(entry["scalar"], region)
    res = oracle.sign(scalar, region)
    if res.verdict.value != entry["verdict"]:
        return False
    stored = entry.get("method")
    if stored and res.certificate and res.certificate.get("method") != stored:
        return False
    return True
