"""Exact arithmetic kernel.

Everything downstream (sign certificates, elimination, polyhedral geometry)
rests on the three coefficient domains implemented here:

* ``Fraction`` constants (arity 0),
* univariate rational functions ``UniRat`` (arity 1), and
* ``BiRatB`` values ``(p*B + q)/den`` over the base pair (r, k), where B is a
  formal symbol that stands for the binomial coefficient C(r+k, k) and is kept
  linear throughout.

All values are immutable and exact; no floating point appears anywhere.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

Rat = Fraction

#: Canonical base-variable names for arity-2 scalars.
BASE_PAIR = ("r", "k")


class NonlinearInB(ArithmeticError):
    """A product would create a term of degree >= 2 in the formal symbol B."""


class PoleAtPoint(ArithmeticError):
    """A denominator vanished at the requested evaluation point."""


def binomial(n: int, k: int) -> int:
    """Exact binomial coefficient C(n, k); requires n, k >= 0."""
    if n < 0 or k < 0:
        raise ValueError(f"binomial({n}, {k}) undefined for negative arguments")
    return math.comb(n, k)


def _as_rat(x: Union[int, Rat]) -> Rat:
    return x if isinstance(x, Rat) else Rat(x)


# ---------------------------------------------------------------------------
# Univariate polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UniPoly:
    """Dense univariate polynomial over Q, lowest degree first.

    Invariant: ``coeffs`` carries no trailing zero, so the zero polynomial is
    the empty tuple and ``degree`` of zero is -1.
    """

    var: str
    coeffs: tuple[Rat, ...]

    @staticmethod
    def make(var: str, coeffs: Iterable[Union[int, Rat]]) -> "UniPoly":
        cs = [_as_rat(c) for c in coeffs]
        while cs and cs[-1] == 0:
            cs.pop()
        return UniPoly(var, tuple(cs))

    @staticmethod
    def const(var: str, c: Union[int, Rat]) -> "UniPoly":
        return UniPoly.make(var, [c])

    @staticmethod
    def x(var: str) -> "UniPoly":
        return UniPoly(var, (Rat(0), Rat(1)))

    # -- basic queries ------------------------------------------------------

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return not self.coeffs

    def is_const(self) -> bool:
        return len(self.coeffs) <= 1

    def const_value(self) -> Rat:
        if not self.is_const():
            raise ValueError(f"{self} is not constant")
        return self.coeffs[0] if self.coeffs else Rat(0)

    def leading(self) -> Rat:
        if self.is_zero():
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    def _check_var(self, other: "UniPoly") -> str:
        if self.is_const():
            return other.var
        if other.is_const():
            return self.var
        if self.var != other.var:
            raise ValueError(f"variable mismatch: {self.var} vs {other.var}")
        return self.var

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "UniPoly") -> "UniPoly":
        var = self._check_var(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a, b = self.coeffs, other.coeffs
        return UniPoly.make(
            var,
            [
                (a[i] if i < len(a) else Rat(0)) + (b[i] if i < len(b) else Rat(0))
                for i in range(n)
            ],
        )

    def __neg__(self) -> "UniPoly":
        return UniPoly(self.var, tuple(-c for c in self.coeffs))

    def __sub__(self, other: "UniPoly") -> "UniPoly":
        return self + (-other)

    def __mul__(self, other: "UniPoly") -> "UniPoly":
        var = self._check_var(other)
        if self.is_zero() or other.is_zero():
            return UniPoly(var, ())
        out = [Rat(0)] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return UniPoly.make(var, out)

    def scale(self, c: Union[int, Rat]) -> "UniPoly":
        c = _as_rat(c)
        if c == 0:
            return UniPoly(self.var, ())
        return UniPoly(self.var, tuple(a * c for a in self.coeffs))

    def __pow__(self, n: int) -> "UniPoly":
        if n < 0:
            raise ValueError("negative power")
        out = UniPoly.const(self.var, 1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def eval(self, x: Union[int, Rat]) -> Rat:
        x = _as_rat(x)
        acc = Rat(0)
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def derivative(self) -> "UniPoly":
        return UniPoly.make(
            self.var, [i * c for i, c in enumerate(self.coeffs)][1:]
        )

    def shift(self, a: Union[int, Rat]) -> "UniPoly":
        """Re-expand around ``a``: returns q with q(t) = self(t + a)."""
        a = _as_rat(a)
        out = UniPoly(self.var, ())
        t_plus_a = UniPoly.make(self.var, [a, 1])
        power = UniPoly.const(self.var, 1)
        for c in self.coeffs:
            out = out + power.scale(c)
            power = power * t_plus_a
        return out

    # -- division and gcd ----------------------------------------------------

    def divmod(self, other: "UniPoly") -> tuple["UniPoly", "UniPoly"]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        var = self._check_var(other)
        rem = list(self.coeffs)
        q = [Rat(0)] * max(0, len(rem) - len(other.coeffs) + 1)
        d = other.degree
        lead = other.leading()
        while len(rem) - 1 >= d and rem:
            k = len(rem) - 1 - d
            f = rem[-1] / lead
            q[k] = f
            for i, c in enumerate(other.coeffs):
                rem[k + i] -= f * c
            while rem and rem[-1] == 0:
                rem.pop()
        return UniPoly.make(var, q), UniPoly.make(var, rem)

    def exact_div(self, other: "UniPoly") -> "UniPoly":
        q, r = self.divmod(other)
        if not r.is_zero():
            raise ArithmeticError(f"{self} not divisible by {other}")
        return q

    def gcd(self, other: "UniPoly") -> "UniPoly":
        """Monic gcd (1 for coprime inputs, 0 only if both are zero)."""
        if self.is_zero():
            return other if other.is_zero() else other.scale(1 / other.leading())
        if other.is_zero():
            return self.scale(1 / self.leading())
        var = self._check_var(other)
        a = _prim_int(_int_coeffs(self))
        b = _prim_int(_int_coeffs(other))
        if len(a) < len(b):
            a, b = b, a
        while b:
            r = _prim_int(_pseudo_rem_int(a, b))
            a, b = b, r
        out = UniPoly.make(var, [Rat(c) for c in a])
        return out.scale(1 / out.leading())

    def content(self) -> Rat:
        """Positive rational c with self/c integer-coefficient and primitive."""
        if self.is_zero():
            return Rat(1)
        num = 0
        den = 1
        for c in self.coeffs:
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Rat(num, den)

    def primitive(self) -> "UniPoly":
        """Divide by +/- content so the result has positive leading coefficient."""
        if self.is_zero():
            return self
        c = self.content()
        if self.leading() < 0:
            c = -c
        return self.scale(1 / c)

    def rename(self, var: str) -> "UniPoly":
        return UniPoly(var, self.coeffs)

    def __str__(self) -> str:
        return unipoly_str(self)


def unipoly_str(p: UniPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for i in range(p.degree, -1, -1):
        c = p.coeffs[i]
        if c == 0:
            continue
        if i == 0:
            mono = ""
        elif i == 1:
            mono = p.var
        else:
            mono = f"{p.var}^{i}"
        parts.append(_term_str(c, mono, first=not parts))
    return "".join(parts)


def _term_str(c: Rat, mono: str, first: bool) -> str:
    a = abs(c)
    if not mono:
        body = str(a)
    elif a == 1:
        body = mono
    else:
        body = f"{a}*{mono}"
    if first:
        return "-" + body if c < 0 else body
    return (" - " if c < 0 else " + ") + body


# -- Sturm machinery ---------------------------------------------------------
#
# The chains run over integer coefficient lists (pseudo-remainders reduced to
# primitive parts, with the scaling kept positive), so no rational gcd churn
# happens inside the loop. Only sign evaluations need Fractions.


def _int_coeffs(p: UniPoly) -> list[int]:
    """Integer coefficient list of p scaled by the lcm of denominators."""
    lcm = 1
    for c in p.coeffs:
        lcm = lcm * c.denominator // math.gcd(lcm, c.denominator)
    return [int(c * lcm) for c in p.coeffs]


def _prim_int(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    if not a:
        return a
    g = 0
    for c in a:
        g = math.gcd(g, c)
    return [c // g for c in a]


def _pseudo_rem_int(a: list[int], b: list[int]) -> list[int]:
    """Positive-multiple pseudo-remainder: s * (a mod b) with s > 0."""
    da, db = len(a) - 1, len(b) - 1
    lead = b[-1]
    rem = list(a)
    for i in range(da - db, -1, -1):
        if len(rem) - 1 < db + i:
            continue
        top = rem[db + i] if db + i < len(rem) else 0
        if top == 0:
            continue
        rem = [c * lead for c in rem]
        for j in range(db + 1):
            rem[j + i] -= top * b[j]
        while rem and rem[-1] == 0:
            rem.pop()
        if lead < 0:
            rem = [-c for c in rem]  # keep the accumulated multiplier positive
    return rem


def _eval_int(a: list[int], x: Rat) -> Rat:
    acc = Rat(0)
    for c in reversed(a):
        acc = acc * x + c
    return acc


def sturm_chain_int(p: UniPoly) -> list[list[int]]:
    """Sturm chain as primitive integer coefficient lists.

    Each element is a positive multiple of the classical chain entry, so sign
    variation counts are unchanged.
    """
    p0 = _prim_int(_int_coeffs(p))
    p1 = _prim_int(_int_coeffs(p.derivative()))
    chain = [p0, p1]
    while chain[-1]:
        rem = _pseudo_rem_int(chain[-2], chain[-1])
        if not rem:
            break
        chain.append(_prim_int([-c for c in rem]))
    return [q for q in chain if q]


def sturm_chain(p: UniPoly) -> list[UniPoly]:
    """Sturm chain as polynomials (positive multiples of the classical one)."""
    return [
        UniPoly.make(p.var, [Rat(c) for c in q]) for q in sturm_chain_int(p)
    ]


def _sign_changes(values: Sequence[Rat]) -> int:
    signs = [1 if v > 0 else -1 for v in values if v != 0]
    return sum(1 for a, b in zip(signs, signs[1:]) if a != b)


_STURM_COUNT_CACHE: dict = {}


def sturm_count_above(p: UniPoly, x0: Union[int, Rat]) -> int:
    """Number of distinct real roots of ``p`` in the open interval (x0, oo).

    Exact for every nonzero input: multiple roots are handled by passing to the
    squarefree part, and a root exactly at ``x0`` is divided out first.
    """
    if p.is_zero():
        raise ValueError("root counting on the zero polynomial")
    x0 = _as_rat(x0)
    key = (p, x0)
    hit = _STURM_COUNT_CACHE.get(key)
    if hit is not None:
        return hit
    sf = squarefree_part(p.primitive())
    while sf.eval(x0) == 0:
        sf = sf.exact_div(UniPoly.make(sf.var, [-x0, 1]))
    if sf.is_const():
        _STURM_COUNT_CACHE[key] = 0
        return 0
    chain = sturm_chain_int(sf)
    at_x0 = _sign_changes([_eval_int(q, x0) for q in chain])
    at_inf = _sign_changes([Rat(q[-1]) for q in chain])
    out = at_x0 - at_inf
    _STURM_COUNT_CACHE[key] = out
    return out


_SQUAREFREE_CACHE: dict = {}


def squarefree_part(p: UniPoly) -> UniPoly:
    """The radical p / gcd(p, p'): same distinct roots, all simple."""
    if p.is_zero() or p.is_const():
        return p
    hit = _SQUAREFREE_CACHE.get(p)
    if hit is not None:
        return hit
    g = p.gcd(p.derivative())
    out = p if g.is_const() else p.exact_div(g)
    _SQUAREFREE_CACHE[p] = out
    return out


def yun_decomposition(p: UniPoly) -> list[tuple[UniPoly, int]]:
    """Squarefree decomposition p = lc * prod a_i^i with a_i monic, squarefree,
    pairwise coprime. Returns [(a_i, i)] for the nonconstant a_i."""
    if p.is_zero() or p.is_const():
        return []
    monic = p.scale(1 / p.leading())
    g = monic.gcd(monic.derivative())
    if g.is_const():
        return [(monic, 1)]
    c = monic.exact_div(g)
    d = monic.derivative().exact_div(g) - c.derivative()
    out: list[tuple[UniPoly, int]] = []
    i = 1
    while not c.is_const():
        a = c.gcd(d)
        if not a.is_const():
            out.append((a, i))
        c = c.exact_div(a)
        d = d.exact_div(a) - c.derivative()
        i += 1
    return out


_ODD_PART_CACHE: dict = {}


def odd_multiplicity_part(p: UniPoly) -> UniPoly:
    """Product of the squarefree factors of odd multiplicity, scaled by the
    leading coefficient of ``p``.

    The result changes sign exactly where ``p`` does, which is what the sign
    analysis over half-lines needs.
    """
    if p.is_zero() or p.is_const():
        return p
    hit = _ODD_PART_CACHE.get(p)
    if hit is not None:
        return hit
    out = UniPoly.const(p.var, 1 if p.leading() > 0 else -1)
    for factor, mult in yun_decomposition(p.primitive()):
        if mult % 2 == 1:
            out = out * factor
    _ODD_PART_CACHE[p] = out
    return out


# ---------------------------------------------------------------------------
# Bivariate polynomials over the fixed pair (r, k)
# ---------------------------------------------------------------------------


class BiPoly:
    """Sparse bivariate polynomial in (r, k) with Fraction coefficients.

    Terms map exponent pairs (i, j) -> coefficient; zero coefficients are never
    stored. Instances are immutable by convention.
    """

    __slots__ = ("terms", "_hash")

    def __init__(self, terms: Mapping[tuple[int, int], Rat]):
        self.terms = {e: c for e, c in terms.items() if c != 0}
        self._hash: int | None = None

    # -- constructors --------------------------------------------------------

    @staticmethod
    def const(c: Union[int, Rat]) -> "BiPoly":
        c = _as_rat(c)
        return BiPoly({(0, 0): c} if c else {})

    @staticmethod
    def var_r() -> "BiPoly":
        return BiPoly({(1, 0): Rat(1)})

    @staticmethod
    def var_k() -> "BiPoly":
        return BiPoly({(0, 1): Rat(1)})

    @staticmethod
    def from_unipoly(p: UniPoly) -> "BiPoly":
        if p.var not in BASE_PAIR and not p.is_const():
            raise ValueError(f"cannot lift univariate in {p.var!r} to (r, k)")
        pos = 0 if p.var == "r" else 1
        terms: dict[tuple[int, int], Rat] = {}
        for i, c in enumerate(p.coeffs):
            if c:
                e = (i, 0) if pos == 0 else (0, i)
                terms[e] = c
        return BiPoly(terms)

    # -- queries --------------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(e == (0, 0) for e in self.terms)

    def const_value(self) -> Rat:
        if not self.is_const():
            raise ValueError(f"{self} is not constant")
        return self.terms.get((0, 0), Rat(0))

    def deg_r(self) -> int:
        return max((e[0] for e in self.terms), default=-1)

    def deg_k(self) -> int:
        return max((e[1] for e in self.terms), default=-1)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, BiPoly) and self.terms == other.terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(tuple(sorted(self.terms.items())))
        return self._hash

    # -- arithmetic ------------------------------------------------------------

    def __add__(self, other: "BiPoly") -> "BiPoly":
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Rat(0)) + c
        return BiPoly(terms)

    def __neg__(self) -> "BiPoly":
        return BiPoly({e: -c for e, c in self.terms.items()})

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        return self + (-other)

    def __mul__(self, other: "BiPoly") -> "BiPoly":
        out: dict[tuple[int, int], Rat] = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                e = (i1 + i2, j1 + j2)
                out[e] = out.get(e, Rat(0)) + c1 * c2
        return BiPoly(out)

    def scale(self, c: Union[int, Rat]) -> "BiPoly":
        c = _as_rat(c)
        return BiPoly({e: v * c for e, v in self.terms.items()})

    def __pow__(self, n: int) -> "BiPoly":
        out = BiPoly.const(1)
        base = self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def eval(self, rv: Union[int, Rat], kv: Union[int, Rat]) -> Rat:
        rv, kv = _as_rat(rv), _as_rat(kv)
        total = Rat(0)
        for (i, j), c in self.terms.items():
            total += c * rv**i * kv**j
        return total

    # -- structure in one variable ----------------------------------------------

    def subst_r(self, rv: Union[int, Rat]) -> UniPoly:
        """Substitute a value for r; result is univariate in k."""
        rv = _as_rat(rv)
        out: dict[int, Rat] = {}
        for (i, j), c in self.terms.items():
            out[j] = out.get(j, Rat(0)) + c * rv**i
        deg = max(out, default=-1)
        return UniPoly.make("k", [out.get(j, Rat(0)) for j in range(deg + 1)])

    def subst_k(self, kv: Union[int, Rat]) -> UniPoly:
        rv_out: dict[int, Rat] = {}
        kv = _as_rat(kv)
        for (i, j), c in self.terms.items():
            rv_out[i] = rv_out.get(i, Rat(0)) + c * kv**j
        deg = max(rv_out, default=-1)
        return UniPoly.make("r", [rv_out.get(i, Rat(0)) for i in range(deg + 1)])

    def coeffs_in_r(self) -> list[UniPoly]:
        """Coefficients of r^0, r^1, ... as univariate polynomials in k."""
        rows: dict[int, dict[int, Rat]] = {}
        for (i, j), c in self.terms.items():
            rows.setdefault(i, {})[j] = c
        deg = self.deg_r()
        out = []
        for i in range(deg + 1):
            row = rows.get(i, {})
            jmax = max(row, default=-1)
            out.append(UniPoly.make("k", [row.get(j, Rat(0)) for j in range(jmax + 1)]))
        return out

    def coeffs_in_k(self) -> list[UniPoly]:
        cols: dict[int, dict[int, Rat]] = {}
        for (i, j), c in self.terms.items():
            cols.setdefault(j, {})[i] = c
        deg = self.deg_k()
        out = []
        for j in range(deg + 1):
            col = cols.get(j, {})
            imax = max(col, default=-1)
            out.append(UniPoly.make("r", [col.get(i, Rat(0)) for i in range(imax + 1)]))
        return out

    def lead_coeff_r(self) -> UniPoly:
        return self.coeffs_in_r()[-1]

    def lead_coeff_k(self) -> UniPoly:
        return self.coeffs_in_k()[-1]

    def derivative_r(self) -> "BiPoly":
        return BiPoly(
            {(i - 1, j): c * i for (i, j), c in self.terms.items() if i > 0}
        )

    def derivative_k(self) -> "BiPoly":
        return BiPoly(
            {(i, j - 1): c * j for (i, j), c in self.terms.items() if j > 0}
        )

    def univariate_in(self) -> UniPoly | None:
        """If only one of r, k occurs, return the polynomial in that variable."""
        if self.deg_r() <= 0:
            return self.subst_r(0)
        if self.deg_k() <= 0:
            return self.subst_k(0)
        return None

    def content(self) -> Rat:
        if self.is_zero():
            return Rat(1)
        num = 0
        den = 1
        for c in self.terms.values():
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        return Rat(num, den)

    def lead_sign_grlex(self) -> int:
        """Sign of the coefficient of the graded-lex leading term (0 for zero)."""
        if self.is_zero():
            return 0
        e = max(self.terms, key=lambda e: (e[0] + e[1], e))
        return 1 if self.terms[e] > 0 else -1

    def support(self) -> list[tuple[int, int]]:
        return sorted(self.terms)

    def __str__(self) -> str:
        return bipoly_str(self)

    def __repr__(self) -> str:
        return f"BiPoly({bipoly_str(self)})"


def bipoly_str(p: BiPoly) -> str:
    if p.is_zero():
        return "0"
    parts = []
    for (i, j) in sorted(p.terms, key=lambda e: (-(e[0] + e[1]), -e[0], -e[1])):
        c = p.terms[(i, j)]
        monos = []
        if i == 1:
            monos.append("r")
        elif i > 1:
            monos.append(f"r^{i}")
        if j == 1:
            monos.append("k")
        elif j > 1:
            monos.append(f"k^{j}")
        mono = "*".join(monos)
        parts.append(_term_str(c, mono, first=not parts))
    return "".join(parts)


def shifted_expansion(p: BiPoly, r0: int, k0: int) -> BiPoly:
    """Re-expand ``p`` in powers of (r - r0) and (k - k0).

    The returned polynomial, read with variables (r - r0, k - k0), reproduces
    ``p``; equivalently result(u, v) == p(u + r0, v + k0).
    """
    # p(u + r0, v + k0): expand r^i and k^j by the binomial theorem, with
    # per-exponent weight rows precomputed.
    out: dict[tuple[int, int], Rat] = {}
    row_r: dict[int, list[int]] = {}
    row_k: dict[int, list[int]] = {}

    def row(table: dict, x0: int, n: int) -> list[int]:
        got = table.get(n)
        if got is None:
            got = [math.comb(n, a) * x0 ** (n - a) for a in range(n + 1)]
            table[n] = got
        return got

    for (i, j), c in p.terms.items():
        wr = row(row_r, r0, i)
        wk = row(row_k, k0, j)
        for a in range(i + 1):
            ca = c * wr[a]
            if ca == 0:
                continue
            for b in range(j + 1):
                w = wk[b]
                if w == 0:
                    continue
                e = (a, b)
                out[e] = out.get(e, Rat(0)) + ca * w
    return BiPoly(out)


@functools.lru_cache(maxsize=None)
def binom_poly_in_sum(m: int) -> BiPoly:
    """C(r+k, m) as a polynomial: (r+k)(r+k-1)...(r+k-m+1)/m!."""
    s = BiPoly.var_r() + BiPoly.var_k()
    out = BiPoly.const(Rat(1, math.factorial(m)))
    for i in range(m):
        out = out * (s - BiPoly.const(i))
    return out


@functools.lru_cache(maxsize=None)
def binom_poly_fixed_k(kv: int) -> UniPoly:
    """C(r+kv, kv) as a univariate polynomial in r, exact for all integers r >= 0."""
    out = UniPoly.const("r", Rat(1, math.factorial(kv)))
    x = UniPoly.x("r")
    for i in range(1, kv + 1):
        out = out * (x + UniPoly.const("r", i))
    return out


# ---------------------------------------------------------------------------
# Resultants
# ---------------------------------------------------------------------------


def _bareiss_det(mat: list[list], ring) -> object:
    """Fraction-free determinant. ``ring`` provides zero/one/is_zero/mul/sub/div."""
    n = len(mat)
    if n == 0:
        return ring.one
    m = [row[:] for row in mat]
    sign = 1
    prev = ring.one
    for col in range(n - 1):
        pivot_row = None
        for r_ in range(col, n):
            if not ring.is_zero(m[r_][col]):
                pivot_row = r_
                break
        if pivot_row is None:
            return ring.zero
        if pivot_row != col:
            m[col], m[pivot_row] = m[pivot_row], m[col]
            sign = -sign
        for r_ in range(col + 1, n):
            for c_ in range(col + 1, n):
                num = ring.sub(
                    ring.mul(m[col][col], m[r_][c_]), ring.mul(m[r_][col], m[col][c_])
                )
                m[r_][c_] = ring.div(num, prev)
            m[r_][col] = ring.zero
        prev = m[col][col]
    det = m[n - 1][n - 1]
    return det if sign == 1 else ring.neg(det)


class _UniPolyRing:
    """Ring interface over Q[k] (or any single variable) for Bareiss."""

    def __init__(self, var: str):
        self.var = var
        self.zero = UniPoly(var, ())
        self.one = UniPoly.const(var, 1)

    def is_zero(self, a: UniPoly) -> bool:
        return a.is_zero()

    def mul(self, a: UniPoly, b: UniPoly) -> UniPoly:
        return a * b

    def sub(self, a: UniPoly, b: UniPoly) -> UniPoly:
        return a - b

    def neg(self, a: UniPoly) -> UniPoly:
        return -a

    def div(self, a: UniPoly, b: UniPoly) -> UniPoly:
        return a.exact_div(b)


def sylvester_resultant(p_coeffs: list, q_coeffs: list, ring) -> object:
    """Resultant via the Sylvester determinant; coefficients lowest-first."""
    while p_coeffs and ring.is_zero(p_coeffs[-1]):
        p_coeffs = p_coeffs[:-1]
    while q_coeffs and ring.is_zero(q_coeffs[-1]):
        q_coeffs = q_coeffs[:-1]
    if not p_coeffs or not q_coeffs:
        raise ValueError("resultant of zero polynomial")
    m, n = len(p_coeffs) - 1, len(q_coeffs) - 1
    if m == 0 and n == 0:
        return ring.one
    if n == 0:
        out = ring.one
        for _ in range(m):
            out = ring.mul(out, q_coeffs[0])
        return out
    if m == 0:
        out = ring.one
        for _ in range(n):
            out = ring.mul(out, p_coeffs[0])
        return out
    size = m + n
    rows = []
    p_desc = list(reversed(p_coeffs))
    q_desc = list(reversed(q_coeffs))
    for i in range(n):
        rows.append([ring.zero] * i + p_desc + [ring.zero] * (size - m - 1 - i))
    for i in range(m):
        rows.append([ring.zero] * i + q_desc + [ring.zero] * (size - n - 1 - i))
    return _bareiss_det(rows, ring)


def resultant_in_r(p: BiPoly, q: BiPoly) -> UniPoly:
    """Res_r(p, q) as a univariate polynomial in k."""
    if p.is_zero() or q.is_zero():
        raise ValueError("resultant of zero polynomial")
    ring = _UniPolyRing("k")
    return sylvester_resultant(p.coeffs_in_r(), q.coeffs_in_r(), ring)


def resultant_in_k(p: BiPoly, q: BiPoly) -> UniPoly:
    ring = _UniPolyRing("r")
    return sylvester_resultant(p.coeffs_in_k(), q.coeffs_in_k(), ring)


class _RatRing:
    zero = Rat(0)
    one = Rat(1)

    @staticmethod
    def is_zero(a: Rat) -> bool:
        return a == 0

    @staticmethod
    def mul(a: Rat, b: Rat) -> Rat:
        return a * b

    @staticmethod
    def sub(a: Rat, b: Rat) -> Rat:
        return a - b

    @staticmethod
    def neg(a: Rat) -> Rat:
        return -a

    @staticmethod
    def div(a: Rat, b: Rat) -> Rat:
        return a / b


def resultant_univariate(p: UniPoly, q: UniPoly) -> Rat:
    """Resultant of two univariate polynomials in the same variable."""
    return sylvester_resultant(list(p.coeffs), list(q.coeffs), _RatRing)


# ---------------------------------------------------------------------------
# BaseScalar: the three-level coefficient domain
# ---------------------------------------------------------------------------


class _ScalarOps:
    """Operator sugar shared by the three scalar kinds."""

    def __add__(self, other):
        return scalar_add(self, _coerce(other))

    def __radd__(self, other):
        return scalar_add(_coerce(other), self)

    def __sub__(self, other):
        return scalar_add(self, scalar_neg(_coerce(other)))

    def __rsub__(self, other):
        return scalar_add(_coerce(other), scalar_neg(self))

    def __mul__(self, other):
        return scalar_mul(self, _coerce(other))

    def __rmul__(self, other):
        return scalar_mul(_coerce(other), self)

    def __neg__(self):
        return scalar_neg(self)


@dataclass(frozen=True)
class Const(_ScalarOps):
    value: Rat

    def __str__(self) -> str:
        return str(self.value)


@dataclass(frozen=True)
class UniRat(_ScalarOps):
    """num/den with univariate polynomial parts; den primitive, positive lead,
    gcd(num, den) constant."""

    num: UniPoly
    den: UniPoly

    def __str__(self) -> str:
        return scalar_str(self)


@dataclass(frozen=True)
class BiRatB(_ScalarOps):
    """(p*B + q)/den over (r, k); p, q, den bivariate polynomials, den nonzero."""

    p: BiPoly
    q: BiPoly
    den: BiPoly

    def __str__(self) -> str:
        return scalar_str(self)


BaseScalar = Union[Const, UniRat, BiRatB]

ZERO = Const(Rat(0))
ONE = Const(Rat(1))


def const(x: Union[int, Rat]) -> Const:
    return Const(_as_rat(x))


def _coerce(x) -> BaseScalar:
    if isinstance(x, (Const, UniRat, BiRatB)):
        return x
    if isinstance(x, (int, Rat)):
        return Const(_as_rat(x))
    raise TypeError(f"cannot coerce {x!r} to a scalar")


def make_unirat(num: UniPoly, den: UniPoly) -> BaseScalar:
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if num.is_zero():
        return ZERO
    g = num.gcd(den)
    if not g.is_const():
        num = num.exact_div(g)
        den = den.exact_div(g)
    c = den.content()
    if den.leading() < 0:
        c = -c
    den = den.scale(1 / c)
    num = num.scale(1 / c)
    if den.is_const():
        num = num.scale(1 / den.const_value())
        if num.is_const():
            return Const(num.const_value())
        return UniRat(num, UniPoly.const(num.var, 1))
    return UniRat(num, den)


def make_biratb(p: BiPoly, q: BiPoly, den: BiPoly) -> BaseScalar:
    if den.is_zero():
        raise ZeroDivisionError("zero denominator")
    if p.is_zero() and q.is_zero():
        return ZERO
    c = den.content()
    if den.lead_sign_grlex() < 0:
        c = -c
    inv = 1 / c
    p, q, den = p.scale(inv), q.scale(inv), den.scale(inv)
    if p.is_zero() and den.is_const() and q.is_const():
        return Const(q.const_value() / den.const_value())
    return BiRatB(p, q, den)


def b_symbol() -> BiRatB:
    """The formal binomial symbol B itself."""
    return BiRatB(BiPoly.const(1), BiPoly.const(0), BiPoly.const(1))


def arity_of(s: BaseScalar) -> int:
    if isinstance(s, Const):
        return 0
    if isinstance(s, UniRat):
        return 1
    return 2


def _lift_to_unirat(s: BaseScalar, var: str) -> UniRat:
    if isinstance(s, Const):
        return UniRat(UniPoly.const(var, s.value), UniPoly.const(var, 1))
    if isinstance(s, UniRat):
        if not s.num.is_const() or not s.den.is_const():
            v = s.num.var if not s.num.is_const() else s.den.var
            if v != var:
                raise ValueError(f"variable mismatch: {v} vs {var}")
        return s
    raise ValueError("cannot lower a bivariate scalar")


def _lift_to_biratb(s: BaseScalar) -> BiRatB:
    if isinstance(s, Const):
        return BiRatB(BiPoly.const(0), BiPoly.const(s.value), BiPoly.const(1))
    if isinstance(s, UniRat):
        return BiRatB(
            BiPoly.const(0), BiPoly.from_unipoly(s.num), BiPoly.from_unipoly(s.den)
        )
    return s


def _common_kind(a: BaseScalar, b: BaseScalar) -> tuple[BaseScalar, BaseScalar]:
    ka, kb = arity_of(a), arity_of(b)
    if ka == kb:
        if ka == 1:
            va = a.num.var if not (a.num.is_const() and a.den.is_const()) else None
            vb = b.num.var if not (b.num.is_const() and b.den.is_const()) else None
            if va and vb and va != vb:
                if va in BASE_PAIR and vb in BASE_PAIR:
                    return _lift_to_biratb(a), _lift_to_biratb(b)
                raise ValueError(f"variable mismatch: {va} vs {vb}")
        return a, b
    if ka < kb:
        if kb == 1:
            return _lift_to_unirat(a, b.num.var), b
        return _lift_to_biratb(a), b
    if ka == 1:
        return a, _lift_to_unirat(b, a.num.var)
    return a, _lift_to_biratb(b)


def scalar_add(a: BaseScalar, b: BaseScalar) -> BaseScalar:
    a, b = _common_kind(a, b)
    if isinstance(a, Const):
        return Const(a.value + b.value)
    if isinstance(a, UniRat):
        if a.den == b.den:
            return make_unirat(a.num + b.num, a.den)
        return make_unirat(a.num * b.den + b.num * a.den, a.den * b.den)
    if a.den == b.den:
        return make_biratb(a.p + b.p, a.q + b.q, a.den)
    return make_biratb(
        a.p * b.den + b.p * a.den, a.q * b.den + b.q * a.den, a.den * b.den
    )


def scalar_neg(a: BaseScalar) -> BaseScalar:
    if isinstance(a, Const):
        return Const(-a.value)
    if isinstance(a, UniRat):
        return UniRat(-a.num, a.den)
    return BiRatB(-a.p, -a.q, a.den)


def scalar_sub(a: BaseScalar, b: BaseScalar) -> BaseScalar:
    return scalar_add(a, scalar_neg(b))


def scalar_mul(a: BaseScalar, b: BaseScalar) -> BaseScalar:
    a, b = _common_kind(a, b)
    if isinstance(a, Const):
        return Const(a.value * b.value)
    if isinstance(a, UniRat):
        return make_unirat(a.num * b.num, a.den * b.den)
    if not a.p.is_zero() and not b.p.is_zero():
        raise NonlinearInB(
            "product of two B-carrying scalars would have degree 2 in B"
        )
    p = a.p * b.q + b.p * a.q
    return make_biratb(p, a.q * b.q, a.den * b.den)


def scalar_div(a: BaseScalar, b: BaseScalar) -> BaseScalar:
    """Exact division; the divisor must be B-free and nonzero."""
    a, b = _common_kind(a, b)
    if isinstance(b, Const):
        if b.value == 0:
            raise ZeroDivisionError("scalar division by zero")
        return scalar_mul(a, Const(1 / b.value))
    if isinstance(b, UniRat):
        return make_unirat(a.num * b.den, a.den * b.num)
    if not b.p.is_zero():
        raise NonlinearInB("division by a B-carrying scalar leaves the linear class")
    if b.q.is_zero():
        raise ZeroDivisionError("scalar division by zero")
    return make_biratb(a.p * b.den, a.q * b.den, a.den * b.q)


def scalar_is_zero(a: BaseScalar) -> bool:
    if isinstance(a, Const):
        return a.value == 0
    if isinstance(a, UniRat):
        return a.num.is_zero()
    return a.p.is_zero() and a.q.is_zero()


def scalar_eq(a: BaseScalar, b: BaseScalar) -> bool:
    """Mathematical equality (cross-multiplied), not structural equality."""
    return scalar_is_zero(scalar_sub(a, b))


def normalize(a: BaseScalar) -> BaseScalar:
    """Re-canonicalize; also demotes, e.g. a UniRat that is really a constant."""
    if isinstance(a, Const):
        return a
    if isinstance(a, UniRat):
        return make_unirat(a.num, a.den)
    out = make_biratb(a.p, a.q, a.den)
    if isinstance(out, BiRatB) and out.p.is_zero():
        u = out.q.univariate_in()
        v = out.den.univariate_in()
        if u is not None and v is not None and u.var == v.var:
            return make_unirat(u, v)
    return out


def scalar_is_b_free(a: BaseScalar) -> bool:
    return not isinstance(a, BiRatB) or a.p.is_zero()


def eval_scalar(s: BaseScalar, point: Mapping[str, int]) -> Rat:
    """Exact value at an integer base point; B evaluates to C(r+k, k).

    Raises PoleAtPoint when a denominator vanishes there.
    """
    if isinstance(s, Const):
        return s.value
    if isinstance(s, UniRat):
        var = s.num.var if not s.num.is_const() else s.den.var
        if var not in point and not (s.num.is_const() and s.den.is_const()):
            raise KeyError(f"missing base value for {var!r}")
        x = point.get(var, 0)
        dv = s.den.eval(x)
        if dv == 0:
            raise PoleAtPoint(f"denominator {s.den} vanishes at {var}={x}")
        return s.num.eval(x) / dv
    rv, kv = point["r"], point["k"]
    dv = s.den.eval(rv, kv)
    if dv == 0:
        raise PoleAtPoint(f"denominator {s.den} vanishes at (r,k)=({rv},{kv})")
    b = binomial(rv + kv, kv)
    return (s.p.eval(rv, kv) * b + s.q.eval(rv, kv)) / dv


def substitute_base(s: BaseScalar, var: str, value: int) -> BaseScalar:
    """Fix one base variable to an integer, dropping the scalar one arity level.

    For arity-2 scalars, fixing k substitutes the exact polynomial C(r+k0, k0)
    for B (and symmetrically for r), so the result is exact at every integer
    point of the remaining variable with var >= 0 context.
    """
    if isinstance(s, Const):
        return s
    if isinstance(s, UniRat):
        nv = s.num.eval(value) if (s.num.is_const() or s.num.var == var) else None
        if nv is None:
            return s
        dv = s.den.eval(value)
        if dv == 0:
            raise PoleAtPoint(f"denominator {s.den} vanishes at {var}={value}")
        return Const(nv / dv)
    if var == "k":
        b_poly = binom_poly_fixed_k(value)
        num = s.p.subst_k(value) * b_poly + s.q.subst_k(value)
        return make_unirat(num, s.den.subst_k(value))
    if var == "r":
        # C(r0+k, k) = C(r0+k, r0) is a degree-r0 polynomial in k.
        out = UniPoly.const("k", Rat(1, math.factorial(value)))
        x = UniPoly.x("k")
        for i in range(1, value + 1):
            out = out * (x + UniPoly.const("k", i))
        num = s.p.subst_r(value) * out + s.q.subst_r(value)
        return make_unirat(num, s.den.subst_r(value))
    raise ValueError(f"unknown base variable {var!r}")


def scalar_str(s: BaseScalar) -> str:
    """Canonical text form, re-readable by the expression parser."""
    if isinstance(s, Const):
        return str(s.value)
    if isinstance(s, UniRat):
        if s.den.is_const() and s.den.const_value() == 1:
            return f"({unipoly_str(s.num)})"
        return f"({unipoly_str(s.num)})/({unipoly_str(s.den)})"
    parts = []
    if not s.p.is_zero():
        parts.append(f"({bipoly_str(s.p)})*B")
    if not s.q.is_zero() or not parts:
        parts.append(f"({bipoly_str(s.q)})")
    body = " + ".join(parts)
    if s.den.is_const() and s.den.const_value() == 1:
        return f"({body})"
    return f"(({body}))/({bipoly_str(s.den)})"
