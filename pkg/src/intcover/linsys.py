"""Inequality systems, their text format, and Fourier-Motzkin elimination.

A system is an ordered variable list plus linear forms (each meaning
``form >= 0``) whose variable coefficients are B-free scalars over the base
variables; the constant term may carry B. Two eliminations are provided:

* ``eliminate_real``: exact projection over the reals (cross terms
  ``a_i d_j - b_i c_j >= 0``);
* ``eliminate_integer``: sound in one direction for integer points, with the
  correction term ``(b_i - 1)(d_j - 1)`` subtracted so that every integer
  point of the output extends to an integer value of the eliminated variable.

Constants stay exact rationals throughout; rounding the constants up happens
only in :func:`satisfies_ceiled`.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction as Rat
from typing import Callable, Iterable, Optional, Sequence

from .exactalg import (
    BASE_PAIR,
    BiPoly,
    BiRatB,
    Const,
    UniPoly,
    UniRat,
    BaseScalar,
    ZERO,
    b_symbol,
    const,
    eval_scalar,
    normalize,
    scalar_add,
    scalar_div,
    scalar_is_b_free,
    scalar_is_zero,
    scalar_mul,
    scalar_neg,
    scalar_str,
    scalar_sub,
    substitute_base,
)
from .signcert import Region, SignOracle, SignVerdict, point_region


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} (line {line}, column {col})")
        self.line = line
        self.col = col


class UnknownSymbol(ParseError):
    pass


class UndeterminedCoefficientSign(RuntimeError):
    """A variable coefficient's sign could not be certified over the region."""

    def __init__(self, system: str, form_index: int, coeff: BaseScalar):
        super().__init__(
            f"undetermined sign for coefficient {scalar_str(coeff)} "
            f"in form {form_index} of {system}"
        )
        self.system = system
        self.form_index = form_index


class IntegralityViolation(ValueError):
    pass


class BoxTooLarge(ValueError):
    pass


# ---------------------------------------------------------------------------
# Forms and systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LinearForm:
    """coeffs . vars + constant >= 0, coefficients aligned with the system."""

    coeffs: tuple[BaseScalar, ...]
    constant: BaseScalar

    def coeff_is_zero(self, i: int) -> bool:
        return scalar_is_zero(self.coeffs[i])

    def is_var_free(self) -> bool:
        return all(scalar_is_zero(c) for c in self.coeffs)

    def drop_var(self, i: int) -> "LinearForm":
        return LinearForm(self.coeffs[:i] + self.coeffs[i + 1 :], self.constant)

    def scale(self, s: BaseScalar) -> "LinearForm":
        return LinearForm(
            tuple(normalize(scalar_mul(s, c)) for c in self.coeffs),
            normalize(scalar_mul(s, self.constant)),
        )

    def add(self, other: "LinearForm") -> "LinearForm":
        return LinearForm(
            tuple(
                normalize(scalar_add(a, b)) for a, b in zip(self.coeffs, other.coeffs)
            ),
            normalize(scalar_add(self.constant, other.constant)),
        )

    def add_const(self, c: BaseScalar) -> "LinearForm":
        return LinearForm(self.coeffs, normalize(scalar_add(self.constant, c)))

    def value_at(self, coords: Sequence[BaseScalar]) -> BaseScalar:
        total = self.constant
        for c, x in zip(self.coeffs, coords):
            if not scalar_is_zero(c) and not scalar_is_zero(x):
                total = scalar_add(total, scalar_mul(c, x))
        return normalize(total)


@dataclass(frozen=True)
class InequalitySystem:
    name: str
    region: Region
    vars: tuple[str, ...]
    forms: tuple[LinearForm, ...]

    def __post_init__(self):
        if len(set(self.vars)) != len(self.vars):
            raise ValueError(f"duplicate variables in {self.name}")
        for f in self.forms:
            if len(f.coeffs) != len(self.vars):
                raise ValueError("form arity mismatch")
            for c in f.coeffs:
                if not scalar_is_b_free(c):
                    raise ValueError(
                        f"variable coefficient {scalar_str(c)} in {self.name} carries B"
                    )

    def var_index(self, var: str) -> int:
        return self.vars.index(var)

    def rename(self, name: str) -> "InequalitySystem":
        return InequalitySystem(name, self.region, self.vars, self.forms)

    def with_forms(self, forms: Iterable[LinearForm]) -> "InequalitySystem":
        return InequalitySystem(self.name, self.region, self.vars, tuple(forms))

    def with_region(self, region: Region) -> "InequalitySystem":
        return InequalitySystem(self.name, region, self.vars, self.forms)

    def add_forms(self, forms: Iterable[LinearForm], suffix: str = "+") -> "InequalitySystem":
        return InequalitySystem(
            self.name + suffix, self.region, self.vars, self.forms + tuple(forms)
        )

    def substitute_base(self, var: str, value: int) -> "InequalitySystem":
        """Fix a base variable to an integer; the system drops one arity level."""
        region = self.region.drop(var)
        forms = tuple(
            LinearForm(
                tuple(substitute_base(c, var, value) for c in f.coeffs),
                substitute_base(f.constant, var, value),
            )
            for f in self.forms
        )
        return InequalitySystem(self.name, region, self.vars, forms)

    def fix_base(self, base_values: dict[str, int]) -> "FixedSystem":
        rows = []
        for f in self.forms:
            coeffs = tuple(eval_scalar(c, base_values) for c in f.coeffs)
            c0 = eval_scalar(f.constant, base_values)
            rows.append((coeffs, c0))
        return FixedSystem(self.name, self.vars, tuple(rows))

    def __str__(self) -> str:
        return system_str(self)


@dataclass(frozen=True)
class FixedSystem:
    """A system with base variables fixed: plain Fraction rows."""

    name: str
    vars: tuple[str, ...]
    rows: tuple[tuple[tuple[Rat, ...], Rat], ...]

    def satisfies(self, point: Sequence[int]) -> bool:
        for coeffs, c0 in self.rows:
            if sum(c * x for c, x in zip(coeffs, point)) + c0 < 0:
                return False
        return True

    def satisfies_ceiled(self, point: Sequence[int]) -> bool:
        for coeffs, c0 in self.rows:
            if sum(c * x for c, x in zip(coeffs, point)) + math.ceil(c0) < 0:
                return False
        return True


def satisfies_ceiled(
    sys: InequalitySystem, point: dict[str, int], base_values: dict[str, int]
) -> bool:
    """Plain satisfaction after replacing every constant by its ceiling."""
    fixed = sys.fix_base(base_values)
    vec = [point[v] for v in sys.vars]
    return fixed.satisfies_ceiled(vec)


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_SYMBOLS = (">=", "<=", "+", "-", "*", "/", "^", "(", ")", ",", ";", ":")


def _tokenize(text: str):
    tokens = []
    line, col, i = 1, 1, 0
    while i < len(text):
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < len(text) and text[i] != "\n":
                i += 1
            continue
        two = text[i : i + 2]
        if two in (">=", "<="):
            tokens.append((two, two, line, col))
            i += 2
            col += 2
            continue
        if ch in "+-*/^(),;:=":
            tokens.append((ch, ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isdigit():
            j = i
            while j < len(text) and text[j].isdigit():
                j += 1
            tokens.append(("int", text[i:j], line, col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                j += 1
            tokens.append(("ident", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(("eof", "", line, col))
    return tokens


class _LinComb:
    """Affine combination of declared variables with scalar coefficients."""

    __slots__ = ("coeffs", "constant")

    def __init__(self, coeffs=None, constant: BaseScalar = ZERO):
        self.coeffs: dict[str, BaseScalar] = coeffs or {}
        self.constant = constant

    @staticmethod
    def of_var(v: str) -> "_LinComb":
        return _LinComb({v: const(1)}, ZERO)

    @staticmethod
    def of_scalar(s: BaseScalar) -> "_LinComb":
        return _LinComb({}, s)

    def is_scalar(self) -> bool:
        return not self.coeffs or all(scalar_is_zero(c) for c in self.coeffs.values())

    def add(self, other: "_LinComb") -> "_LinComb":
        coeffs = dict(self.coeffs)
        for v, c in other.coeffs.items():
            coeffs[v] = scalar_add(coeffs.get(v, ZERO), c)
        return _LinComb(coeffs, scalar_add(self.constant, other.constant))

    def neg(self) -> "_LinComb":
        return _LinComb(
            {v: scalar_neg(c) for v, c in self.coeffs.items()},
            scalar_neg(self.constant),
        )

    def mul_scalar(self, s: BaseScalar) -> "_LinComb":
        return _LinComb(
            {v: scalar_mul(s, c) for v, c in self.coeffs.items()},
            scalar_mul(s, self.constant),
        )


class _Parser:
    def __init__(self, tokens, base_region: Region, var_names: Sequence[str], b_ok: bool):
        self.tokens = tokens
        self.pos = 0
        self.region = base_region
        self.vars = list(var_names)
        self.b_ok = b_ok

    def peek(self):
        return self.tokens[self.pos]

    def take(self, kind=None):
        tok = self.tokens[self.pos]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2], tok[3])
        self.pos += 1
        return tok

    # expr := term (('+'|'-') term)*
    def expr(self) -> _LinComb:
        out = self.term()
        while self.peek()[0] in ("+", "-"):
            op = self.take()[0]
            rhs = self.term()
            out = out.add(rhs if op == "+" else rhs.neg())
        return out

    # term := factor (('*'|'/') factor)*
    def term(self) -> _LinComb:
        out = self.factor()
        while self.peek()[0] in ("*", "/"):
            op, _, line, col = self.take()
            rhs = self.factor()
            if op == "*":
                if out.is_scalar():
                    out = rhs.mul_scalar(out.constant)
                elif rhs.is_scalar():
                    out = out.mul_scalar(rhs.constant)
                else:
                    raise ParseError("product of two variable expressions", line, col)
            else:
                if not rhs.is_scalar():
                    raise ParseError("division by a variable expression", line, col)
                inv = scalar_div(const(1), rhs.constant)
                out = out.mul_scalar(inv)
        return out

    # factor := ('-'|'+') factor | atom ('^' int)?
    def factor(self) -> _LinComb:
        tok = self.peek()
        if tok[0] in ("-", "+"):
            self.take()
            inner = self.factor()
            return inner.neg() if tok[0] == "-" else inner
        out = self.atom()
        while self.peek()[0] == "^":
            _, _, line, col = self.take()
            e = int(self.take("int")[1])
            if not out.is_scalar():
                raise ParseError("power of a variable expression", line, col)
            base = out.constant
            acc = const(1)
            for _ in range(e):
                acc = scalar_mul(acc, base)
            out = _LinComb.of_scalar(acc)
        return out

    def atom(self) -> _LinComb:
        kind, value, line, col = self.take()
        if kind == "int":
            return _LinComb.of_scalar(const(int(value)))
        if kind == "(":
            out = self.expr()
            self.take(")")
            return out
        if kind == "ident":
            if value == "B":
                if not self.b_ok:
                    raise UnknownSymbol("B used without two base variables", line, col)
                return _LinComb.of_scalar(b_symbol())
            if value == "binom":
                return self.binom(line, col)
            if value in self.vars:
                return _LinComb.of_var(value)
            if value in self.region.names:
                return _LinComb.of_scalar(self.base_var_scalar(value))
            raise UnknownSymbol(f"unknown symbol {value!r}", line, col)
        raise ParseError(f"unexpected token {value!r}", line, col)

    def base_var_scalar(self, name: str) -> BaseScalar:
        if self.region.arity == 2:
            p = BiPoly.var_r() if name == "r" else BiPoly.var_k()
            return BiRatB(BiPoly.const(0), p, BiPoly.const(1))
        return UniRat(UniPoly.x(name), UniPoly.const(name, 1))

    def binom(self, line, col) -> _LinComb:
        self.take("(")
        top = self.expr()
        self.take(",")
        bottom = self.expr()
        self.take(")")
        if not top.is_scalar() or not bottom.is_scalar():
            raise ParseError("binom arguments must be base-variable expressions", line, col)
        # binom(r+k, k) is the declared symbol B.
        if self.b_ok:
            rk = scalar_add(self.base_var_scalar("r"), self.base_var_scalar("k"))
            if scalar_is_zero(scalar_sub(top.constant, rk)) and scalar_is_zero(
                scalar_sub(bottom.constant, self.base_var_scalar("k"))
            ):
                return _LinComb.of_scalar(b_symbol())
        # binom(e, m) with a literal m expands to e(e-1)...(e-m+1)/m!.
        if isinstance(bottom.constant, Const) and bottom.constant.value.denominator == 1:
            m = int(bottom.constant.value)
            if m < 0:
                raise ParseError("binom with negative literal index", line, col)
            acc = const(Rat(1, math.factorial(m)))
            for i in range(m):
                acc = scalar_mul(acc, scalar_sub(top.constant, const(i)))
            return _LinComb.of_scalar(acc)
        raise ParseError("unsupported binom form", line, col)


@dataclass
class ParsedFile:
    region: Region
    systems: dict[str, InequalitySystem]
    order: list[str]


def parse_file(text: str) -> ParsedFile:
    """Parse the full DSL: a base header followed by named systems."""
    tokens = _tokenize(text)
    pos = 0

    def peek():
        return tokens[pos]

    def take(kind=None, value=None):
        nonlocal pos
        tok = tokens[pos]
        if kind is not None and tok[0] != kind:
            raise ParseError(f"expected {kind!r}, found {tok[1]!r}", tok[2], tok[3])
        if value is not None and tok[1] != value:
            raise ParseError(f"expected {value!r}, found {tok[1]!r}", tok[2], tok[3])
        pos += 1
        return tok

    names: list[str] = []
    lowers: list[int] = []
    b_declared = False
    if peek()[0] == "ident" and peek()[1] == "base":
        take()
        while True:
            names.append(take("ident")[1])
            take(">=")
            sign = 1
            if peek()[0] == "-":
                take()
                sign = -1
            lowers.append(sign * int(take("int")[1]))
            if peek()[0] == ",":
                take()
                continue
            break
        if peek()[0] == ";":
            take()
            if peek()[0] == "ident" and peek()[1] == "binom":
                take()
                take("ident", "B")
                take("=")
                take("(")
                take("ident", "r")
                take("+")
                take("ident", "k")
                take(",")
                take("ident", "k")
                take(")")
                b_declared = True
        if len(names) == 2 and tuple(names) != BASE_PAIR:
            tok = peek()
            raise ParseError("two base variables must be named r, k", tok[2], tok[3])
    region = Region(tuple(names), tuple(lowers))
    b_ok = region.arity == 2

    systems: dict[str, InequalitySystem] = {}
    order: list[str] = []
    while peek()[0] != "eof":
        take("ident", "system")
        name = take("ident")[1]
        take(":")
        take("ident", "vars")
        var_names: list[str] = []
        while peek()[0] == "ident":
            var_names.append(take("ident")[1])
        take(";")
        forms: list[LinearForm] = []
        parser = _Parser(tokens, region, var_names, b_ok)
        parser.pos = pos
        while parser.peek()[0] not in ("eof",) and not (
            parser.peek()[0] == "ident" and parser.peek()[1] == "system"
        ):
            lhs = parser.expr()
            op = parser.take()
            if op[0] not in (">=", "<="):
                raise ParseError(f"expected comparison, found {op[1]!r}", op[2], op[3])
            rhs = parser.expr()
            parser.take(";")
            comb = lhs.add(rhs.neg()) if op[0] == ">=" else rhs.add(lhs.neg())
            coeffs = tuple(
                normalize(comb.coeffs.get(v, ZERO)) for v in var_names
            )
            forms.append(LinearForm(coeffs, normalize(comb.constant)))
        pos = parser.pos
        systems[name] = InequalitySystem(name, region, tuple(var_names), tuple(forms))
        order.append(name)
    return ParsedFile(region, systems, order)


def parse_system(text: str, name: Optional[str] = None) -> InequalitySystem:
    parsed = parse_file(text)
    if name is None:
        if len(parsed.order) != 1:
            raise ValueError("text defines more than one system; pass a name")
        name = parsed.order[0]
    return parsed.systems[name]


def parse_scalar_text(text: str, region: Optional[Region] = None) -> BaseScalar:
    """Parse a standalone scalar expression over r, k and B (or one variable).

    Without an explicit region, the base variables are inferred from the
    identifiers (two base variables must be named r and k)."""
    tokens = _tokenize(text)
    if region is None:
        idents = {t[1] for t in tokens if t[0] == "ident"} - {"B", "binom"}
        if len(idents) == 1 and not idents <= set(BASE_PAIR):
            region = Region((idents.pop(),), (0,))
        elif idents <= set(BASE_PAIR):
            region = Region(BASE_PAIR, (0, 0))
        else:
            raise ValueError(f"too many variables for a scalar: {sorted(idents)}")
    parser = _Parser(tokens, region, [], region.arity == 2)
    out = parser.expr()
    parser.take("eof")
    return normalize(out.constant)


# ---------------------------------------------------------------------------
# Printing
# ---------------------------------------------------------------------------


def _coeff_term(c: BaseScalar, var: str) -> str:
    if isinstance(c, Const):
        if c.value == 1:
            return var
        if c.value == -1:
            return f"-{var}"
        if c.value.denominator == 1:
            return f"{c.value}*{var}"
        return f"({c.value.numerator}/{c.value.denominator})*{var}"
    return f"{scalar_str(c)}*{var}"


def form_str(form: LinearForm, vars: Sequence[str]) -> str:
    parts = []
    for c, v in zip(form.coeffs, vars):
        if scalar_is_zero(c):
            continue
        parts.append(_coeff_term(c, v))
    if not scalar_is_zero(form.constant) or not parts:
        parts.append(scalar_str(form.constant))
    body = " + ".join(parts)
    return f"{body} >= 0"


def system_str(sys: InequalitySystem) -> str:
    lines = [f"system {sys.name}:", "  vars " + " ".join(sys.vars) + ";"]
    for f in sys.forms:
        lines.append(f"  {form_str(f, sys.vars)};")
    return "\n".join(lines)


def header_str(region: Region) -> str:
    if region.arity == 0:
        return ""
    bounds = ", ".join(f"{n} >= {b}" for n, b in zip(region.names, region.lower))
    if region.arity == 2:
        return f"base {bounds}; binom B = (r+k, k)"
    return f"base {bounds}"


def file_str(region: Region, systems: Sequence[InequalitySystem]) -> str:
    parts = [header_str(region)] if region.arity else []
    parts.extend(system_str(s) for s in systems)
    return "\n".join(parts) + "\n"


# ---------------------------------------------------------------------------
# Elimination
# ---------------------------------------------------------------------------


def _dedupe_and_prune(
    forms: list[LinearForm], region: Region, oracle: SignOracle
) -> list[LinearForm]:
    """Drop redundant forms.

    Removed: exact duplicates; variable-free forms with certified-nonnegative
    constant (vacuous under both plain and ceiled reading); and forms
    dominated by another form with the identical coefficient vector and a
    certified-smaller constant (the ceiling is monotone, so the dominating
    form implies the dropped one at every integer point).
    """
    out: list[LinearForm] = []
    seen = set()
    by_coeffs: dict[tuple, int] = {}
    for f in forms:
        if f in seen:
            continue
        seen.add(f)
        if f.is_var_free():
            v = oracle.sign(f.constant, region).verdict
            if v.at_least_nonneg():
                continue
            out.append(f)
            continue
        idx = by_coeffs.get(f.coeffs)
        if idx is None:
            by_coeffs[f.coeffs] = len(out)
            out.append(f)
            continue
        kept = out[idx]
        diff = oracle.sign(
            normalize(scalar_sub(f.constant, kept.constant)), region
        ).verdict
        if diff.at_least_nonneg():
            continue  # f is weaker; the kept form implies it
        if diff.at_most_nonpos():
            out[idx] = f  # f is stronger; it implies the kept form
            continue
        out.append(f)  # incomparable constants: keep both
    return out


def eliminate(
    sys: InequalitySystem,
    var: str,
    oracle: SignOracle,
    integer: bool,
) -> InequalitySystem:
    """Project out ``var``. Real mode is an exact projection; integer mode
    subtracts the (b-1)(d-1) correction and is sound one direction only."""
    idx = sys.var_index(var)
    uppers: list[tuple[BaseScalar, LinearForm]] = []  # (b_i, rest): b_i n <= rest
    lowers: list[tuple[BaseScalar, LinearForm]] = []  # (d_j, rest): d_j n >= -rest
    passthrough: list[LinearForm] = []
    for fi, f in enumerate(sys.forms):
        c = f.coeffs[idx]
        if scalar_is_zero(c):
            passthrough.append(f.drop_var(idx))
            continue
        verdict = oracle.sign(c, sys.region).verdict
        rest = LinearForm(
            f.coeffs[:idx] + f.coeffs[idx + 1 :], f.constant
        )
        if verdict == SignVerdict.POSITIVE:
            lowers.append((c, rest))
        elif verdict == SignVerdict.NEGATIVE:
            uppers.append((normalize(scalar_neg(c)), rest))
        elif verdict == SignVerdict.ZERO:
            passthrough.append(rest)
        else:
            raise UndeterminedCoefficientSign(sys.name, fi, c)
    new_forms = list(passthrough)
    one = const(1)
    for b_i, rest_u in uppers:
        for d_j, rest_l in lowers:
            cross = rest_u.scale(d_j).add(rest_l.scale(b_i))
            if integer:
                corr = scalar_mul(scalar_sub(b_i, one), scalar_sub(d_j, one))
                cross = cross.add_const(normalize(scalar_neg(corr)))
            new_forms.append(cross)
    new_vars = sys.vars[:idx] + sys.vars[idx + 1 :]
    pruned = _dedupe_and_prune(new_forms, sys.region, oracle)
    return InequalitySystem(sys.name, sys.region, new_vars, tuple(pruned))


def eliminate_real(sys: InequalitySystem, var: str, oracle: SignOracle) -> InequalitySystem:
    return eliminate(sys, var, oracle, integer=False)


def eliminate_integer(sys: InequalitySystem, var: str, oracle: SignOracle) -> InequalitySystem:
    return eliminate(sys, var, oracle, integer=True)


@dataclass
class ElimChain:
    """Intermediate systems of an iterated integer elimination.

    ``stages[i]`` is the system before eliminating ``order[i]``; ``final`` is
    the fully eliminated system. The chain is what witness reconstruction
    walks backwards.
    """

    order: list[str]
    stages: list[InequalitySystem]
    final: InequalitySystem


def eliminate_all_integer(
    sys: InequalitySystem, keep: Sequence[str], oracle: SignOracle
) -> ElimChain:
    """Repeated integer elimination down to ``keep``, in reverse declaration
    order. ``keep`` must be a prefix of the declaration order."""
    keep = tuple(keep)
    if sys.vars[: len(keep)] != keep:
        raise ValueError(
            f"keep set {keep} is not a prefix of declaration order {sys.vars}"
        )
    order: list[str] = []
    stages: list[InequalitySystem] = []
    current = sys
    for var in reversed(sys.vars[len(keep) :]):
        order.append(var)
        stages.append(current)
        current = eliminate_integer(current, var, oracle)
    return ElimChain(order, stages, current)


def extend_point(
    chain: ElimChain, assignment: dict[str, int], base_values: dict[str, int]
) -> Optional[dict[str, int]]:
    """Rebuild eliminated variables for a point of the final system.

    Walks the chain backwards, picking for each variable the smallest integer
    inside its ceiled bound interval. Succeeds whenever the input point
    satisfies the final system with ceiled constants; the caller should verify
    the returned assignment against the original system.
    """
    values = dict(assignment)
    for i in range(len(chain.order) - 1, -1, -1):
        var = chain.order[i]
        stage = chain.stages[i]
        idx = stage.var_index(var)
        lo: Optional[int] = None
        hi: Optional[int] = None
        for f in stage.forms:
            a = eval_scalar(f.coeffs[idx], base_values)
            if a == 0:
                continue
            rest = Rat(math.ceil(eval_scalar(f.constant, base_values)))
            for j, v in enumerate(stage.vars):
                if j != idx:
                    rest += eval_scalar(f.coeffs[j], base_values) * values[v]
            bound = -rest / a
            if a > 0:
                b = math.ceil(bound)
                lo = b if lo is None else max(lo, b)
            else:
                b = math.floor(bound)
                hi = b if hi is None else min(hi, b)
        if lo is not None and hi is not None and lo > hi:
            return None
        values[var] = lo if lo is not None else (hi if hi is not None else 0)
    return values


# ---------------------------------------------------------------------------
# Integer points, ceiled satisfaction, witness search
# ---------------------------------------------------------------------------


def _fixed_rows(
    sys: InequalitySystem, base_values: dict[str, int]
) -> list[tuple[tuple[Rat, ...], Rat]]:
    return list(sys.fix_base(base_values).rows)


def _bounds_for_level(
    rows: list[tuple[tuple[Rat, ...], Rat]],
    prefix: Sequence[int],
    level: int,
    nvars: int,
) -> tuple[Optional[Rat], Optional[Rat], bool]:
    """Bounds for variable ``level`` given assigned prefix; also reports an
    immediate contradiction among forms fully determined by the prefix."""
    lo: Optional[Rat] = None
    hi: Optional[Rat] = None
    for coeffs, c0 in rows:
        if any(coeffs[j] != 0 for j in range(level + 1, nvars)):
            continue
        partial = c0 + sum(coeffs[j] * prefix[j] for j in range(level))
        a = coeffs[level]
        if a == 0:
            if partial < 0:
                return None, None, False
            continue
        bound = -partial / a
        if a > 0:
            lo = bound if lo is None else max(lo, bound)
        else:
            hi = bound if hi is None else min(hi, bound)
    return lo, hi, True


def enumerate_integer_points(
    sys: InequalitySystem,
    base_values: dict[str, int],
    box: dict[str, tuple[int, int]],
    cap: int = 10**8,
) -> list[tuple[int, ...]]:
    """All integer points in the box satisfying the system (plain reading)."""
    cells = 1
    for v in sys.vars:
        lo, hi = box[v]
        cells *= max(0, hi - lo + 1)
    if cells > cap:
        raise BoxTooLarge(f"{cells} cells exceeds cap {cap}")
    rows = _fixed_rows(sys, base_values)
    nvars = len(sys.vars)
    fixed = sys.fix_base(base_values)
    out: list[tuple[int, ...]] = []

    def rec(prefix: list[int], level: int):
        if level == nvars:
            if fixed.satisfies(prefix):
                out.append(tuple(prefix))
            return
        lo_f, hi_f, ok = _bounds_for_level(rows, prefix, level, nvars)
        if not ok:
            return
        lo, hi = box[sys.vars[level]]
        if lo_f is not None:
            lo = max(lo, math.ceil(lo_f))
        if hi_f is not None:
            hi = min(hi, math.floor(hi_f))
        for x in range(lo, hi + 1):
            prefix.append(x)
            rec(prefix, level + 1)
            prefix.pop()

    rec([], 0)
    return sorted(out)


def find_ceiled_witness(
    sys: InequalitySystem,
    fixed_vals: dict[str, int],
    base_values: dict[str, int],
    box: dict[str, tuple[int, int]],
    cap: int = 10**8,
) -> Optional[dict[str, int]]:
    """Search the box for an extension of ``fixed_vals`` satisfying the system
    with ceiled constants; exhaustive within the box."""
    free = [v for v in sys.vars if v not in fixed_vals]
    cells = 1
    for v in free:
        lo, hi = box[v]
        cells *= max(0, hi - lo + 1)
    if cells > cap:
        raise BoxTooLarge(f"{cells} cells exceeds cap {cap}")
    rows = []
    for coeffs, c0 in _fixed_rows(sys, base_values):
        shift = Rat(math.ceil(c0))
        for v, val in fixed_vals.items():
            shift += coeffs[sys.var_index(v)] * val
        rows.append((tuple(coeffs[sys.var_index(v)] for v in free), shift))
    nvars = len(free)

    def rec(prefix: list[int], level: int) -> Optional[dict[str, int]]:
        if level == nvars:
            return dict(zip(free, prefix), **fixed_vals)
        lo_f, hi_f, ok = _bounds_for_level(rows, prefix, level, nvars)
        if not ok:
            return None
        lo, hi = box[free[level]]
        if lo_f is not None:
            lo = max(lo, math.ceil(lo_f))
        if hi_f is not None:
            hi = min(hi, math.floor(hi_f))
        for x in range(lo, hi + 1):
            prefix.append(x)
            found = rec(prefix, level + 1)
            prefix.pop()
            if found is not None:
                return found
        return None

    return rec([], 0)


def derive_box(
    sys: InequalitySystem,
    base_values: dict[str, int],
    slack: int = 2,
    fallback: int = 64,
    fixed: Optional[dict[str, int]] = None,
) -> dict[str, tuple[int, int]]:
    """Integer box from the real Fourier-Motzkin projections, plus slack.

    ``fixed`` pins some variables to integers before projecting. Unbounded
    directions fall back to a symmetric window of ``fallback``.
    """
    all_rows = _fixed_rows(sys, base_values)
    fixed = fixed or {}
    if fixed:
        folded = []
        keep_idx = [i for i, v in enumerate(sys.vars) if v not in fixed]
        for coeffs, c0 in all_rows:
            shift = c0 + sum(
                coeffs[sys.var_index(v)] * val for v, val in fixed.items()
            )
            folded.append((tuple(coeffs[i] for i in keep_idx), shift))
        rows = folded
        var_names = [sys.vars[i] for i in keep_idx]
    else:
        rows = all_rows
        var_names = list(sys.vars)
    nvars = len(var_names)
    out = {}
    for i, v in enumerate(var_names):
        # real FM elimination of all other variables, numerically
        work = [((coeffs[i],), c0, coeffs[:i] + coeffs[i + 1 :]) for coeffs, c0 in rows]
        other = nvars - 1
        for _level in range(other):
            ups, downs, keep = [], [], []
            for (ai,), c0, rest in work:
                a = rest[0]
                tail = rest[1:]
                if a == 0:
                    keep.append(((ai,), c0, tail))
                elif a > 0:
                    downs.append((a, ai, c0, tail))
                else:
                    ups.append((-a, ai, c0, tail))
            for bu, aiu, cu, tu in ups:
                for dl, ail, cl, tl in downs:
                    keep.append(
                        (
                            (dl * aiu + bu * ail,),
                            dl * cu + bu * cl,
                            tuple(dl * x + bu * y for x, y in zip(tu, tl)),
                        )
                    )
            work = keep
        lo: Optional[Rat] = None
        hi: Optional[Rat] = None
        feasible = True
        for (a,), c0, _ in work:
            if a == 0:
                if c0 < 0:
                    feasible = False
                continue
            bound = -c0 / a
            if a > 0:
                lo = bound if lo is None else max(lo, bound)
            else:
                hi = bound if hi is None else min(hi, bound)
        if not feasible:
            out[v] = (0, -1)
            continue
        lo_i = math.ceil(lo) - slack if lo is not None else -fallback
        hi_i = math.floor(hi) + slack if hi is not None else fallback
        out[v] = (lo_i, hi_i)
    return out


# ---------------------------------------------------------------------------
# Integrality validation
# ---------------------------------------------------------------------------


@dataclass
class IntegralityReport:
    checked: int
    violations: list[dict]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_integrality(
    sys: InequalitySystem, sample_count: int = 50, seed: int = 0
) -> IntegralityReport:
    """Sample integer base points and check every variable coefficient is an
    integer there. Constants are exempt."""
    rng = random.Random(seed)
    region = sys.region
    violations = []
    checked = 0
    for _ in range(sample_count):
        point = {
            n: rng.randint(lo, lo + 40) for n, lo in zip(region.names, region.lower)
        }
        for fi, f in enumerate(sys.forms):
            for vi, c in enumerate(f.coeffs):
                if isinstance(c, Const):
                    value = c.value
                else:
                    value = eval_scalar(c, point)
                checked += 1
                if value.denominator != 1:
                    violations.append(
                        {
                            "system": sys.name,
                            "form": fi,
                            "var": sys.vars[vi],
                            "coefficient": scalar_str(c),
                            "point": dict(point),
                            "value": str(value),
                        }
                    )
    return IntegralityReport(checked, violations)
