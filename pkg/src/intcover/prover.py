"""The covers driver: elimination + coverage + case splits, plus proof plans,
counterexample search, and the certificate log.

``covers`` mirrors the one-sided method faithfully: it proves that every
integer point of the third system extends to an integer point of the first or
second system with constants rounded up, uniformly over the base region.
``NotProven`` means exactly that the method failed; it never asserts that
coverage is false (an attached falsification search distinguishes genuine
counterexamples from method incompleteness).
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Optional, Sequence

from .exactalg import eval_scalar, scalar_str
from .geom import (
    CoverageVerdict,
    Polyhedron,
    SignUndetermined,
    Unbounded,
    covered_by_two,
)
from .linsys import (
    ElimChain,
    InequalitySystem,
    UndeterminedCoefficientSign,
    derive_box,
    eliminate_all_integer,
    enumerate_integer_points,
    extend_point,
    file_str,
    find_ceiled_witness,
    parse_file,
    satisfies_ceiled,
    system_str,
    validate_integrality,
)
from .signcert import Region, SignOracle, replay_sign


class IllFormedQuery(ValueError):
    pass


class NoPlanFound(RuntimeError):
    pass


class VerdictKind(Enum):
    PROVEN = "Proven"
    NOT_PROVEN = "NotProven"
    UNDETERMINED = "Undetermined"


EXIT_CODES = {
    VerdictKind.PROVEN: 0,
    VerdictKind.NOT_PROVEN: 1,
    VerdictKind.UNDETERMINED: 2,
}


@dataclass
class CoversConfig:
    strip_cap: int = 64  # fixed-base case-split width per base variable
    sign_strip_cap: int = 64  # strip width inside the sign engine
    box_cap: int = 10**8
    seed: int = 0
    workers: int = 1
    enum_diagnosis: bool = True
    validate: bool = True


class CertificateLog:
    """Append-only, JSON-serializable trace of every check behind a verdict."""

    SCHEMA = "intcover-certlog/1"

    def __init__(self, meta: Optional[dict] = None):
        self.meta = meta or {}
        self.entries: list[dict] = []
        self.timings: dict[str, float] = {}
        self._t0 = time.monotonic()

    def add(self, kind: str, **payload) -> dict:
        entry = {"kind": kind, **payload}
        self.entries.append(entry)
        return entry

    def time_mark(self, label: str):
        self.timings[label] = round(time.monotonic() - self._t0, 3)

    def to_json(self, verdict: Optional[str] = None) -> dict:
        return {
            "schema": self.SCHEMA,
            "meta": self.meta,
            "verdict": verdict,
            "entries": self.entries,
            "timings": self.timings,
        }

    def dump(self, path: str, verdict: Optional[str] = None):
        with open(path, "w") as fh:
            json.dump(self.to_json(verdict), fh, indent=1, sort_keys=False)
            fh.write("\n")


@dataclass
class Verdict:
    kind: VerdictKind
    log: CertificateLog

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.kind]


@dataclass
class CoversQuery:
    x: InequalitySystem
    y: InequalitySystem
    z: InequalitySystem
    region: Region

    def validate(self):
        nz = len(self.z.vars)
        for s in (self.x, self.y):
            if s.vars[:nz] != self.z.vars:
                raise IllFormedQuery(
                    f"variables of {s.name} must begin with those of "
                    f"{self.z.name}: {s.vars} vs {self.z.vars}"
                )
        if self.region.arity != len(self.region.names):
            raise IllFormedQuery("malformed region")


# ---------------------------------------------------------------------------
# The covers pipeline
# ---------------------------------------------------------------------------


def _attach_region(sys: InequalitySystem, region: Region) -> InequalitySystem:
    return sys.with_region(region)


def _symbolic_attempt(
    x: InequalitySystem,
    y: InequalitySystem,
    z: InequalitySystem,
    region: Region,
    oracle: SignOracle,
    log: CertificateLog,
    label: str,
) -> tuple[str, Optional[ElimChain], Optional[ElimChain]]:
    """One elimination + coverage attempt over the given region.

    Returns one of "proven", "refuted", "undetermined", "unbounded".
    """
    x, y, z = (_attach_region(s, region) for s in (x, y, z))
    try:
        x_chain = eliminate_all_integer(x, z.vars, oracle)
        y_chain = eliminate_all_integer(y, z.vars, oracle)
    except UndeterminedCoefficientSign as e:
        log.add("elimination_abort", scope=label, reason=str(e))
        return "undetermined", None, None
    for sys_, chain in ((x, x_chain), (y, y_chain)):
        log.add(
            "elimination",
            scope=label,
            system=sys_.name,
            keep=list(z.vars),
            input=file_str(region, [sys_]),
            output=file_str(region, [chain.final]),
        )
    try:
        cov = covered_by_two(Polyhedron(z), x_chain.final, y_chain.final, oracle)
    except Unbounded as e:
        log.add("coverage", scope=label, verdict="Unbounded", reason=str(e))
        return "unbounded", x_chain, y_chain
    except SignUndetermined as e:
        log.add("coverage", scope=label, verdict="Undetermined", reason=str(e))
        return "undetermined", x_chain, y_chain
    log.add(
        "coverage",
        scope=label,
        z=file_str(region, [z]),
        c1=file_str(region, [x_chain.final]),
        c2=file_str(region, [y_chain.final]),
        region={"names": list(region.names), "lower": list(region.lower)},
        verdict=cov.verdict.value,
        certificate=cov.certificate,
    )
    if cov.verdict == CoverageVerdict.PROVEN:
        return "proven", x_chain, y_chain
    if cov.verdict == CoverageVerdict.REFUTED:
        return "refuted", x_chain, y_chain
    return "undetermined", x_chain, y_chain


def _falsify_fixed(
    x: InequalitySystem,
    y: InequalitySystem,
    z: InequalitySystem,
    cfg: CoversConfig,
    log: CertificateLog,
    label: str,
) -> Optional[dict]:
    """Exhaustive counterexample search at a fully fixed base.

    Returns a z-point with no ceiled extension into x nor y, or None; the
    answer is recorded either way.
    """
    box = derive_box(z, {}, slack=0)
    try:
        z_points = enumerate_integer_points(z, {}, box, cap=cfg.box_cap)
    except Exception as e:  # noqa: BLE001 - recorded, not fatal
        log.add("falsify", scope=label, error=str(e))
        return None
    for pt in z_points:
        fixed_vals = dict(zip(z.vars, pt))
        try:
            x_box = derive_box(x, {}, slack=2, fixed=fixed_vals)
            wx = find_ceiled_witness(x, fixed_vals, {}, x_box, cap=cfg.box_cap)
            wy = None
            if wx is None:
                y_box = derive_box(y, {}, slack=2, fixed=fixed_vals)
                wy = find_ceiled_witness(y, fixed_vals, {}, y_box, cap=cfg.box_cap)
        except Exception as e:  # noqa: BLE001 - diagnosis is best effort
            log.add("falsify", scope=label, error=str(e))
            return None
        if wx is None and wy is None:
            log.add(
                "falsify",
                scope=label,
                z_box={v: list(b) for v, b in box.items()},
                counterexample=dict(fixed_vals),
            )
            return dict(fixed_vals)
    log.add(
        "falsify",
        scope=label,
        z_box={v: list(b) for v, b in box.items()},
        points_checked=len(z_points),
        counterexample=None,
        diagnosis="method-incomplete, no integer counterexample found in box",
    )
    return None


def _covers_region(
    x: InequalitySystem,
    y: InequalitySystem,
    z: InequalitySystem,
    region: Region,
    cfg: CoversConfig,
    oracle: SignOracle,
    log: CertificateLog,
    label: str,
) -> VerdictKind:
    status, _, _ = _symbolic_attempt(x, y, z, region, oracle, log, label)
    if status == "proven":
        return VerdictKind.PROVEN
    if status == "unbounded":
        return VerdictKind.NOT_PROVEN
    if region.arity == 0:
        # fixed base: the coverage check is decisive, so the method failed
        if cfg.enum_diagnosis:
            _falsify_fixed(x, y, z, cfg, log, label)
        return VerdictKind.NOT_PROVEN
    # split the last base variable: fixed values with a rising symbolic tail
    var = region.names[-1]
    lo = region.bound_of(var)
    for value in range(lo, lo + cfg.strip_cap + 1):
        sub_region = region.drop(var)
        sub_label = f"{label}/{var}={value}"
        branch = _covers_region(
            x.substitute_base(var, value),
            y.substitute_base(var, value),
            z.substitute_base(var, value),
            sub_region,
            cfg,
            oracle,
            log,
            sub_label,
        )
        log.add("branch", scope=label, var=var, value=value, verdict=branch.value)
        if branch != VerdictKind.PROVEN:
            return branch
        tail_region = region.raise_bound(var, value + 1)
        tail_label = f"{label}/{var}>={value + 1}"
        status, _, _ = _symbolic_attempt(x, y, z, tail_region, oracle, log, tail_label)
        if status == "proven":
            log.add(
                "branch", scope=label, var=var, tail_from=value + 1, verdict="Proven"
            )
            return VerdictKind.PROVEN
    log.add("cap", scope=label, var=var, cap=cfg.strip_cap)
    return VerdictKind.UNDETERMINED


def covers(query: CoversQuery, cfg: Optional[CoversConfig] = None) -> Verdict:
    """Attempt to prove the coverage claim over the whole base region."""
    cfg = cfg or CoversConfig()
    query.validate()
    log = CertificateLog(
        {
            "query": {
                "x": system_str(query.x),
                "y": system_str(query.y),
                "z": system_str(query.z),
                "region": {
                    "names": list(query.region.names),
                    "lower": list(query.region.lower),
                },
            },
            "config": {"strip_cap": cfg.strip_cap, "seed": cfg.seed},
        }
    )
    oracle = SignOracle(strip_cap=cfg.sign_strip_cap)
    oracle.listeners.append(lambda e: log.add("sign", **e))
    if cfg.validate:
        for s in (query.x, query.y, query.z):
            report = validate_integrality(
                _attach_region(s, query.region), 25, seed=cfg.seed
            )
            log.add(
                "integrality",
                system=s.name,
                checked=report.checked,
                violations=report.violations,
            )
            if not report.ok:
                raise IllFormedQuery(
                    f"non-integer variable coefficient in {s.name}: "
                    f"{report.violations[0]}"
                )
    kind = _covers_region(
        query.x, query.y, query.z, query.region, cfg, oracle, log, "root"
    )
    log.time_mark("total")
    log.add("verdict", value=kind.value)
    return Verdict(kind, log)


def falsify(
    query: CoversQuery,
    base_values: dict[str, int],
    box: dict[str, tuple[int, int]],
    cfg: Optional[CoversConfig] = None,
) -> Optional[dict]:
    """Counterexample search at a fixed base within an explicit box: returns a
    z-point with no ceiled extension into x nor y, or None."""
    cfg = cfg or CoversConfig()
    x = query.x
    y = query.y
    z = query.z
    for var, value in base_values.items():
        x = x.substitute_base(var, value)
        y = y.substitute_base(var, value)
        z = z.substitute_base(var, value)
    z_box = {v: box[v] for v in z.vars}
    z_points = enumerate_integer_points(z, {}, z_box, cap=cfg.box_cap)
    x_box = {v: box[v] for v in x.vars}
    y_box = {v: box[v] for v in y.vars}
    for pt in z_points:
        fixed_vals = dict(zip(z.vars, pt))
        if find_ceiled_witness(x, fixed_vals, {}, x_box, cap=cfg.box_cap) is not None:
            continue
        if find_ceiled_witness(y, fixed_vals, {}, y_box, cap=cfg.box_cap) is not None:
            continue
        return fixed_vals
    return None


# ---------------------------------------------------------------------------
# Brute-force slice verification (plan step)
# ---------------------------------------------------------------------------


def verify_slice_by_enumeration(
    targets: Sequence[InequalitySystem],
    z: InequalitySystem,
    cfg: CoversConfig,
    log: CertificateLog,
    label: str,
    oracle: Optional[SignOracle] = None,
) -> VerdictKind:
    """Fully fixed base: check every integer z-point completes into some
    target, combining the one-sided eliminated test with direct witness
    search. Sound and complete within the derived boxes."""
    oracle = oracle or SignOracle()
    assert z.region.arity == 0
    box = derive_box(z, {}, slack=0)
    z_points = enumerate_integer_points(z, {}, box, cap=cfg.box_cap)
    chains = []
    for t in targets:
        try:
            chains.append(eliminate_all_integer(t, z.vars, oracle))
        except UndeterminedCoefficientSign:
            chains.append(None)
    t_boxes = [derive_box(t, {}, slack=2) for t in targets]
    failed = []
    for pt in z_points:
        fixed_vals = dict(zip(z.vars, pt))
        ok = False
        for t, chain, t_box in zip(targets, chains, t_boxes):
            if chain is not None and satisfies_ceiled(chain.final, fixed_vals, {}):
                witness = extend_point(chain, dict(fixed_vals), {})
                if witness is not None and satisfies_ceiled(t, witness, {}):
                    ok = True
                    break
            w = find_ceiled_witness(t, fixed_vals, {}, t_box, cap=cfg.box_cap)
            if w is not None:
                ok = True
                break
        if not ok:
            failed.append(fixed_vals)
    log.add(
        "brute_force",
        scope=label,
        z=system_str(z),
        targets=[t.name for t in targets],
        box={v: list(b) for v, b in box.items()},
        points=len(z_points),
        failures=failed,
    )
    return VerdictKind.PROVEN if not failed else VerdictKind.NOT_PROVEN


# ---------------------------------------------------------------------------
# Proof plans
# ---------------------------------------------------------------------------
#
# A plan is a tree whose leaves prove slices of the full claim:
#   {"kind": "covers", "x": name, "y": name}
#   {"kind": "split_base", "var": v, "values": [..], "child": node,
#    "children": {value: node, ...}, "tail": node}
#   {"kind": "split_cut", "expr": text, "ge": node, "lt": node}
#   {"kind": "brute_force", "targets": [names]}
#   {"kind": "exclusion_patch", ...}   (executed by a registered handler)
# Scope coverage is structural: split_base values must be the contiguous run
# starting at the region lower bound, with the tail picking up the rest; the
# two split_cut children complement each other exactly on integers.


@dataclass
class ProofPlan:
    name: str
    z: str
    node: dict
    systems: dict[str, InequalitySystem]
    region: Region

    @staticmethod
    def from_text(text: str) -> "ProofPlan":
        dsl, _, plan_part = text.partition("plan:")
        if not plan_part.strip():
            raise ValueError("missing plan: section")
        parsed = parse_file(dsl)
        spec = json.loads(plan_part)
        return ProofPlan(
            name=spec["name"],
            z=spec["z"],
            node=spec["node"],
            systems=parsed.systems,
            region=parsed.region,
        )

    def to_text(self) -> str:
        ordered = sorted(self.systems)
        dsl = file_str(self.region, [self.systems[n] for n in ordered])
        plan = json.dumps({"name": self.name, "z": self.z, "node": self.node}, indent=1)
        return dsl + "plan:\n" + plan + "\n"

    def validate_structure(self):
        _validate_node(self.node, self.region, self.systems, self.z)


def _validate_node(node: dict, region: Region, systems: dict, z_name: str):
    kind = node["kind"]
    if kind == "covers":
        for key in ("x", "y"):
            if node[key] not in systems:
                raise ValueError(f"plan references unknown system {node[key]!r}")
    elif kind == "split_base":
        var = node["var"]
        if var not in region.names:
            raise ValueError(f"split on unknown base variable {var!r}")
        values = node["values"]
        lo = region.bound_of(var)
        if values != list(range(lo, lo + len(values))):
            raise ValueError(
                f"split values {values} must be contiguous from the bound {lo}"
            )
        child = node.get("child")
        children = node.get("children", {})
        for v in values:
            sub = children.get(str(v), child)
            if sub is None:
                raise ValueError(f"no child for {var}={v}")
            _validate_node(sub, region.drop(var), systems, z_name)
        tail = node["tail"]
        tail_lo = lo + len(values)
        _validate_node(tail, region.raise_bound(var, tail_lo), systems, z_name)
    elif kind == "split_cut":
        _validate_node(node["ge"], region, systems, z_name)
        _validate_node(node["lt"], region, systems, z_name)
    elif kind == "brute_force":
        if region.arity != 0:
            raise ValueError("brute_force step requires a fully fixed base")
        for t in node["targets"]:
            if t not in systems:
                raise ValueError(f"plan references unknown system {t!r}")
    elif kind == "exclusion_patch":
        pass  # validated by its handler
    else:
        raise ValueError(f"unknown plan node kind {kind!r}")


@dataclass
class PlanReport:
    kind: VerdictKind
    log: CertificateLog
    steps: list[dict] = field(default_factory=list)

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.kind]


PatchHandler = Callable[..., VerdictKind]
_PATCH_HANDLERS: dict[str, PatchHandler] = {}


def register_patch_handler(name: str, handler: PatchHandler):
    _PATCH_HANDLERS[name] = handler


def run_plan(
    plan: ProofPlan,
    cfg: Optional[CoversConfig] = None,
    log: Optional[CertificateLog] = None,
    checkpoint: Optional["Checkpoint"] = None,
) -> PlanReport:
    """Execute a proof plan; Proven only when every branch closes."""
    cfg = cfg or CoversConfig()
    plan.validate_structure()
    log = log or CertificateLog({"plan": plan.name})
    report = PlanReport(VerdictKind.PROVEN, log)

    def substituted(name: str, subs: list[tuple[str, int]]) -> InequalitySystem:
        sys_ = plan.systems[name]
        for var, value in subs:
            sys_ = sys_.substitute_base(var, value)
        return sys_

    def run_node(
        node: dict,
        region: Region,
        subs: list[tuple[str, int]],
        z_sys: InequalitySystem,
        label: str,
    ) -> VerdictKind:
        if checkpoint is not None:
            done = checkpoint.lookup(label)
            if done is not None:
                log.add("checkpoint", scope=label, verdict=done)
                return VerdictKind(done)
        kind = node["kind"]
        t0 = time.monotonic()
        if kind == "covers":
            x = substituted(node["x"], subs).with_region(region)
            y = substituted(node["y"], subs).with_region(region)
            query = CoversQuery(x, y, z_sys.with_region(region), region)
            out = covers(query, cfg)
            log.entries.extend(out.log.entries)
            result = out.kind
        elif kind == "split_base":
            var = node["var"]
            values = node["values"]
            children = node.get("children", {})
            result = VerdictKind.PROVEN
            for value in values:
                sub_node = children.get(str(value), node.get("child"))
                sub = run_node(
                    sub_node,
                    region.drop(var),
                    subs + [(var, value)],
                    z_sys.substitute_base(var, value),
                    f"{label}/{var}={value}",
                )
                if sub != VerdictKind.PROVEN:
                    result = sub
                    break
            if result == VerdictKind.PROVEN:
                tail_lo = region.bound_of(var) + len(values)
                result = run_node(
                    node["tail"],
                    region.raise_bound(var, tail_lo),
                    subs,
                    z_sys,
                    f"{label}/{var}>={tail_lo}",
                )
        elif kind == "split_cut":
            # cuts are applied while their base variables are still symbolic
            ge = run_node(
                node["ge"],
                region,
                subs,
                _apply_cuts(z_sys.with_region(region), [(node["expr"], True)]),
                f"{label}/ge",
            )
            if ge == VerdictKind.PROVEN:
                result = run_node(
                    node["lt"],
                    region,
                    subs,
                    _apply_cuts(z_sys.with_region(region), [(node["expr"], False)]),
                    f"{label}/lt",
                )
            else:
                result = ge
        elif kind == "brute_force":
            targets = [
                substituted(t, subs).with_region(region) for t in node["targets"]
            ]
            result = verify_slice_by_enumeration(
                targets, z_sys.with_region(region), cfg, log, label
            )
        elif kind == "exclusion_patch":
            handler = _PATCH_HANDLERS.get(node["handler"])
            if handler is None:
                raise ValueError(f"no handler registered for {node['handler']!r}")
            result = handler(node, plan, region, subs, z_sys, cfg, log, label)
        else:  # pragma: no cover - guarded by validate_structure
            raise ValueError(kind)
        step = {
            "label": label,
            "step_kind": kind,
            "verdict": result.value,
            "seconds": round(time.monotonic() - t0, 3),
        }
        report.steps.append(step)
        log.add("plan_step", **step)
        if checkpoint is not None:
            checkpoint.record(label, result.value)
        return result

    z0 = plan.systems[plan.z].with_region(plan.region)
    report.kind = run_node(plan.node, plan.region, [], z0, plan.name)
    log.time_mark("total")
    log.add("verdict", value=report.kind.value)
    return report


def _apply_cuts(z: InequalitySystem, cuts: list) -> InequalitySystem:
    """Restrict z by cut expressions: (expr, True) keeps expr >= 0, and
    (expr, False) keeps expr <= -1 (the exact integer complement)."""
    from .linsys import parse_system

    extra = []
    for expr, ge in cuts:
        text = header_text(z.region) + (
            f"system cut:\n  vars {' '.join(z.vars)};\n  {expr} >= 0;\n"
        )
        cut_sys = parse_system(text, "cut")
        form = cut_sys.forms[0]
        if not ge:
            # expr <= -1  <=>  -expr - 1 >= 0
            from .exactalg import const, scalar_add, scalar_neg

            form = form.scale(const(-1)).add_const(const(-1))
        extra.append(form)
    return z.add_forms(extra, suffix="|cut")


def header_text(region: Region) -> str:
    from .linsys import header_str

    h = header_str(region)
    return h + "\n" if h else ""


class Checkpoint:
    """Line-oriented resume file: one JSON record per completed plan label."""

    def __init__(self, path: str):
        self.path = path
        self.done: dict[str, str] = {}
        try:
            with open(path) as fh:
                for line in fh:
                    rec = json.loads(line)
                    self.done[rec["label"]] = rec["verdict"]
        except FileNotFoundError:
            pass

    def lookup(self, label: str) -> Optional[str]:
        return self.done.get(label)

    def record(self, label: str, verdict: str):
        if self.done.get(label) == verdict:
            return
        self.done[label] = verdict
        with open(self.path, "a") as fh:
            fh.write(json.dumps({"label": label, "verdict": verdict}) + "\n")


# ---------------------------------------------------------------------------
# Multi-target search
# ---------------------------------------------------------------------------


def covers_multi(
    targets: Sequence[InequalitySystem],
    z: InequalitySystem,
    region: Region,
    cfg: Optional[CoversConfig] = None,
    plan_hint: Optional[dict] = None,
    cut_candidates: Sequence[str] = (),
    budget: int = 40,
) -> tuple[Verdict, dict]:
    """Prove coverage by one of >= 2 targets, searching over ordered pairs and
    axis-aligned cut splits when no explicit plan is given.

    Returns the verdict and the plan node that closed (for bundling)."""
    cfg = cfg or CoversConfig()
    if len(targets) < 2:
        raise IllFormedQuery("covers_multi needs at least two targets")
    by_name = {t.name: t for t in targets}

    def attempt(node: dict, z_now: InequalitySystem) -> VerdictKind:
        if node["kind"] == "covers":
            q = CoversQuery(by_name[node["x"]], by_name[node["y"]], z_now, region)
            return covers(q, cfg).kind
        raise ValueError(node)

    if plan_hint is not None:
        plan = ProofPlan(
            name=z.name, z=z.name, node=plan_hint,
            systems={z.name: z, **by_name}, region=region,
        )
        report = run_plan(plan, cfg)
        return Verdict(report.kind, report.log), plan_hint

    spent = 0
    log = CertificateLog({"multi": z.name})

    def search(z_now: InequalitySystem, depth: int) -> Optional[dict]:
        nonlocal spent
        for a, b in itertools.permutations(sorted(by_name), 2):
            if spent >= budget:
                return None
            spent += 1
            q = CoversQuery(by_name[a], by_name[b], z_now, region)
            out = covers(q, cfg)
            log.entries.extend(out.log.entries)
            if out.kind == VerdictKind.PROVEN:
                return {"kind": "covers", "x": a, "y": b}
        if depth == 0:
            return None
        for expr in cut_candidates:
            if spent >= budget:
                return None
            ge_node = search(_apply_cuts(z_now, [(expr, True)]), depth - 1)
            if ge_node is None:
                continue
            lt_node = search(_apply_cuts(z_now, [(expr, False)]), depth - 1)
            if lt_node is not None:
                return {"kind": "split_cut", "expr": expr, "ge": ge_node, "lt": lt_node}
        return None

    node = search(z.with_region(region), depth=1)
    if node is None:
        raise NoPlanFound(f"no strategy within budget {budget}")
    log.add("verdict", value="Proven")
    return Verdict(VerdictKind.PROVEN, log), node


# ---------------------------------------------------------------------------
# Replay
# ---------------------------------------------------------------------------


def replay_log(data: dict, cfg: Optional[CoversConfig] = None) -> tuple[bool, list[str]]:
    """Re-verify a serialized certificate log entry by entry.

    Sign entries are re-decided (verdict and method must match); eliminations
    are re-run and compared textually; coverage and brute-force steps are
    re-executed on the recorded inputs. The final verdict must agree with the
    recorded entries.
    """
    cfg = cfg or CoversConfig()
    failures: list[str] = []
    oracle = SignOracle(strip_cap=cfg.sign_strip_cap)
    for i, entry in enumerate(data.get("entries", [])):
        kind = entry["kind"]
        try:
            if kind == "sign":
                if not replay_sign(oracle, entry):
                    failures.append(f"entry {i}: sign mismatch")
            elif kind == "elimination":
                sys_ = _parse_single(entry["input"])
                chain = eliminate_all_integer(sys_, tuple(entry["keep"]), oracle)
                parsed_out = _parse_single(entry["output"])
                if chain.final.forms != parsed_out.forms:
                    failures.append(f"entry {i}: elimination output changed")
            elif kind == "coverage" and "certificate" in entry:
                z = _parse_single(entry["z"])
                c1 = _parse_single(entry["c1"])
                c2 = _parse_single(entry["c2"])
                res = covered_by_two(Polyhedron(z), c1, c2, oracle)
                if res.verdict.value != entry["verdict"]:
                    failures.append(f"entry {i}: coverage verdict changed")
            elif kind == "brute_force":
                parsed_z = _parse_single(entry["z"])
                box = {v: tuple(b) for v, b in entry["box"].items()}
                pts = enumerate_integer_points(parsed_z, {}, box, cap=cfg.box_cap)
                if len(pts) != entry["points"]:
                    failures.append(f"entry {i}: point count changed")
        except Exception as e:  # noqa: BLE001
            failures.append(f"entry {i} ({kind}): replay error {e}")
    return (not failures), failures


def _parse_single(text: str) -> InequalitySystem:
    parsed = parse_file(text)
    name = next(iter(parsed.systems))
    return parsed.systems[name]
