"""Bundled inequality systems and the five executable proof scenarios.

Each named system is written in the text DSL exactly as displayed at its
source, up to two faithful transformations:

* forms are scaled by positive base-variable polynomials (r+k, r+1) so every
  variable coefficient is a polynomial with integer values at integer points
  (the binomial symbol B then appears with polynomial weight);
* floor terms like floor(h/(r+1)) become an auxiliary integer variable q with
  the exact characterization (r+1)q <= h <= (r+1)q + r, declared before the
  variables whose bounds use it.

The degree/point-count aggregate h is nonnegative by definition, so the
scenario base systems carry h >= 0 explicitly; without it their polyhedra
are unbounded and the vertex method cannot start.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .linsys import (
    InequalitySystem,
    derive_box,
    enumerate_integer_points,
    find_ceiled_witness,
    parse_file,
)
from .prover import (
    CertificateLog,
    CoversConfig,
    ProofPlan,
    VerdictKind,
    register_patch_handler,
)
from .signcert import Region

#: Excluded witness pairs (dp, gp) for the space scenario.
EXCLUSION_SET = ((4, 1), (5, 2), (6, 2), (6, 4), (7, 5), (8, 6))

HEADER_RK3 = "base r >= 4, k >= 3; binom B = (r+k, k)"
HEADER_RK2 = "base r >= 4, k >= 2; binom B = (r+k, k)"
HEADER_RK4 = "base r >= 4, k >= 4; binom B = (r+k, k)"
HEADER_R = "base r >= 4"
HEADER_K = "base k >= 2"

# -- form blocks, one list per named system ---------------------------------

I_FORMS = [
    "(k-1)*dp + 1 - gp + hp - (k/(r+k))*B >= 0",
    "k*d - g - (k-1)*dp + gp + h - hp - (r/(r+k))*B >= 0",
]

A_FORMS = [
    "hp >= 0",
    "h - (r+1)*hp >= 0",
]

J_FORMS = [
    "hp - r - q1 >= 0",
    "h - hp >= 0",
    "h - (r+1)*q1 >= 0",
    "(r+1)*q1 + r - h >= 0",
]

K_FORMS = [
    "2*r + 1 - h >= 0",
    "hp >= 0",
    "h - hp >= 0",
]

L_FORMS = [
    "h - 2 >= 0",
    "3*r + 2 - h >= 0",
    "hp - 2 >= 0",
    "2 - hp >= 0",
]

M_FORMS = [
    "3*r + 2 - h >= 0",
    "hp - r - 2 >= 0",
    "h - q - hp >= 0",
    "r - 2*q >= 0",
    "2*q + 1 - r >= 0",
]

N_FORMS = [
    "h >= 0",
    "hp - r - q1 >= 0",
    "h - r*q2 - hp >= 0",
    "h - (r+1)*q1 >= 0",
    "(r+1)*q1 + r - h >= 0",
    "h - (2*r+2)*q2 >= 0",
    "(2*r+2)*q2 + 2*r + 1 - h >= 0",
]


def x_forms(t: str) -> list[str]:
    return [
        "-gp >= 0",
        "dp + gp - 1 >= 0",
        f"{t} + gp >= 0",
        "g - gp - n + 1 >= 0",
        "r*(d - dp) - (r-1)*(g - gp) + (r-1)*n - r^2 + 1 >= 0",
        "n + gp - 1 >= 0",
        "dp - n >= 0",
        "r*(d - dp) - (r-4)*(g - gp) - 2*n - 2*r + 2 >= 0",
        "r + 2 - n - gp >= 0",
        "2*n + d + gp - dp - g - r - 1 >= 0",
    ]


Y_FORMS = [
    "gp >= 0",
    "(r+1)*dp - r*gp - r^2 - r >= 0",
    "(2*r-3)*dp - (r-2)^2*gp - 2*r^2 + 3*r - 9 >= 0",
    "g - gp - n + 1 >= 0",
    "r*(d - dp) - (r-1)*(g - gp) + (r-1)*n - r^2 + 1 >= 0",
    "n - 1 >= 0",
    "dp - n >= 0",
    "r*(d - dp) - (r-4)*(g - gp) - 2*n - 2*r + 2 >= 0",
    "2*n + d + gp - dp - g - r - 2 >= 0",
]

Z_FORMS = [
    "(r+1)*dp - r*gp - r^2 - r >= 0",
    "gp - (r+1)*m >= 0",
    "(2*r-3)*(dp - r*m) - (r-2)^2*(gp - (r+1)*m) - 2*r^2 + 3*r - 9 >= 0",
    "g - gp - n + 1 >= 0",
    "r*(d - dp) - (r-1)*(g - gp) + (r-1)*n - r^2 + 1 >= 0",
    "n - 1 >= 0",
    "dp - r*m - n >= 0",
    "r*(d - dp) - (r-4)*(g - gp) - 2*n - 2*r + 2 >= 0",
    "2*n + d + gp - dp - g - r - 2 >= 0",
    "2*(dp - r*m) - (r-3)*(gp - (r+1)*m - 1) - (r-1)*(r+2) >= 0",
    "m >= 0",
]

# the second form is scaled by (r+1) so the h coefficient is the integer -r
U_FORMS = [
    "k*d + 1 - g + h - B >= 0",
    "(r*(r+1)/(r+k))*B - (r+1)*d - r*h + r^2 - 1 >= 0",
    "g >= 0",
    "(r+1)*d - r*g - r^2 - r >= 0",
    "h >= 0",
]

V_EXTRA = "(r+1)*g + r*h - r^2 - r*k + r - k + 2 >= 0"
W_EXTRA = "r^2 + r*k - r + k - 3 - (r+1)*g - r*h >= 0"

I_ELL_FORMS = [
    "(k-1)*dp + 1 + np - (k/(r+k))*B >= 0",
    "k*d + n - (k-1)*dp - np - (r/(r+k))*B >= 0",
]

S_ELL_FORMS = [
    "(k/(r+k))*B - (k-1)*dp - 1 - np >= 0",
    "(r/(r+k))*B - k*d - n + (k-1)*dp + np >= 0",
]


def x_ell_forms(t: str) -> list[str]:
    return [
        "np >= 0",
        f"{t} - np >= 0",
        "dp - np - 1 >= 0",
        "d - n - dp - 1 >= 0",
        "d - n - dp - np >= 0",
    ]


U_ELL_FORMS = [
    "n >= 0",
    "k - 1 - n >= 0",
    "(k-1)*(d - n) - (k/(r+k))*B >= 0",
    "(r/(r+k))*B - d - k*n - 1 >= 0",
]

I3_FORMS = [
    "(k-2)*dp + 1 - gp - binom(k+1, 3) >= 0",
    "k*d - g - (k-2)*dp + gp - (k+1)^2 >= 0",
]

S3_FORMS = [
    "binom(k+1, 3) - (k-2)*dp - 1 + gp >= 0",
    "(k+1)^2 - k*d + g + (k-2)*dp - gp >= 0",
]

X3_FORMS = [
    "dp + gp - 3 >= 0",
    "4*dp - 3*gp - 12 >= 0",
    "d - dp - 1 >= 0",
    "g - gp >= 0",
    "2*d - 2*dp - g + gp - 2 >= 0",
    "2*dp - g + gp - 1 >= 0",
]

Y3_FORMS = [
    "gp >= 0",
    "4*dp - 3*gp - 12 >= 0",
    "d - dp - 3 >= 0",
    "g - d + dp - gp + 3 >= 0",
    "3*d - g - 3*dp + gp - 5 >= 0",
    "d - g + dp + gp - 4 >= 0",
]

U3_FORMS = [
    "g >= 0",
    "4*d - 3*g - 12 >= 0",
    "(k-1)*d - g - binom(k+2, 3) >= 0",
    "binom(k+2, 2) - d - 1 >= 0",
]

# standalone builds: header, variable order, form block
_CATALOG: dict[str, tuple[str, str, list[str]]] = {
    "I": (HEADER_RK3, "d g dp gp h hp", I_FORMS),
    "A": (HEADER_R, "h hp", A_FORMS),
    "J": (HEADER_R, "h q1 hp", J_FORMS),
    "K": (HEADER_R, "h hp", K_FORMS),
    "L": (HEADER_R, "h hp", L_FORMS),
    "M": (HEADER_R, "h q hp", M_FORMS),
    "N": (HEADER_R, "h q1 q2 hp", N_FORMS),
    "X": (HEADER_RK3, "d g dp gp n", x_forms("k - 2")),
    "Y": (HEADER_R, "d g dp gp n", Y_FORMS),
    "Z": (HEADER_R, "d g dp gp n m", Z_FORMS),
    "U": (HEADER_RK3, "d g h", U_FORMS),
    "V": (HEADER_RK3, "d g h", U_FORMS + [V_EXTRA]),
    "W": (HEADER_RK3, "d g h", U_FORMS + [W_EXTRA]),
    "I_ell": (HEADER_RK2, "d n dp np", I_ELL_FORMS),
    "S_ell": (HEADER_RK2, "d n dp np", S_ELL_FORMS),
    "X_ell": (HEADER_RK2, "d n dp np", x_ell_forms("k - 2")),
    "U_ell": (HEADER_RK2, "d n", U_ELL_FORMS),
    "I3": (HEADER_K, "d g dp gp", I3_FORMS),
    "S3": (HEADER_K, "d g dp gp", S3_FORMS),
    "X3": (HEADER_K, "d g dp gp", X3_FORMS),
    "Y3": (HEADER_K, "d g dp gp", Y3_FORMS),
    "U3": (HEADER_K, "d g", U3_FORMS),
}


def system_ids() -> list[str]:
    return list(_CATALOG)


def _assemble(name: str, header: str, vars_: str, forms: Sequence[str]) -> str:
    lines = [header, f"system {name}:", f"  vars {vars_};"]
    lines.extend(f"  {f};" for f in forms)
    return "\n".join(lines) + "\n"


def build_system(id: str) -> InequalitySystem:
    """The named system, exactly as bundled (scaled forms, aux floor vars)."""
    if id not in _CATALOG:
        raise KeyError(f"unknown system id {id!r}")
    header, vars_, forms = _CATALOG[id]
    parsed = parse_file(_assemble(id, header, vars_, forms))
    return parsed.systems[id]


def system_text(id: str) -> str:
    header, vars_, forms = _CATALOG[id]
    return _assemble(id, header, vars_, forms)


# ---------------------------------------------------------------------------
# Scenario assembly
# ---------------------------------------------------------------------------


def _scenario_text(
    header: str,
    z_name: str,
    z_vars: str,
    z_forms: Sequence[str],
    targets: dict[str, tuple[str, Sequence[str]]],
) -> str:
    parts = [header]
    parts.append(f"system {z_name}:")
    parts.append(f"  vars {z_vars};")
    parts.extend(f"  {f};" for f in z_forms)
    for name, (vars_, forms) in targets.items():
        parts.append(f"system {name}:")
        parts.append(f"  vars {vars_};")
        parts.extend(f"  {f};" for f in forms)
    return "\n".join(parts) + "\n"


def _plan(name: str, z: str, node: dict, text: str) -> ProofPlan:
    parsed = parse_file(text)
    plan = ProofPlan(
        name=name, z=z, node=node, systems=parsed.systems, region=parsed.region
    )
    plan.validate_structure()
    return plan


def lines_plan() -> ProofPlan:
    """Coverage of the rational-curve-with-lines base system by the dimension
    comparison going either way."""
    text = _scenario_text(
        HEADER_RK2,
        "UL",
        "d n",
        U_ELL_FORMS,
        {
            "XI": ("d n dp np", x_ell_forms("k - 2") + I_ELL_FORMS),
            "XS": ("d n dp np", x_ell_forms("k - 2") + S_ELL_FORMS),
        },
    )
    node = {"kind": "covers", "x": "XI", "y": "XS"}
    return _plan("lines", "UL", node, text)


def space_plan(k_patch_cut: int = 8) -> ProofPlan:
    """Coverage for the space-curve base system by four quadric-splitting
    targets, plus the excluded-pair patch.

    Bases below the cut are closed by exhaustive witness search avoiding the
    excluded pairs. Above the cut, the base polytope is split along the exact
    boundary between the injective and surjective sides, k*d - g =
    (k+1)^2 + binom(k+1, 3) - 1, and each half is covered by its matching
    target pair strengthened with dp >= 9; any witness there automatically
    avoids the excluded pairs, whose dp values stop at 8.
    """
    targets = {
        "XI3": ("d g dp gp", X3_FORMS + I3_FORMS),
        "YI3": ("d g dp gp", Y3_FORMS + I3_FORMS),
        "XS3": ("d g dp gp", X3_FORMS + S3_FORMS),
        "YS3": ("d g dp gp", Y3_FORMS + S3_FORMS),
    }
    text = _scenario_text(HEADER_K, "U3", "d g", U3_FORMS, targets)
    node = {
        "kind": "exclusion_patch",
        "handler": "e3",
        "pairs": [list(p) for p in EXCLUSION_SET],
        "pair_vars": ["dp", "gp"],
        "targets": list(targets),
        "k_cut": k_patch_cut,
        "margin_floor": 9,
        "cut": "k*d - g - (k+1)^2 - binom(k+1, 3) + 1",
        "cut_ge_pair": ["XI3", "YI3"],
        "cut_lt_pair": ["XS3", "YS3"],
    }
    return _plan("space", "U3", node, text)


def w_plan() -> ProofPlan:
    """Single-target coverage with the universal point-count variable joining
    the base system."""
    z_forms = U_FORMS + [W_EXTRA] + A_FORMS
    target = x_forms("k - 2") + I_FORMS
    text = _scenario_text(
        HEADER_RK3,
        "ZW",
        "d g h hp",
        z_forms,
        {"TI": ("d g h hp dp gp n", target)},
    )
    # the single boundary base (4, 3) defeats the real-coverage step (every
    # integer point still completes); it is closed by enumeration
    node = {
        "kind": "split_base",
        "var": "r",
        "values": [4],
        "child": {
            "kind": "split_base",
            "var": "k",
            "values": [3],
            "child": {"kind": "brute_force", "targets": ["TI"]},
            "tail": {"kind": "covers", "x": "TI", "y": "TI"},
        },
        "tail": {"kind": "covers", "x": "TI", "y": "TI"},
    }
    return _plan("w", "ZW", node, text)


def v3_plan() -> ProofPlan:
    """Six-way disjunction at k = 3, split along the point-count boundaries."""
    k3 = "base r >= 4"
    targets = {
        "XIK": ("d g h hp dp gp n", x_forms("0") + _I_AT_K3 + K_FORMS),
        "XIM": ("d g h q hp dp gp n", x_forms("0") + _I_AT_K3 + M_FORMS),
        "XIN": ("d g h q1 q2 hp dp gp n", x_forms("0") + _I_AT_K3 + N_FORMS),
        "YIK": ("d g h hp dp gp n", Y_FORMS + _I_AT_K3 + K_FORMS),
        "YIL": ("d g h hp dp gp n", Y_FORMS + _I_AT_K3 + L_FORMS),
        "YIN": ("d g h q1 q2 hp dp gp n", Y_FORMS + _I_AT_K3 + N_FORMS),
    }
    text = _scenario_text(k3, "ZV3", "d g h", _U_AT_K3 + [_V_EXTRA_K3], targets)
    node = {
        "kind": "split_cut",
        "expr": "2*r + 1 - h",
        "ge": {"kind": "covers", "x": "XIK", "y": "YIK"},
        "lt": {"kind": "covers", "x": "XIN", "y": "YIN"},
    }
    return _plan("v3", "ZV3", node, text)


def v_higher_plan() -> ProofPlan:
    """Five-way disjunction for k >= 4."""
    targets = {
        "XIJ": ("d g h q1 hp dp gp n", x_forms("0") + I_FORMS + J_FORMS),
        "YIJ": ("d g h q1 hp dp gp n", Y_FORMS + I_FORMS + J_FORMS),
        "YIK": ("d g h hp dp gp n", Y_FORMS + I_FORMS + K_FORMS),
        "ZIJ": ("d g h q1 hp dp gp n m", Z_FORMS + I_FORMS + J_FORMS),
        "ZIK": ("d g h hp dp gp n m", Z_FORMS + I_FORMS + K_FORMS),
    }
    text = _scenario_text(
        HEADER_RK4, "ZV", "d g h", U_FORMS + [V_EXTRA], targets
    )
    node = {
        "kind": "split_base",
        "var": "r",
        "values": [4],
        "child": {
            "kind": "split_cut",
            "expr": "2*r + 1 - h",
            "ge": {"kind": "covers", "x": "YIK", "y": "ZIK"},
            "lt": {"kind": "covers", "x": "XIJ", "y": "YIJ"},
        },
        "tail": {
            "kind": "split_cut",
            "expr": "2*r + 1 - h",
            "ge": {"kind": "covers", "x": "YIK", "y": "ZIK"},
            "lt": {"kind": "covers", "x": "XIJ", "y": "YIJ"},
        },
    }
    return _plan("v_higher", "ZV", node, text)


# k = 3 instances of the bivariate blocks; the weighted binomials collapse to
# the smaller exact binomials binom(r+2, 2) and binom(r+2, 3)
_I_AT_K3 = [
    "2*dp + 1 - gp + hp - binom(r+2, 2) >= 0",
    "3*d - g - 2*dp + gp + h - hp - binom(r+2, 3) >= 0",
]

_U_AT_K3 = [
    "3*d + 1 - g + h - binom(r+3, 3) >= 0",
    "(r+1)*binom(r+2, 3) - (r+1)*d - r*h + r^2 - 1 >= 0",
    "g >= 0",
    "(r+1)*d - r*g - r^2 - r >= 0",
    "h >= 0",
]

_V_EXTRA_K3 = "(r+1)*g + r*h - r^2 - 2*r - 1 >= 0"


SCENARIOS = {
    "lines": lines_plan,
    "space": space_plan,
    "w": w_plan,
    "v3": v3_plan,
    "v_higher": v_higher_plan,
}


def scenario(name: str) -> ProofPlan:
    if name not in SCENARIOS:
        raise KeyError(f"unknown scenario {name!r}; have {sorted(SCENARIOS)}")
    return SCENARIOS[name]()


# ---------------------------------------------------------------------------
# Excluded-pair patch for the space scenario
# ---------------------------------------------------------------------------


def e3_patch(
    plan: ProofPlan,
    region: Region,
    z: InequalitySystem,
    target_names: Sequence[str],
    pairs: Sequence[tuple[int, int]],
    pair_vars: tuple[str, str],
    k_cut: int,
    margin_floor: int,
    cut: str,
    cut_ge_pair: Sequence[str],
    cut_lt_pair: Sequence[str],
    cfg: CoversConfig,
    log: CertificateLog,
    label: str,
) -> VerdictKind:
    """Witness existence with (dp, gp) outside the excluded pairs.

    Small bases (k below the cut) are checked by exhaustive enumeration with
    the excluded pairs removed; beyond the cut the excluded pairs are out of
    reach entirely, shown by re-running the coverage with every target
    strengthened by dp >= margin_floor (a margin certificate: all excluded
    pairs have dp below the floor).
    """
    assert all(dp < margin_floor for dp, _ in pairs)
    var = region.names[-1]
    lo = region.bound_of(var)
    # finite part: per fixed k, enumerate every z-point and find a witness off
    # the excluded list
    for value in range(lo, k_cut):
        z_fixed = z.substitute_base(var, value)
        targets = [
            plan.systems[t].substitute_base(var, value) for t in target_names
        ]
        box = derive_box(z_fixed, {}, slack=0)
        points = enumerate_integer_points(z_fixed, {}, box, cap=cfg.box_cap)
        unpatched = []
        for pt in points:
            fixed_vals = dict(zip(z_fixed.vars, pt))
            if not _witness_off_pairs(targets, fixed_vals, pairs, pair_vars, cfg):
                unpatched.append(fixed_vals)
        log.add(
            "exclusion_patch",
            scope=f"{label}/{var}={value}",
            points=len(points),
            unpatched=unpatched,
        )
        if unpatched:
            return VerdictKind.NOT_PROVEN
    # margin part: strengthened coverage forces dp >= margin_floor > max
    # excluded dp, so any witness is automatically off the excluded list;
    # the base polytope splits along the declared boundary, one target pair
    # per side
    from .prover import CoversQuery, covers, _apply_cuts

    tail_region = region.raise_bound(var, k_cut)
    strengthened = {}
    for t in target_names:
        base = plan.systems[t]
        extra_text = (
            f"base k >= {k_cut}\nsystem S:\n  vars {' '.join(base.vars)};\n"
            f"  dp - {margin_floor} >= 0;\n"
        )
        extra = parse_file(extra_text).systems["S"]
        strengthened[t] = base.add_forms(extra.forms, suffix="+margin").with_region(
            tail_region
        )
    z_tail = z.with_region(tail_region)
    halves = [
        (cut_ge_pair, _apply_cuts(z_tail, [(cut, True)]), "ge"),
        (cut_lt_pair, _apply_cuts(z_tail, [(cut, False)]), "lt"),
    ]
    result = VerdictKind.PROVEN
    attempts = []
    for (a, b), z_half, side in halves:
        q = CoversQuery(strengthened[a], strengthened[b], z_half, tail_region)
        out = covers(q, cfg)
        log.entries.extend(out.log.entries)
        attempts.append({"side": side, "x": a, "y": b, "verdict": out.kind.value})
        if out.kind != VerdictKind.PROVEN:
            result = out.kind
            break
    log.add(
        "exclusion_patch",
        scope=f"{label}/{var}>={k_cut}",
        margin_floor=margin_floor,
        cut=cut,
        attempts=attempts,
        verdict=result.value,
    )
    return result


def _witness_off_pairs(targets, fixed_vals, pairs, pair_vars, cfg) -> bool:
    banned = {tuple(p) for p in pairs}
    for t in targets:
        box = derive_box(t, {}, slack=1, fixed=fixed_vals)
        found = find_ceiled_witness(t, fixed_vals, {}, box, cap=cfg.box_cap)
        if found is None:
            continue
        key = tuple(found[v] for v in pair_vars)
        if key not in banned:
            return True
        # the first witness is excluded; scan its box for an alternate one
        alt = _search_excluding(t, fixed_vals, box, banned, pair_vars, cfg)
        if alt is not None:
            return True
    return False


def _search_excluding(t, fixed_vals, box, banned, pair_vars, cfg):
    """Exhaustive-within-box search for a ceiled witness off the banned list."""
    i1, i2 = (t.vars.index(v) for v in pair_vars)
    free = [v for v in t.vars if v not in fixed_vals]
    fixed = t.fix_base({})

    def rec(assigned: dict):
        level = len(assigned)
        if level == len(free):
            vec = [assigned.get(v, fixed_vals.get(v)) for v in t.vars]
            if (vec[i1], vec[i2]) in banned:
                return None
            if fixed.satisfies_ceiled(vec):
                return dict(zip(t.vars, vec))
            return None
        v = free[level]
        lo, hi = box[v]
        for x in range(lo, hi + 1):
            assigned[v] = x
            out = rec(assigned)
            del assigned[v]
            if out is not None:
                return out
        return None

    return rec({})


def _e3_handler(node, plan, region, subs, z_sys, cfg, log, label):
    pairs = [tuple(p) for p in node["pairs"]]
    return e3_patch(
        plan,
        region,
        z_sys,
        node["targets"],
        pairs,
        tuple(node["pair_vars"]),
        node["k_cut"],
        node["margin_floor"],
        node["cut"],
        tuple(node["cut_ge_pair"]),
        tuple(node["cut_lt_pair"]),
        cfg,
        log,
        label,
    )


register_patch_handler("e3", _e3_handler)
