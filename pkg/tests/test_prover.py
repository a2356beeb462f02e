"""Covers driver tests on the worked one-base-variable example, plans, replay."""

import json
import random
import time

import pytest

from intcover.linsys import enumerate_integer_points, parse_file, satisfies_ceiled
from intcover.prover import (
    Checkpoint,
    CoversConfig,
    CoversQuery,
    IllFormedQuery,
    NoPlanFound,
    ProofPlan,
    VerdictKind,
    covers,
    covers_multi,
    falsify,
    replay_log,
    run_plan,
)
from intcover.signcert import Region

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
"""


def make_query(lower: int) -> CoversQuery:
    parsed = parse_file(WORKED)
    region = Region(("r",), (lower,))
    return CoversQuery(
        parsed.systems["X"].with_region(region),
        parsed.systems["Y"].with_region(region),
        parsed.systems["Z"].with_region(region),
        region,
    )


def test_worked_example_proven_at_3():
    t0 = time.monotonic()
    verdict = covers(make_query(3))
    assert verdict.kind == VerdictKind.PROVEN
    assert time.monotonic() - t0 < 1.0
    assert verdict.exit_code == 0
    kinds = {e["kind"] for e in verdict.log.entries}
    assert {"elimination", "coverage", "sign", "verdict"} <= kinds


def test_worked_example_not_proven_at_2():
    t0 = time.monotonic()
    verdict = covers(make_query(2))
    assert verdict.kind == VerdictKind.NOT_PROVEN
    assert time.monotonic() - t0 < 1.0
    assert verdict.exit_code == 1
    # the integer fallback finds witnesses for every d in 0..4 and says so
    falsify_entries = [e for e in verdict.log.entries if e["kind"] == "falsify"]
    assert falsify_entries
    assert falsify_entries[-1]["counterexample"] is None
    assert "method-incomplete" in falsify_entries[-1]["diagnosis"]


def test_worked_example_integer_witnesses_at_2():
    # every d in 0..4 completes at r = 2, e.g. d = 3 -> (g, h) = (3, 3) in Y
    parsed = parse_file(WORKED)
    Y = parsed.systems["Y"].substitute_base("r", 2)
    assert satisfies_ceiled(Y, {"d": 3, "g": 3, "h": 3}, {})
    q = make_query(2)
    box = {"d": (0, 4), "g": (0, 4), "h": (0, 4)}
    assert falsify(q, {"r": 2}, box) is None


def test_identity_coverage():
    text = """
system X:
  vars d;
  d >= 0;
  5 - d >= 0;
system Y:
  vars d;
  d - 100 >= 0;
  99 - d >= 0;
system Z:
  vars d;
  d >= 0;
  5 - d >= 0;
"""
    parsed = parse_file(text)
    region = Region((), ())
    q = CoversQuery(
        parsed.systems["X"], parsed.systems["Y"], parsed.systems["Z"], region
    )
    assert covers(q).kind == VerdictKind.PROVEN


def test_ill_formed_prefix():
    parsed = parse_file(WORKED)
    region = Region(("r",), (3,))
    bad = parsed.systems["Y"]
    z = parsed.systems["Z"]
    swapped = bad.with_forms(bad.forms)
    q = CoversQuery(
        z.with_region(region), swapped.with_region(region), z.with_region(region), region
    )
    # Y's vars are (d, g, h) which do begin with (d); build a genuinely bad one
    bad2 = parse_file(
        "base r >= 3\nsystem W:\n  vars g d;\n  g - d >= 0;\n"
    ).systems["W"]
    q_bad = CoversQuery(
        bad2.with_region(region), bad2.with_region(region), z.with_region(region), region
    )
    with pytest.raises(IllFormedQuery):
        covers(q_bad)
    assert covers(q).kind in (VerdictKind.PROVEN, VerdictKind.NOT_PROVEN)


def test_falsify_finds_constructed_counterexample():
    text = """
system X:
  vars d v;
  v - 1 >= 0;
  -1 - v >= 0;
system Y:
  vars d v;
  v - 1 >= 0;
  -1 - v >= 0;
system Z:
  vars d;
  d >= 0;
  2 - d >= 0;
"""
    parsed = parse_file(text)
    region = Region((), ())
    q = CoversQuery(
        parsed.systems["X"], parsed.systems["Y"], parsed.systems["Z"], region
    )
    box = {"d": (0, 2), "v": (-3, 3)}
    found = falsify(q, {}, box)
    assert found == {"d": 0}


def test_falsify_empty_z():
    text = """
system X:
  vars d;
system Y:
  vars d;
system Z:
  vars d;
  d >= 1;
  -1 - d >= 0;
"""
    parsed = parse_file(text)
    q = CoversQuery(
        parsed.systems["X"], parsed.systems["Y"], parsed.systems["Z"], Region((), ())
    )
    assert falsify(q, {}, {"d": (-5, 5)}) is None


# ---------------------------------------------------------------------------
# plans
# ---------------------------------------------------------------------------

PLAN_TEXT = (
    WORKED
    + """
plan:
{"name": "worked", "z": "Z",
 "node": {"kind": "split_base", "var": "r", "values": [3, 4],
          "child": {"kind": "covers", "x": "X", "y": "Y"},
          "tail": {"kind": "covers", "x": "X", "y": "Y"}}}
"""
)


def test_plan_roundtrip_and_run(tmp_path):
    plan = ProofPlan.from_text(PLAN_TEXT)
    plan.validate_structure()
    again = ProofPlan.from_text(plan.to_text())
    assert again.node == plan.node
    report = run_plan(plan)
    assert report.kind == VerdictKind.PROVEN
    labels = [s["label"] for s in report.steps]
    assert any("r=3" in l for l in labels)
    assert any("r>=5" in l for l in labels)


def test_plan_structural_validation():
    plan = ProofPlan.from_text(PLAN_TEXT)
    plan.node["values"] = [4, 5]  # gap at the region bound r >= 3
    with pytest.raises(ValueError):
        plan.validate_structure()


def test_plan_brute_force_step():
    text = (
        WORKED
        + """
plan:
{"name": "worked-bf", "z": "Z",
 "node": {"kind": "split_base", "var": "r", "values": [3],
          "child": {"kind": "brute_force", "targets": ["X", "Y"]},
          "tail": {"kind": "covers", "x": "X", "y": "Y"}}}
"""
    )
    plan = ProofPlan.from_text(text)
    report = run_plan(plan)
    assert report.kind == VerdictKind.PROVEN
    bf = [e for e in report.log.entries if e["kind"] == "brute_force"]
    assert bf and bf[0]["failures"] == []
    assert bf[0]["points"] == 10  # d in 0..9 at r = 3


def test_plan_checkpoint_resume(tmp_path):
    plan = ProofPlan.from_text(PLAN_TEXT)
    path = tmp_path / "resume.jsonl"
    cp = Checkpoint(str(path))
    report = run_plan(plan, checkpoint=cp)
    assert report.kind == VerdictKind.PROVEN
    cp2 = Checkpoint(str(path))
    report2 = run_plan(plan, checkpoint=cp2)
    assert report2.kind == VerdictKind.PROVEN
    assert all(e["kind"] != "coverage" for e in report2.log.entries)


def test_plan_cut_split():
    # split Z on d <= 4 | d >= 5 and cover each half by the matching target
    text = (
        WORKED
        + """
plan:
{"name": "worked-cut", "z": "Z",
 "node": {"kind": "split_cut", "expr": "4 - d",
          "ge": {"kind": "covers", "x": "X", "y": "Y"},
          "lt": {"kind": "covers", "x": "X", "y": "Y"}}}
"""
    )
    plan = ProofPlan.from_text(text.replace("base r >= 3", "base r >= 4"))
    report = run_plan(plan)
    assert report.kind == VerdictKind.PROVEN


# ---------------------------------------------------------------------------
# covers_multi
# ---------------------------------------------------------------------------


def test_covers_multi_two_targets_delegates():
    parsed = parse_file(WORKED)
    region = Region(("r",), (3,))
    targets = [
        parsed.systems["X"].with_region(region),
        parsed.systems["Y"].with_region(region),
    ]
    verdict, node = covers_multi(targets, parsed.systems["Z"].with_region(region), region)
    assert verdict.kind == VerdictKind.PROVEN
    assert node["kind"] == "covers"


def test_covers_multi_no_plan():
    text = """
system A:
  vars d v;
  v >= 0;
  -1 - v >= 0;
system B:
  vars d v;
  v >= 0;
  -1 - v >= 0;
system Z:
  vars d;
  d >= 0;
  2 - d >= 0;
"""
    parsed = parse_file(text)
    region = Region((), ())
    targets = [parsed.systems["A"], parsed.systems["B"]]
    with pytest.raises(NoPlanFound):
        covers_multi(targets, parsed.systems["Z"], region, budget=4)


# ---------------------------------------------------------------------------
# determinism and replay
# ---------------------------------------------------------------------------


def test_covers_deterministic():
    v1 = covers(make_query(3))
    v2 = covers(make_query(3))
    assert json.dumps(v1.log.to_json("x")["entries"]) == json.dumps(
        v2.log.to_json("x")["entries"]
    )


def test_replay_worked_example():
    verdict = covers(make_query(3))
    data = verdict.log.to_json(verdict.kind.value)
    blob = json.loads(json.dumps(data))  # through-the-wire copy
    ok, failures = replay_log(blob)
    assert ok, failures


def test_replay_detects_tampering():
    verdict = covers(make_query(3))
    data = verdict.log.to_json(verdict.kind.value)
    blob = json.loads(json.dumps(data))
    for e in blob["entries"]:
        if e["kind"] == "sign":
            e["verdict"] = "Negative" if e["verdict"] != "Negative" else "Positive"
            break
    ok, failures = replay_log(blob)
    assert not ok


def test_replay_not_proven_log():
    verdict = covers(make_query(2))
    data = verdict.log.to_json(verdict.kind.value)
    ok, failures = replay_log(json.loads(json.dumps(data)))
    assert ok, failures
