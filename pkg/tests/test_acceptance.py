"""Acceptance suite: one test per release criterion, each printing a
PASS/FAIL line with its runtime (written through the terminal reporter so
the lines survive output capturing).
"""

import time
from contextlib import contextmanager

import pytest
from scipy import stats

from taskforge.cli import main
from taskforge.dataset import similarity
from taskforge.dsl import SamplingWeights, parse_domain, serialize_domain
from taskforge.exhaustive import count_unconstrained, enumerate_valid_sequences, signature
from taskforge.generate import GenerationConfig, generate_sequence, sample_action
from taskforge.model import revalidate
from taskforge.physical import RobotModel, SpawnParams, scene_violations, validate_task
from taskforge.rng import Rng, derive_seed

from _random_domains import random_domain
from test_dataset import _manual_record

_emit = print


@pytest.fixture(autouse=True)
def _terminal_writer(request):
    global _emit
    reporter = request.config.pluginmanager.get_plugin("terminalreporter")
    _emit = reporter.write_line if reporter is not None else print
    yield
    _emit = print


@contextmanager
def criterion(number: int, title: str, limit_s: float | None = None):
    start = time.monotonic()
    try:
        yield
    except BaseException:
        _emit(f"[criterion {number}] FAIL  {title} ({time.monotonic() - start:.2f}s)")
        raise
    elapsed = time.monotonic() - start
    _emit(f"[criterion {number}] PASS  {title} ({elapsed:.2f}s)")
    if limit_s is not None:
        assert elapsed < limit_s, f"criterion {number} exceeded {limit_s}s ({elapsed:.2f}s)"


def test_criterion_1_unconstrained_count(pick_place):
    with criterion(1, "unconstrained count 8^15, exact, < 1 ms"):
        assert len(pick_place.domain.actions) == 8
        best = min(
            _timed(lambda: count_unconstrained(len(pick_place.domain.actions), 15))
            for _ in range(5)
        )
        assert count_unconstrained(8, 15) == 35_184_372_088_832
        assert best < 0.001


def _timed(fn):
    t0 = time.perf_counter()
    fn()
    return time.perf_counter() - t0


def test_criterion_2_oracle_equivalence(mini):
    with criterion(2, "generator reaches exactly the enumerated set (10^4 seeds)", 60.0):
        tasks, counts = enumerate_valid_sequences(mini.domain, 5, 3)
        oracle = {signature(t) for t in tasks}
        reached = set()
        cfg = dict(length=5, max_entities=3)
        for s in range(10_000):
            task = generate_sequence(
                mini.domain, mini.weights, GenerationConfig(seed=derive_seed(2024, s), **cfg)
            )
            reached.add(signature(task))
        assert reached <= oracle, f"{len(reached - oracle)} generated sequences not in oracle set"
        assert oracle <= reached, f"{len(oracle - reached)} oracle sequences never generated"


def test_criterion_3_soundness_suite(pick_place):
    with criterion(3, "1000 generated tasks pass independent symbolic re-validation", 30.0):
        failures = 0
        for s in range(1000):
            task = generate_sequence(
                pick_place.domain, pick_place.weights,
                GenerationConfig(length=3 + s % 4, seed=derive_seed(31337, s)),
            )
            if revalidate(pick_place.domain.hierarchy, task):
                failures += 1
        assert failures == 0


def test_criterion_4_physical_validation_properties(pick_place, robot):
    from taskforge.model import Entity, GroundPredicate, WorldState
    from taskforge.dsl import parse_rules, parse_shapes
    from taskforge.physical import spawn_scene

    with criterion(4, "exact infeasibility proofs and evaluator-clean scenes", 120.0):
        # (a) provably contradictory constraints -> empty-volume, always.
        text = """(define (domain d)
  (:types thing - object)
  (:predicates (leftof ?a - thing ?b - thing))
  (:action noop :parameters (?a - thing) :precondition (and) :effect (and)))"""
        rules, _ = parse_rules("rule leftof leftof", parse_domain(text).raise_on_error())
        dom = parse_domain(text, kinds=rules.kinds()).raise_on_error()
        shapes, _ = parse_shapes("shape thing box 0.06 0.06 0.06", dom)
        leftof = dom.predicate("leftof")
        contradictory = WorldState(
            frozenset({GroundPredicate(leftof, ("a", "b")), GroundPredicate(leftof, ("b", "a"))}),
            {"a": Entity("a", "thing"), "b": Entity("b", "thing")},
        )
        for seed in range(100):
            out = spawn_scene(dom, contradictory, shapes, robot, rules, Rng(seed))
            assert not out.feasible and out.reason == "empty-volume"

        # (b) constructed out-of-reach fixtures -> unreachable, always.
        far = RobotModel(base=(10.0, 0.0, 0.8), reach=1.0)
        lone = WorldState(frozenset(), {"a": Entity("a", "thing")})
        for seed in range(100):
            out = spawn_scene(dom, lone, shapes, far, rules, Rng(seed))
            assert not out.feasible and out.reason == "unreachable"

        # (c) every accepted scene passes the independent geometric
        # re-checker for all spatial facts: 10^4 scenes, 0 violations.
        params = SpawnParams()
        scenes_checked = 0
        s = 0
        while scenes_checked < 10_000:
            task = generate_sequence(
                pick_place.domain, pick_place.weights,
                GenerationConfig(length=3 + s % 4, seed=derive_seed(777, s)),
            )
            report = validate_task(
                pick_place.domain, task, pick_place.shapes, robot, pick_place.rules, seed=s
            )
            for state, scene in zip(task.states, report.scenes):
                if scene is not None:
                    violations = scene_violations(state.facts, scene, pick_place.rules, robot, params)
                    assert violations == [], f"seed {s}: {violations}"
                    scenes_checked += 1
            s += 1
        assert scenes_checked >= 10_000


def test_criterion_5_determinism(tmp_path):
    with criterion(5, "three cmd_generate repetitions are byte-identical", 60.0):
        outputs = []
        for rep in range(3):
            out = tmp_path / f"run{rep}.jsonl"
            code = main([
                "generate", "--domain", "pick_place", "--n", "60",
                "--len-min", "3", "--len-max", "6", "--seed", "20240101",
                "--workers", "2", "--out", str(out),
            ])
            assert code == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]
        assert outputs[0]  # non-empty


def test_criterion_6_parser_round_trip(pick_place, mini):
    with criterion(6, "parse-serialize identity: bundled + 500 random domains"):
        for dom in (pick_place.domain, mini.domain):
            assert parse_domain(serialize_domain(dom)).domain == dom
        rng = Rng(60601)
        failures = 0
        for _ in range(500):
            dom = random_domain(rng)
            result = parse_domain(serialize_domain(dom))
            if not result.ok or result.domain != dom:
                failures += 1
        assert failures == 0


def test_criterion_7_similarity_metric():
    with criterion(7, "similarity: identity 1.0, disjoint 0.0, hand value 0.58333"):
        a = _manual_record(
            [("approach", ("g_0",)), ("grasp", ("g_0",)), ("lift", ("g_0",))],
            [[("p", "g_0")], [], []],
        )
        b = _manual_record(
            [("approach", ("g_0",)), ("grasp", ("g_0",)), ("shake", ("g_0",))],
            [[("p", "g_0")], [("q", "g_0")], []],
        )
        disjoint_a = _manual_record([("walk", ("x_0",))], [[("p", "x_0")]])
        disjoint_b = _manual_record([("jump", ("y_0",))], [[("q", "y_0")]])
        assert similarity(a, a) == 1.0
        assert similarity(disjoint_a, disjoint_b) == 0.0
        assert abs(similarity(a, b) - 0.5833333333333333) < 1e-9


def test_criterion_8_weighted_sampling_statistics(mini):
    with criterion(8, "empirical action frequencies match weights 1:2:4 (chi-square)"):
        text = """(define (domain w)
  (:action a :parameters () :precondition (and) :effect (and))
  (:action b :parameters () :precondition (and) :effect (and))
  (:action c :parameters () :precondition (and) :effect (and)))"""
        dom = parse_domain(text).raise_on_error()
        weights = SamplingWeights(action_w={"a": 1.0, "b": 2.0, "c": 4.0})
        candidates = list(dom.actions)
        rng = Rng(8881)
        n = 100_000
        counts = {"a": 0, "b": 0, "c": 0}
        for _ in range(n):
            counts[sample_action(weights, None, candidates, rng).name] += 1
        expected = {"a": n / 7, "b": 2 * n / 7, "c": 4 * n / 7}
        for name in counts:
            sigma = (expected[name] * (1 - expected[name] / n)) ** 0.5
            assert abs(counts[name] - expected[name]) <= 3 * sigma, name
        chi = stats.chisquare(
            [counts["a"], counts["b"], counts["c"]],
            [expected["a"], expected["b"], expected["c"]],
        )
        assert chi.pvalue > 0.01


def test_criterion_9_scale_smoke(tmp_path):
    import json

    with criterion(9, "10,000 viable tasks, lengths 3-6, 8 workers, rate in (0,1)", 600.0):
        out = tmp_path / "scale.jsonl"
        code = main([
            "generate", "--domain", "pick_place", "--n", "10000",
            "--len-min", "3", "--len-max", "6", "--seed", "3141",
            "--workers", "8", "--out", str(out),
        ])
        assert code == 0
        assert sum(1 for _ in out.open()) == 10_000
        manifest = json.loads((tmp_path / "scale.jsonl.manifest.json").read_text())
        rate = manifest["stats"]["viability_rate"]
        _emit(f"    scale run viability rate: {rate:.4f} (reference figure not asserted)")
        assert 0.0 < rate < 1.0
