"""Command-line pipeline: generate, count, validate, similarity.

Exit codes are stable contracts for scripting: 0 success, 2 configuration
error, 3 generation budget exhausted, 4 validation failure.

Generation parallelizes over a worker pool. Every task attempt k draws its
own seed chain from the master seed, workers consume attempt indices, and
output keeps attempt order, so the dataset bytes are identical for any
--workers value.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__
from .data import data_path
from .dataset import (
    build_record,
    import_tasks,
    record_line,
    rebuild_task,
    revalidate_record,
    similarity,
)
from .dsl import Bundle, load_bundle
from .errors import (
    ConfigError,
    DomainMismatchError,
    GenerationExhausted,
    OracleCeilingError,
    SchemaVersionError,
    TaskforgeError,
)
from .exhaustive import count_unconstrained, enumerate_valid_sequences
from .generate import GenerationConfig, generate_sequence
from .physical import RobotModel, SpawnParams, validate_task
from .rng import Rng, derive_seed

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_EXHAUSTED = 3
EXIT_VALIDATION = 4

CONFIG_DIR_ENV = "TASKFORGE_CONFIG_DIR"

_SIDECAR_EXT = {"domain": ".pddl", "weights": ".weights", "shapes": ".shapes", "rules": ".rules"}


def _resolve(kind: str, value: str | None, domain_path: Path | None) -> Path | None:
    """Locate a config file: explicit path, config-dir entry, sibling of the
    domain file, or bundled data, in that order."""
    ext = _SIDECAR_EXT[kind]
    if value is not None:
        p = Path(value)
        if p.exists():
            return p
        cfg_dir = os.environ.get(CONFIG_DIR_ENV)
        if cfg_dir:
            for candidate in (Path(cfg_dir) / value, Path(cfg_dir) / (value + ext)):
                if candidate.exists():
                    return candidate
        bundled = data_path(value + ext)
        if bundled.exists():
            return bundled
        raise ConfigError(f"cannot locate {kind} file: {value}")
    if domain_path is not None:
        sibling = domain_path.with_suffix(ext)
        if sibling.exists():
            return sibling
    return None


def _load(args) -> Bundle:
    domain = _resolve("domain", args.domain, None)
    return load_bundle(
        domain,
        _resolve("weights", args.weights, domain),
        _resolve("shapes", args.shapes, domain),
        _resolve("rules", args.rules, domain),
    )


def _sha256_file(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


# ---------------------------------------------------------------------------
# generate
# ---------------------------------------------------------------------------

_WORKER: dict = {}


def _worker_init(domain, weights, shapes, rules, knobs):
    _WORKER["bundle"] = load_bundle(domain, weights, shapes, rules)
    _WORKER["knobs"] = knobs


def _attempt(bundle: Bundle, knobs: dict, index: int) -> tuple[int, str, str | None]:
    """Run one task attempt; returns (index, status, record line or None)."""
    attempt_seed = derive_seed(knobs["seed"], index)
    length_rng = Rng(attempt_seed)
    length = length_rng.randint(knobs["len_min"], knobs["len_max"])
    cfg = GenerationConfig(
        length=length,
        max_entities=knobs["max_entities"],
        seed=derive_seed(attempt_seed, 1),
    )
    try:
        task = generate_sequence(bundle.domain, bundle.weights, cfg)
    except GenerationExhausted:
        return index, "symbolic-fail", None
    spawn_seed = derive_seed(attempt_seed, 2)
    robot = RobotModel()
    params = SpawnParams()
    report = validate_task(
        bundle.domain, task, bundle.shapes, robot, bundle.rules, seed=spawn_seed,
        params=params, max_attempts=knobs["max_attempts"], short_circuit=True,
    )
    if not report.feasible:
        return index, "infeasible", None
    record = build_record(
        bundle.domain, bundle.hash, task, cfg, report,
        spawn_seed=spawn_seed, max_attempts=knobs["max_attempts"], params=params,
    )
    return index, "viable", record_line(record)


def _worker_chunk(indices: list[int]) -> list[tuple[int, str, str | None]]:
    bundle, knobs = _WORKER["bundle"], _WORKER["knobs"]
    return [_attempt(bundle, knobs, i) for i in indices]


def cmd_generate(args) -> int:
    t_start = time.monotonic()
    paths = {
        "domain": _resolve("domain", args.domain, None),
    }
    paths["weights"] = _resolve("weights", args.weights, paths["domain"])
    paths["shapes"] = _resolve("shapes", args.shapes, paths["domain"])
    paths["rules"] = _resolve("rules", args.rules, paths["domain"])
    bundle = load_bundle(paths["domain"], paths["weights"], paths["shapes"], paths["rules"])
    t_loaded = time.monotonic()

    if args.len_min < 1 or args.len_max < args.len_min:
        raise ConfigError("need 1 <= len-min <= len-max")
    knobs = {
        "seed": args.seed,
        "len_min": args.len_min,
        "len_max": args.len_max,
        "max_entities": args.max_entities,
        "max_attempts": args.max_attempts,
    }
    budget = max(200, 40 * args.n)
    results: dict[int, tuple[str, str | None]] = {}
    next_unprocessed = 0
    pool = None
    if args.workers > 1 and args.n > 0:
        pool = ProcessPoolExecutor(
            max_workers=args.workers,
            initializer=_worker_init,
            initargs=(paths["domain"], paths["weights"], paths["shapes"], paths["rules"], knobs),
        )

    def run_wave(count: int) -> None:
        nonlocal next_unprocessed
        indices = list(range(next_unprocessed, min(next_unprocessed + count, budget)))
        next_unprocessed = indices[-1] + 1 if indices else next_unprocessed
        if not indices:
            return
        if pool is None:
            for i in indices:
                idx, status, line = _attempt(bundle, knobs, i)
                results[idx] = (status, line)
        else:
            chunks = [c for c in (indices[c::args.workers] for c in range(args.workers)) if c]
            for part in pool.map(_worker_chunk, chunks):
                for idx, status, line in part:
                    results[idx] = (status, line)

    # Process attempts in waves until n viable tasks exist in index order.
    viable_lines: list[str] = []
    stats = {"attempts": 0, "symbolic_valid": 0, "viable": 0}
    try:
        while len(viable_lines) < args.n and next_unprocessed < budget:
            remaining = args.n - len(viable_lines)
            run_wave(max(2 * args.workers, int(remaining * 1.25) + 8))
            viable_lines = []
            stats = {"attempts": 0, "symbolic_valid": 0, "viable": 0}
            for idx in range(next_unprocessed):
                status, line = results[idx]
                stats["attempts"] += 1
                if status != "symbolic-fail":
                    stats["symbolic_valid"] += 1
                if status == "viable":
                    viable_lines.append(line)
                    if len(viable_lines) == args.n:
                        break
    finally:
        if pool is not None:
            pool.shutdown()
    exhausted = len(viable_lines) < args.n
    stats["viable"] = len(viable_lines)
    stats["viability_rate"] = (
        stats["viable"] / stats["symbolic_valid"] if stats["symbolic_valid"] else 0.0
    )
    t_generated = time.monotonic()

    out = Path(args.out)
    with out.open("w", encoding="utf-8") as sink:
        for line in viable_lines:
            sink.write(line + "\n")

    manifest = {
        "tool_version": __version__,
        "command": "generate",
        "inputs": {
            kind: {"path": str(p), "sha256": _sha256_file(p)} if p else None
            for kind, p in paths.items()
        },
        "config": {
            "n": args.n,
            "len_min": args.len_min,
            "len_max": args.len_max,
            "seed": args.seed,
            "workers": args.workers,
            "max_entities": args.max_entities,
            "max_attempts": args.max_attempts,
            "attempt_budget": budget,
        },
        "stats": stats,
        "timings": {
            "load_s": round(t_loaded - t_start, 3),
            "generate_s": round(t_generated - t_loaded, 3),
            "total_s": round(time.monotonic() - t_start, 3),
        },
        "outcome": "budget-exhausted" if exhausted else "ok",
    }
    manifest_path = out.with_name(out.name + ".manifest.json")
    manifest_path.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")

    print(
        f"wrote {stats['viable']}/{args.n} tasks to {out} "
        f"(attempts {stats['attempts']}, viability rate {stats['viability_rate']:.3f})"
    )
    print(f"manifest: {manifest_path}")
    if exhausted:
        print("attempt budget exhausted before reaching n viable tasks", file=sys.stderr)
        return EXIT_EXHAUSTED
    return EXIT_OK


# ---------------------------------------------------------------------------
# count
# ---------------------------------------------------------------------------


def cmd_count(args) -> int:
    bundle = _load(args)
    total = count_unconstrained(max(1, len(bundle.domain.actions)), args.length)
    print(f"actions: {len(bundle.domain.actions)}")
    print(f"length: {args.length}")
    print(f"unconstrained: {total}")
    if args.oracle:
        tasks, counts = enumerate_valid_sequences(bundle.domain, args.length, args.max_entities)
        print(f"valid_grounded: {counts.grounded}")
        print(f"valid_lifted: {counts.lifted}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# validate
# ---------------------------------------------------------------------------


def cmd_validate(args) -> int:
    bundle = _load(args)
    try:
        with open(args.dataset, encoding="utf-8") as f:
            records = import_tasks(f)
    except SchemaVersionError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    failures = []
    for record in records:
        problems = []
        if record.domain_hash != bundle.hash:
            problems.append("domain hash mismatch")
        else:
            problems.extend(revalidate_record(bundle.domain, record))
            task = rebuild_task(bundle.domain, record)
            report = validate_task(
                bundle.domain, task, bundle.shapes, RobotModel(), bundle.rules,
                seed=record.spawn_seed, max_attempts=record.max_attempts,
            )
            rerun = tuple((c.index, c.feasible, c.attempts, c.reason) for c in report.subgoals)
            stored = tuple(tuple(v) for v in record.viability)
            if rerun != stored:
                problems.append("viability report diverges from re-run")
        if problems:
            failures.append((record.task_id, problems))
    print(f"validated {len(records)} records: {len(records) - len(failures)} ok, {len(failures)} failed")
    for task_id, problems in failures:
        for p in problems:
            print(f"  {task_id}: {p}", file=sys.stderr)
    return EXIT_VALIDATION if failures else EXIT_OK


# ---------------------------------------------------------------------------
# similarity
# ---------------------------------------------------------------------------


def cmd_similarity(args) -> int:
    with open(args.dataset, encoding="utf-8") as f:
        records = import_tasks(f)
    if not records:
        print("empty dataset: nothing to compare", file=sys.stderr)
        return EXIT_CONFIG
    hashes = {r.domain_hash for r in records}
    if len(hashes) > 1:
        raise ConfigError("dataset mixes records from different domains")
    n = len(records)
    matrix = [[0.0] * n for _ in range(n)]
    for i in range(n):
        matrix[i][i] = 1.0
        for j in range(i + 1, n):
            s = similarity(records[i], records[j])
            matrix[i][j] = matrix[j][i] = s
    lines = ["task_id\t" + "\t".join(r.task_id for r in records)]
    for i, r in enumerate(records):
        lines.append(r.task_id + "\t" + "\t".join(f"{v:.6f}" for v in matrix[i]))
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
        print(f"wrote {n}x{n} similarity matrix to {args.out}")
    else:
        sys.stdout.write(text)
    return EXIT_OK


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def _add_bundle_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--domain", required=True, help="domain file path or bundled name")
    p.add_argument("--weights", help="weights sidecar (defaults to <domain>.weights)")
    p.add_argument("--shapes", help="shapes sidecar (defaults to <domain>.shapes)")
    p.add_argument("--rules", help="spawn-rules sidecar (defaults to <domain>.rules)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="taskforge",
        description="Procedural generator of validated long-horizon manipulation tasks.",
    )
    parser.add_argument("--version", action="version", version=f"taskforge {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="generate a dataset of viable tasks")
    _add_bundle_flags(g)
    g.add_argument("--n", type=int, required=True, help="number of viable tasks to produce")
    g.add_argument("--len-min", type=int, default=3)
    g.add_argument("--len-max", type=int, default=6)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--workers", type=int, default=1)
    g.add_argument("--out", required=True, help="output dataset path (.jsonl)")
    g.add_argument("--max-attempts", type=int, default=200, help="spawn attempts per subgoal")
    g.add_argument("--max-entities", type=int, default=8)
    g.set_defaults(func=cmd_generate)

    c = sub.add_parser("count", help="count sequences (exact big integers)")
    _add_bundle_flags(c)
    c.add_argument("--length", type=int, required=True)
    c.add_argument("--oracle", action="store_true", help="also enumerate the exact valid count")
    c.add_argument("--max-entities", type=int, default=3)
    c.set_defaults(func=cmd_count)

    v = sub.add_parser("validate", help="re-verify a stored dataset")
    _add_bundle_flags(v)
    v.add_argument("--dataset", required=True)
    v.set_defaults(func=cmd_validate)

    s = sub.add_parser("similarity", help="pairwise task similarity matrix")
    s.add_argument("--dataset", required=True)
    s.add_argument("--out", help="output path (default: stdout)")
    s.set_defaults(func=cmd_similarity)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OracleCeilingError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ConfigError, DomainMismatchError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except GenerationExhausted as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except TaskforgeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
