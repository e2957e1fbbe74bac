"""Batch benchmark harness: seeded suites, CSV report, work pool.

Config files are line oriented ('#' comments): `key = value` settings plus
repeated `instance` and `solver` stanzas, e.g.

    seed = 42
    reps = 2
    k = 3
    mode = spanning
    instance gen:uniform-random nodes=8 terminals=8 seed=5
    instance file:examples/small.mpst
    solver exact
    solver mst
    solver irr

Per-row seeds derive from sha256(master seed, row index), so pool
parallelism never changes results. The wall_time_s column is the only
non-reproducible one and is excluded from golden comparisons.
"""

from __future__ import annotations

import csv
import hashlib
import io
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction

from .analysis import theoretical_factor
from .exact import baseline_min_cost, exact_min_power
from .generators import generate
from .instance import Instance, format_cost, parse_instance
from .irr import irr_solve

CSV_HEADER = [
    "schema", "row_type", "instance", "solver", "seed", "power", "cost",
    "ratio_to_exact", "iterations", "wall_time_s", "mean_ratio", "max_ratio",
    "factor_spanning", "factor_steiner", "error",
]
SCHEMA = "powertree-bench-v1"

KNOWN_SOLVERS = ("exact", "mst", "steiner-cost", "irr")


class BenchError(ValueError):
    """Raised on malformed suite configs."""


@dataclass
class SuiteConfig:
    seed: int = 0
    reps: int = 1
    k: int = 3
    mode: str = "steiner"
    max_iters: int | None = None
    threads: int | None = None
    instances: list[tuple[str, str]] = field(default_factory=list)  # (label, spec)
    solvers: list[str] = field(default_factory=list)


def parse_config(text: str) -> SuiteConfig:
    cfg = SuiteConfig()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("instance "):
            spec = line[len("instance "):].strip()
            cfg.instances.append((f"i{len(cfg.instances)}", spec))
        elif line.startswith("solver "):
            name = line[len("solver "):].strip()
            if name not in KNOWN_SOLVERS:
                raise BenchError(f"line {lineno}: unknown solver {name!r}")
            cfg.solvers.append(name)
        elif "=" in line:
            key, _, value = (p.strip() for p in line.partition("="))
            if key == "seed":
                cfg.seed = int(value)
            elif key == "reps":
                cfg.reps = int(value)
            elif key == "k":
                cfg.k = int(value)
            elif key == "mode":
                if value not in ("steiner", "spanning"):
                    raise BenchError(f"line {lineno}: mode must be steiner or spanning")
                cfg.mode = value
            elif key == "max_iters":
                cfg.max_iters = int(value)
            elif key == "threads":
                cfg.threads = int(value)
            else:
                raise BenchError(f"line {lineno}: unknown key {key!r}")
        else:
            raise BenchError(f"line {lineno}: cannot parse {raw.strip()!r}")
    if not cfg.instances:
        raise BenchError("config lists no instances")
    if not cfg.solvers:
        raise BenchError("config lists no solvers")
    return cfg


def _load_instance(spec: str, mode: str) -> Instance:
    if spec.startswith("file:"):
        with open(spec[len("file:"):], encoding="utf-8") as fh:
            inst = parse_instance(fh.read())
    elif spec.startswith("gen:"):
        body = spec[len("gen:"):].split()
        kind = body[0]
        kwargs: dict = {}
        for item in body[1:]:
            key, _, value = item.partition("=")
            if key in ("nodes", "terminals", "seed", "cost_max", "exponent", "grid"):
                kwargs[key] = int(value)
            elif key in ("edge_prob",):
                kwargs[key] = float(value)
            elif key in ("low", "high"):
                kwargs[key] = Fraction(value)
            else:
                raise BenchError(f"unknown generator parameter {key!r}")
        inst = generate(kind, **kwargs)
    else:
        raise BenchError(f"instance spec must start with file: or gen:, got {spec!r}")
    if mode == "spanning":
        inst = Instance(
            inst.node_count, inst.edges,
            frozenset(range(inst.node_count)), inst.root,
        )
    return inst


def derive_seed(master: int, row_index: int) -> int:
    digest = hashlib.sha256(f"{master}:{row_index}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def _run_row(instance: Instance, solver: str, seed: int, cfg: SuiteConfig):
    """Returns (power, cost, iterations) as exact values; raises on failure."""
    if solver == "exact":
        tree = exact_min_power(instance, cfg.mode)
        return tree.total_power, tree.total_cost, ""
    if solver == "mst":
        tree = baseline_min_cost(instance, "spanning")
        return tree.total_power, tree.total_cost, ""
    if solver == "steiner-cost":
        tree = baseline_min_cost(instance, "steiner", allow_fallback=True)
        return tree.total_power, tree.total_cost, ""
    if solver == "irr":
        tree, trace = irr_solve(instance, cfg.k, seed, cfg.max_iters)
        return tree.total_power, tree.total_cost, trace.iterations
    raise BenchError(f"unknown solver {solver!r}")


def run_bench(cfg: SuiteConfig) -> str:
    """Execute the suite and return the CSV report text."""
    instances = [(label, _load_instance(spec, cfg.mode)) for label, spec in cfg.instances]

    rows: list[dict] = []
    for label, inst in instances:
        for solver in cfg.solvers:
            for rep in range(cfg.reps):
                rows.append({"instance": label, "inst_obj": inst, "solver": solver, "rep": rep})
    for idx, row in enumerate(rows):
        row["seed"] = derive_seed(cfg.seed, idx)

    exact_power: dict[str, Fraction] = {}
    if "exact" in cfg.solvers:
        for label, inst in instances:
            try:
                exact_power[label] = exact_min_power(inst, cfg.mode).total_power
            except Exception:
                pass

    threads = cfg.threads or 4
    env_cap = os.environ.get("POWERTREE_THREADS")
    if env_cap:
        threads = min(threads, max(1, int(env_cap)))

    def work(row: dict) -> dict:
        out = {
            "schema": SCHEMA, "row_type": "row", "instance": row["instance"],
            "solver": row["solver"], "seed": str(row["seed"]), "power": "",
            "cost": "", "ratio_to_exact": "", "iterations": "",
            "wall_time_s": "", "mean_ratio": "", "max_ratio": "",
            "factor_spanning": "", "factor_steiner": "", "error": "",
        }
        start = time.perf_counter()
        try:
            power, cost, iters = _run_row(row["inst_obj"], row["solver"], row["seed"], cfg)
            out["power"] = format_cost(power)
            out["cost"] = format_cost(cost)
            out["iterations"] = str(iters)
            ref = exact_power.get(row["instance"])
            if ref is not None and ref > 0:
                out["ratio_to_exact"] = f"{float(power / ref):.6f}"
            elif ref is not None and power == 0:
                out["ratio_to_exact"] = "1.000000"
        except Exception as exc:  # row-level failures never abort the suite
            out["error"] = f"{type(exc).__name__}: {exc}"
        out["wall_time_s"] = f"{time.perf_counter() - start:.4f}"
        return out

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, rows))
    else:
        results = [work(r) for r in rows]

    # summary block: per-solver mean/max ratios plus the theoretical factors
    summary_rows = []
    for solver in dict.fromkeys(cfg.solvers):
        ratios = [
            float(r["ratio_to_exact"]) for r in results
            if r["solver"] == solver and r["ratio_to_exact"]
        ]
        summary = {
            "schema": SCHEMA, "row_type": "summary", "instance": "ALL",
            "solver": solver, "seed": "", "power": "", "cost": "",
            "ratio_to_exact": "", "iterations": "", "wall_time_s": "",
            "mean_ratio": f"{sum(ratios) / len(ratios):.6f}" if ratios else "",
            "max_ratio": f"{max(ratios):.6f}" if ratios else "",
            "factor_spanning": f"{float(theoretical_factor('spanning')):.7f}",
            "factor_steiner": f"{theoretical_factor('steiner'):.7f}",
            "error": "",
        }
        summary_rows.append(summary)

    buffer = io.StringIO()
    writer = csv.DictWriter(buffer, fieldnames=CSV_HEADER, lineterminator="\n")
    writer.writeheader()
    for r in results + summary_rows:
        writer.writerow(r)
    return buffer.getvalue()
