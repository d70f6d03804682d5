"""Experiment execution and CSV trace export.

One CSV per (algorithm, seed) with a fixed column set; every field is
written with round-trip float repr, so reruns with the same seed are
byte-identical except for the wall-clock column.
"""

from __future__ import annotations

import csv
import os
from pathlib import Path

from ..core import ConfigurationError
from ..optimizer import Trajectory, run_sg, run_trish, run_trish_first_order
from .config import (
    build_noise,
    build_problem,
    build_sampler,
    build_stepsizes,
    build_trish_config,
    build_x0,
)

CSV_COLUMNS = (
    "k", "f", "grad_norm_true", "g_norm", "delta", "case", "model_dec",
    "cauchy_dec", "cg_iters", "upsilon", "cost_units", "wall_ns",
)

OUTPUT_DIR_ENV = "TRISH_OUTPUT_DIR"


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_trace_csv(traj: Trajectory, path: Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(CSV_COLUMNS)
        for rec in traj.records:
            writer.writerow([_cell(getattr(rec, col)) for col in CSV_COLUMNS])


def resolve_output_dir(doc: dict, override: str | None = None) -> Path:
    """Priority: explicit override, then env var, then config, then cwd."""
    chosen = override or os.environ.get(OUTPUT_DIR_ENV) or doc.get("output_dir") or "."
    path = Path(chosen)
    try:
        path.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigurationError(f"cannot create output dir {path}: {exc}") from exc
    return path


def run_single(doc: dict, seed: int) -> Trajectory:
    """One run of the configured algorithm at one seed."""
    problem = build_problem(doc["problem"])
    x0 = build_x0(problem, doc)
    sampler = build_sampler(problem, doc)
    algorithm = doc["algorithm"]
    if algorithm == "sg":
        return run_sg(problem, x0, build_stepsizes(doc["stepsizes"]),
                      build_noise(doc.get("noise")), doc["iterations"], seed,
                      sampler=sampler)
    cfg = build_trish_config(doc, seed)
    if algorithm == "trish1":
        return run_trish_first_order(problem, x0, cfg, sampler=sampler)
    return run_trish(problem, x0, cfg, sampler=sampler)


def run_experiment(doc: dict, output_dir: str | None = None) -> list[Path]:
    """Run every configured seed and write one trace CSV per run.

    Returns the written paths.  A diverged run still writes its partial
    trace; the caller can inspect ``Trajectory.aborted`` via the row
    count falling short of iterations + 1.
    """
    out = resolve_output_dir(doc, output_dir)
    paths = []
    failures = []
    for seed in doc["seeds"]:
        traj = run_single(doc, seed)
        path = out / f"{doc['algorithm']}_seed{seed}.csv"
        write_trace_csv(traj, path)
        paths.append(path)
        if traj.aborted is not None:
            failures.append(f"seed {seed}: {traj.aborted}")
    if failures:
        raise RuntimeError(
            "runs diverged (partial traces written): " + "; ".join(failures))
    return paths
