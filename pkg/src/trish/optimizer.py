"""TRish main loop (second- and first-order) and the SG baseline.

Runs are deterministic given a seed: gradient noise and Hessian
perturbations consume separate named streams, so an SG run and a
first-order TRish run sharing a seed see identical gradient samples.
Cost accounting equates one stochastic gradient with one
Hessian-vector product; diagnostic evaluations (true f and gradient
each iteration, model re-evaluation in the solver) are excluded.
"""

from __future__ import annotations

import logging
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .core import (
    Array,
    ConfigurationError,
    GRADIENT_STREAM,
    HESSIAN_STREAM,
    HessianEstimate,
    NoiseModel,
    ProblemOracle,
    Sampler,
    oracle_sampler,
    rng_stream,
)
from .schedules import GammaSchedule, StepsizeSchedule, gammas_at, validate_stepsize
from .subproblem import RadiusCase, TRStep, cauchy_point, exact_trs, model_value, radius, steihaug_cg

logger = logging.getLogger(__name__)

DIVERGENCE_MARGIN = 1e12  # abort when f exceeds f(x_0) by this much


@dataclass(frozen=True)
class SolverSpec:
    kind: str = "steihaug"  # steihaug | exact
    max_iters: int = 3  # CG cap; the per-step cost bound
    tol: float = 1e-10

    def __post_init__(self) -> None:
        if self.kind not in ("steihaug", "exact"):
            raise ConfigurationError(f"unknown solver kind {self.kind!r}")
        if self.max_iters < 1:
            raise ConfigurationError("solver max_iters must be >= 1")


@dataclass(frozen=True)
class TrishConfig:
    stepsizes: StepsizeSchedule
    gammas: GammaSchedule
    iterations: int
    seed: int = 0
    solver: SolverSpec = field(default_factory=SolverSpec)
    noise: NoiseModel = field(default_factory=NoiseModel)
    # advisory by default; verification suites turn this on to fail fast
    enforce_stepsize_bound: bool = False

    def __post_init__(self) -> None:
        if self.iterations < 0:
            raise ConfigurationError("iterations must be >= 0")


@dataclass(frozen=True)
class RunRecord:
    """One trace row: iterate k together with the step that produced it.

    Row 0 is the initial point (step fields ``None``).  For row k >= 1
    the step diagnostics describe iteration k, i.e. the step sampled at
    iterate k-1.  ``cost_units`` is cumulative: one unit per stochastic
    gradient plus one per Hessian product consumed by the subproblem
    solver (the exact solver's dense materialization counts dim
    products; zero-Hessian runs consume none).
    """

    k: int
    f: float
    grad_norm_true: float
    g_norm: float | None = None
    delta: float | None = None
    case: int | None = None
    model_dec: float | None = None
    cauchy_dec: float | None = None
    cg_iters: int | None = None
    upsilon: float | None = None
    cost_units: int = 0
    wall_ns: int = 0
    # diagnostics beyond the exported schema
    alpha: float | None = None
    gamma1: float | None = None
    gamma2: float | None = None
    step_norm: float | None = None
    hess_bound: float | None = None
    noise_step_dot: float | None = None


@dataclass
class Trajectory:
    algorithm: str
    seed: int
    records: list[RunRecord]
    final_x: Array
    config: TrishConfig | None = None
    aborted: str | None = None
    iterates: list[Array] | None = None  # populated when keep_iterates is set

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.records], dtype=float)

    def gaps(self, f_min: float) -> np.ndarray:
        return self.column("f") - f_min


def trish_step(
    x: Array,
    g: Array,
    hess: HessianEstimate,
    alpha: float,
    gamma1: float,
    gamma2: float,
    solver: SolverSpec,
) -> tuple[Array, TRStep]:
    """One TRish update: radius from ||g||, subproblem solve, x + s."""
    g_norm = float(np.linalg.norm(g))
    if g_norm == 0.0:
        # radius rule gives delta = 0; the step degenerates to zero
        zero = np.zeros_like(x)
        return x.copy(), TRStep(zero, 0.0, RadiusCase.CASE1, 0.0, 0.0, 0, False)
    delta, case = radius(g_norm, alpha, gamma1, gamma2)
    if solver.kind == "steihaug":
        step = steihaug_cg(g, hess, delta, solver.max_iters, solver.tol, case)
    else:
        dense = hess.dense(x.shape[0])
        s, upsilon = exact_trs(g, dense, delta, solver.tol)
        step = TRStep(
            s=s,
            delta=delta,
            case=case,
            model_decrease=-model_value(g, dense, s),
            cauchy_decrease=-model_value(g, dense, cauchy_point(g, dense, delta)),
            cg_iterations=0,
            boundary_hit=bool(upsilon > 0.0 or np.linalg.norm(s) >= delta * (1.0 - 1e-12)),
            upsilon=float(upsilon),
            hessian_products=x.shape[0],  # dense materialization
        )
    return x + step.s, step


def _initial_record(oracle: ProblemOracle, x: Array, t0: int) -> tuple[RunRecord, float, Array]:
    f0 = oracle.value(x)
    g0 = oracle.grad(x)
    rec = RunRecord(
        k=0,
        f=f0,
        grad_norm_true=float(np.linalg.norm(g0)),
        wall_ns=time.perf_counter_ns() - t0,
    )
    return rec, f0, g0


def _diverged(f: float, f0: float) -> bool:
    return not np.isfinite(f) or f > f0 + DIVERGENCE_MARGIN


def run_trish(
    oracle: ProblemOracle,
    x0: Array,
    config: TrishConfig,
    sampler: Sampler | None = None,
    algorithm: str = "trish",
    keep_iterates: bool = False,
) -> Trajectory:
    """Run TRish for the configured number of iterations.

    The trace has ``iterations + 1`` rows (row 0 is the initial point)
    unless the divergence guard aborts the run early.  Deterministic
    given ``config.seed``.
    """
    x = np.asarray(x0, dtype=float).copy()
    if not np.all(np.isfinite(x)):
        raise ConfigurationError("initial point must be finite")
    if sampler is None:
        sampler = oracle_sampler(oracle, config.noise)
    grad_rng = rng_stream(config.seed, GRADIENT_STREAM)
    hess_rng = rng_stream(config.seed, HESSIAN_STREAM)

    t0 = time.perf_counter_ns()
    rec0, f0, true_g = _initial_record(oracle, x, t0)
    records = [rec0]
    iterates = [x.copy()] if keep_iterates else None
    cost = 0
    aborted = None
    warned = False

    for k in range(1, config.iterations + 1):
        alpha = config.stepsizes.at(k)
        gamma1, gamma2 = gammas_at(config.gammas, config.stepsizes, k)
        g, hess = sampler(x, k, alpha, grad_rng, hess_rng)

        ok = validate_stepsize(alpha, gamma1, gamma2, oracle.grad_lipschitz, hess.norm_bound)
        if not ok:
            if config.enforce_stepsize_bound:
                raise ConfigurationError(
                    f"stepsize precondition violated at k={k}: alpha={alpha}"
                )
            if not warned:
                logger.warning(
                    "stepsize alpha_%d=%.3g exceeds the guaranteed-decrease bound; "
                    "convergence theory does not apply to this run", k, alpha)
                warned = True

        x_new, step = trish_step(x, g, hess, alpha, gamma1, gamma2, config.solver)
        cost += 1 + step.hessian_products
        f_new = oracle.value(x_new)
        true_g_new = oracle.grad(x_new)
        records.append(RunRecord(
            k=k,
            f=f_new,
            grad_norm_true=float(np.linalg.norm(true_g_new)),
            g_norm=float(np.linalg.norm(g)),
            delta=step.delta,
            case=int(step.case) if step.case is not None else None,
            model_dec=step.model_decrease,
            cauchy_dec=step.cauchy_decrease,
            cg_iters=step.cg_iterations,
            upsilon=step.upsilon,
            cost_units=cost,
            wall_ns=time.perf_counter_ns() - t0,
            alpha=alpha,
            gamma1=gamma1,
            gamma2=gamma2,
            step_norm=float(np.linalg.norm(step.s)),
            hess_bound=hess.norm_bound,
            noise_step_dot=float((true_g - g) @ step.s),
        ))
        x, true_g = x_new, true_g_new
        if iterates is not None:
            iterates.append(x.copy())
        if _diverged(f_new, f0):
            aborted = f"divergence guard tripped at iteration {k} (f={f_new!r})"
            break

    return Trajectory(algorithm, config.seed, records, x, config=config,
                      aborted=aborted, iterates=iterates)


def run_trish_first_order(
    oracle: ProblemOracle,
    x0: Array,
    config: TrishConfig,
    sampler: Sampler | None = None,
    keep_iterates: bool = False,
) -> Trajectory:
    """TRish with the Hessian estimate pinned to zero (cost: 1 unit/iteration)."""
    config = replace(config, noise=replace(
        config.noise, hessian_kind="zero", m_h=0.0, perturbation=0.0))
    return run_trish(oracle, x0, config, sampler=sampler, algorithm="trish1",
                     keep_iterates=keep_iterates)


def run_sg(
    oracle: ProblemOracle,
    x0: Array,
    stepsizes: StepsizeSchedule,
    noise: NoiseModel,
    iterations: int,
    seed: int,
    sampler: Sampler | None = None,
    keep_iterates: bool = False,
) -> Trajectory:
    """Stochastic-gradient baseline x_{k+1} = x_k - alpha_k g_k.

    Emits the same trace schema as TRish (radius/step fields empty) at
    one cost unit per iteration, drawing gradient samples from the same
    named stream a TRish run with the same seed would use.
    """
    if iterations < 0:
        raise ConfigurationError("iterations must be >= 0")
    x = np.asarray(x0, dtype=float).copy()
    if not np.all(np.isfinite(x)):
        raise ConfigurationError("initial point must be finite")
    noise = replace(noise, hessian_kind="zero", m_h=0.0, perturbation=0.0)
    if sampler is None:
        sampler = oracle_sampler(oracle, noise)
    grad_rng = rng_stream(seed, GRADIENT_STREAM)
    hess_rng = rng_stream(seed, HESSIAN_STREAM)

    t0 = time.perf_counter_ns()
    rec0, f0, _ = _initial_record(oracle, x, t0)
    records = [rec0]
    iterates = [x.copy()] if keep_iterates else None
    aborted = None

    for k in range(1, iterations + 1):
        alpha = stepsizes.at(k)
        g, _ = sampler(x, k, alpha, grad_rng, hess_rng)
        x = x - alpha * g
        f_new = oracle.value(x)
        records.append(RunRecord(
            k=k,
            f=f_new,
            grad_norm_true=float(np.linalg.norm(oracle.grad(x))),
            g_norm=float(np.linalg.norm(g)),
            cost_units=k,
            wall_ns=time.perf_counter_ns() - t0,
            alpha=alpha,
            step_norm=float(alpha * np.linalg.norm(g)),
        ))
        if iterates is not None:
            iterates.append(x.copy())
        if _diverged(f_new, f0):
            aborted = f"divergence guard tripped at iteration {k} (f={f_new!r})"
            break

    return Trajectory("sg", seed, records, x, aborted=aborted, iterates=iterates)
