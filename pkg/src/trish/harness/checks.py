"""Per-step contract checks evaluated on recorded trajectories.

Every trust-region step a run records must satisfy the feasibility,
Cauchy-decrease, and steplength contracts; on problems with a certified
gradient-Lipschitz constant the per-step Taylor upper bound is also
assertable.  Suites stream trajectories through these counters so the
acceptance gate can report zero violations over everything that ran.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..optimizer import Trajectory

CAUCHY_TOL = 1e-10
FEAS_TOL = 1e-12
TAYLOR_TOL = 1e-9


@dataclass
class StepContractCounter:
    checked: int = 0
    cauchy_violations: int = 0
    cauchy_bound_violations: int = 0
    cauchy_second_bound_violations: int = 0
    feasibility_violations: int = 0
    steplength_violations: int = 0
    worst_cauchy_margin: float = field(default=np.inf)

    @property
    def total_violations(self) -> int:
        return (
            self.cauchy_violations
            + self.cauchy_bound_violations
            + self.cauchy_second_bound_violations
            + self.feasibility_violations
            + self.steplength_violations
        )

    def update(self, traj: Trajectory) -> None:
        for rec in traj.records[1:]:
            if rec.g_norm is None or rec.delta is None:
                continue  # SG rows carry no subproblem diagnostics
            self.checked += 1
            if rec.g_norm == 0.0:
                continue
            margin = rec.model_dec - rec.cauchy_dec
            self.worst_cauchy_margin = min(self.worst_cauchy_margin, margin)
            if margin < -CAUCHY_TOL:
                self.cauchy_violations += 1
            # -model(s) >= 0.5 ||g|| min{delta, ||g||/B}; B = 0 degenerates
            # to the delta branch.  The certified bound B only weakens the
            # asserted inequality relative to the true estimate norm.
            bound = rec.hess_bound or 0.0
            if bound > 0.0:
                ref = min(rec.delta, rec.g_norm / bound)
            else:
                ref = rec.delta
            if rec.model_dec < 0.5 * rec.g_norm * ref - CAUCHY_TOL:
                self.cauchy_bound_violations += 1
            # second Cauchy bound on the reference decrease itself:
            # cauchy_dec >= min{delta ||g|| - delta^2 B / 2, ||g||^2 / (2B)}
            if bound > 0.0:
                ref2 = min(rec.delta * rec.g_norm - 0.5 * rec.delta**2 * bound,
                           0.5 * rec.g_norm**2 / bound)
            else:
                ref2 = rec.delta * rec.g_norm
            if rec.cauchy_dec < ref2 - CAUCHY_TOL:
                self.cauchy_second_bound_violations += 1
            if rec.step_norm > rec.delta * (1.0 + FEAS_TOL):
                self.feasibility_violations += 1
            limit = rec.alpha * max(1.0, rec.gamma1 * rec.g_norm)
            if rec.step_norm > limit * (1.0 + FEAS_TOL):
                self.steplength_violations += 1

    def stats(self) -> dict:
        return {
            "steps_checked": self.checked,
            "cauchy_violations": self.cauchy_violations,
            "cauchy_bound_violations": self.cauchy_bound_violations,
            "cauchy_second_bound_violations": self.cauchy_second_bound_violations,
            "feasibility_violations": self.feasibility_violations,
            "steplength_violations": self.steplength_violations,
            "worst_cauchy_margin": None if self.checked == 0 else self.worst_cauchy_margin,
        }


def taylor_violations(traj: Trajectory, grad_lipschitz: float) -> tuple[int, int]:
    """Count violations of the per-step Taylor upper bound.

    f(x_k) <= f(x_{k-1}) + g's + s'Hs/2 + (grad f - g)'s
    + (L_g + B) ||s||^2 / 2 + tol, using the certified Hessian-norm
    bound B in place of the unavailable true estimate norm (which only
    weakens the asserted bound).  Valid wherever ``grad_lipschitz``
    certifies the true Hessian along the step.
    """
    checked = 0
    violations = 0
    prev_f = traj.records[0].f
    for rec in traj.records[1:]:
        if rec.model_dec is None:
            prev_f = rec.f
            continue
        checked += 1
        rhs = (
            prev_f
            - rec.model_dec
            + rec.noise_step_dot
            + 0.5 * (grad_lipschitz + (rec.hess_bound or 0.0)) * rec.step_norm**2
        )
        if rec.f > rhs + TAYLOR_TOL:
            violations += 1
        prev_f = rec.f
    return checked, violations


def cost_accounting_ok(
    traj: Trajectory, mode: str, cg_cap: int = 3, dim: int | None = None
) -> bool:
    """Per-iteration cost increments match the solver's product budget.

    first-order and SG runs cost exactly one unit per iteration;
    Steihaug runs cost 1 + (CG products) <= 1 + cap; exact-solver runs
    cost 1 + dim for the dense materialization.
    """
    prev = 0
    for rec in traj.records[1:]:
        inc = rec.cost_units - prev
        prev = rec.cost_units
        if mode == "first-order":
            if inc != 1:
                return False
        elif mode == "steihaug":
            if not 1 <= inc <= 1 + cg_cap:
                return False
        elif mode == "exact":
            if inc != 1 + (dim or 0):
                return False
        else:
            raise ValueError(f"unknown cost mode {mode!r}")
    return True


def seed_mean_and_se(per_seed: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Mean and standard error across the seed axis (axis 0)."""
    mean = per_seed.mean(axis=0)
    if per_seed.shape[0] > 1:
        se = per_seed.std(axis=0, ddof=1) / np.sqrt(per_seed.shape[0])
    else:
        se = np.zeros_like(mean)
    return mean, se
