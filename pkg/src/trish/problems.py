"""Test problems with analytically certified constants.

Each problem exports whichever of (grad Lipschitz, Hessian Lipschitz,
PL constant, infimum) it can certify, and never fabricates the rest.
Quadratics certify everything from their spectrum; the logistic problem
certifies curvature bounds from row norms; Rosenbrock and the quartic
bowl certify constants only on a stated box/ball, which callers must
check trajectories against.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .core import (
    Array,
    ConfigurationError,
    HessianEstimate,
    Sampler,
)

# max |d/dt sigmoid'(t)| = sqrt(3)/18, attained at sigma(t) = 1/2 -+ sqrt(3)/6
SIGMOID_CURVATURE_LIPSCHITZ = np.sqrt(3.0) / 18.0


def _sigmoid(t: Array) -> Array:
    # overflow-free on both tails
    out = np.empty_like(t)
    pos = t >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-t[pos]))
    et = np.exp(t[~pos])
    out[~pos] = et / (1.0 + et)
    return out


@dataclass(frozen=True)
class ProblemConstants:
    grad_lipschitz: float
    hess_lipschitz: float | None
    pl_constant: float | None
    f_min: float | None


def constants(problem) -> ProblemConstants:
    """Certified constants of a problem; absent values stay ``None``."""
    return ProblemConstants(
        grad_lipschitz=problem.grad_lipschitz,
        hess_lipschitz=problem.hess_lipschitz,
        pl_constant=problem.pl_constant,
        f_min=problem.f_min,
    )


class QuadraticProblem:
    """f(x) = 0.5 x'Ax - b'x for symmetric A.

    When A is positive definite the PL constant is the smallest
    eigenvalue and the infimum -0.5 b'inv(A)b is attained at inv(A)b;
    otherwise both are reported absent.  The constant Hessian makes the
    Hessian-Lipschitz constant exactly zero.
    """

    def __init__(self, A: Array, b: Array, eigenvalues: Array | None = None):
        A = np.asarray(A, dtype=float)
        b = np.asarray(b, dtype=float)
        if A.ndim != 2 or A.shape[0] != A.shape[1] or A.shape[0] != b.shape[0]:
            raise ConfigurationError("A must be square and match b")
        if np.max(np.abs(A - A.T)) > 1e-10 * max(1.0, np.max(np.abs(A))):
            raise ConfigurationError("A must be symmetric")
        self.A = 0.5 * (A + A.T)
        self.b = b
        self.dim = int(b.shape[0])
        eigs = np.linalg.eigvalsh(self.A) if eigenvalues is None else np.sort(eigenvalues)
        self.eigenvalues = eigs
        self.grad_lipschitz = float(np.max(np.abs(eigs)))
        self.hess_lipschitz = 0.0
        if eigs[0] > 0:
            self.pl_constant: float | None = float(eigs[0])
            self.x_star: Array | None = np.linalg.solve(self.A, b)
            self.f_min: float | None = float(-0.5 * b @ self.x_star)
        else:
            self.pl_constant = None
            self.x_star = None
            self.f_min = None

    def value(self, x: Array) -> float:
        return float(0.5 * x @ (self.A @ x) - self.b @ x)

    def grad(self, x: Array) -> Array:
        return self.A @ x - self.b

    def hvp(self, x: Array, v: Array) -> Array:
        return self.A @ v

    def validation_loss(self, x: Array) -> float:
        return self.value(x)


def make_quadratic(n: int, lam_min: float, lam_max: float, seed: int) -> QuadraticProblem:
    """Random-basis quadratic with log-uniform spectrum on [lam_min, lam_max].

    Both endpoints are always included, so the extreme eigenvalues (and
    hence L_g and, if SPD, the PL constant) are recorded exactly.
    """
    if not 0 < lam_min <= lam_max:
        raise ConfigurationError("need 0 < lam_min <= lam_max")
    rng = np.random.default_rng(seed)
    if n == 1:
        eigs = np.array([lam_min])
    else:
        interior = np.exp(rng.uniform(np.log(lam_min), np.log(lam_max), size=n - 2))
        eigs = np.sort(np.concatenate([[lam_min, lam_max], interior]))
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    q = q * np.sign(np.diag(r))  # fix signs for reproducibility
    A = (q * eigs) @ q.T
    A = 0.5 * (A + A.T)
    v = rng.standard_normal(n)
    b = v / np.linalg.norm(v)
    return QuadraticProblem(A, b, eigenvalues=eigs)


class LogisticProblem:
    """Regularized finite-sum logistic loss over labeled feature rows.

    f(w) = (1/N) sum_i log(1 + exp(-y_i a_i'w)) + (l2/2) ||w||^2 with
    labels in {-1, +1}.  Certified bounds: L_g <= max_i ||a_i||^2 / 4 + l2,
    L_H <= (sqrt(3)/18) * mean_i ||a_i||^3, and c >= l2 when l2 > 0.
    A held-out block, when provided, defines the validation loss.
    """

    def __init__(
        self,
        features: Array,
        labels: Array,
        l2: float = 0.0,
        holdout_features: Array | None = None,
        holdout_labels: Array | None = None,
    ):
        X = np.asarray(features, dtype=float)
        y = np.asarray(labels, dtype=float)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ConfigurationError("features must be (N, dim) with one label per row")
        if not np.all(np.isin(y, (-1.0, 1.0))):
            raise ConfigurationError("labels must be -1 or +1")
        if l2 < 0:
            raise ConfigurationError("l2 must be nonnegative")
        self.X = X
        self.y = y
        self.l2 = float(l2)
        self.n_samples, self.dim = X.shape
        row_norms = np.linalg.norm(X, axis=1)
        self.grad_lipschitz = float(0.25 * np.max(row_norms) ** 2 + l2)
        self.hess_lipschitz = float(SIGMOID_CURVATURE_LIPSCHITZ * np.mean(row_norms**3))
        self.pl_constant = float(l2) if l2 > 0 else None
        self.f_min = None
        self.holdout_X = None if holdout_features is None else np.asarray(holdout_features, float)
        self.holdout_y = None if holdout_labels is None else np.asarray(holdout_labels, float)

    @staticmethod
    def _loss_terms(margins: Array) -> Array:
        return np.logaddexp(0.0, -margins)

    def value(self, x: Array) -> float:
        margins = self.y * (self.X @ x)
        return float(np.mean(self._loss_terms(margins)) + 0.5 * self.l2 * x @ x)

    def grad(self, x: Array) -> Array:
        return self._batch_grad(x, self.X, self.y)

    def hvp(self, x: Array, v: Array) -> Array:
        return self._batch_hvp(x, v, self.X)

    def _batch_grad(self, x: Array, X: Array, y: Array) -> Array:
        weights = -y * _sigmoid(-y * (X @ x))
        return X.T @ weights / X.shape[0] + self.l2 * x

    def _batch_hvp(self, x: Array, v: Array, X: Array) -> Array:
        sig = _sigmoid(X @ x)
        curv = sig * (1.0 - sig)
        return X.T @ (curv * (X @ v)) / X.shape[0] + self.l2 * v

    def batch_gradient(self, x: Array, idx: Array) -> Array:
        return self._batch_grad(x, self.X[idx], self.y[idx])

    def batch_hessian(self, x: Array, idx: Array, m_h: float | None = None) -> HessianEstimate:
        """Same-batch Hessian estimate, optionally capped at ``m_h``."""
        X_b = self.X[idx]
        bound = self.grad_lipschitz  # global bound covers every sub-batch
        tau = 1.0 if m_h is None else min(1.0, m_h / bound)
        return HessianEstimate(
            apply=lambda v: tau * self._batch_hvp(x, v, X_b),
            norm_bound=tau * bound,
        )

    def minibatch_sampler(
        self, batch_size: int, hessian: bool = False, m_h: float | None = None
    ) -> Sampler:
        """Uniform-with-replacement mini-batch sampler.

        One index draw per iteration parameterizes both the gradient
        estimate and (when enabled) the Hessian estimate, so gradient
        streams stay aligned across algorithms that share a seed.
        """
        if batch_size < 1:
            raise ConfigurationError("batch_size must be >= 1")

        def sample(x, k, alpha_k, grad_rng, hess_rng):
            idx = grad_rng.integers(0, self.n_samples, size=batch_size)
            g = self.batch_gradient(x, idx)
            if hessian:
                est = self.batch_hessian(x, idx, m_h)
            else:
                est = HessianEstimate.zero(self.dim)
            return g, est

        return sample

    def validation_loss(self, x: Array) -> float:
        if self.holdout_X is None:
            return self.value(x)
        margins = self.holdout_y * (self.holdout_X @ x)
        return float(np.mean(self._loss_terms(margins)) + 0.5 * self.l2 * x @ x)


def make_logistic(
    n_samples: int, dim: int, l2: float, seed: int, n_holdout: int | None = None
) -> LogisticProblem:
    """Synthetic separable-with-noise classification data.

    Labels come from a random unit normal plus label noise, so the
    problem is realizably noisy; a held-out block of the same
    distribution backs the validation loss.
    """
    if n_samples < 1:
        raise ConfigurationError("n_samples must be >= 1")
    if n_holdout is None:
        n_holdout = max(64, n_samples // 4)
    rng = np.random.default_rng(seed)
    w_true = rng.standard_normal(dim)
    w_true /= np.linalg.norm(w_true)
    total = n_samples + n_holdout
    X = rng.standard_normal((total, dim))
    margins = X @ w_true + 0.3 * rng.standard_normal(total)
    y = np.where(margins >= 0.0, 1.0, -1.0)
    return LogisticProblem(
        X[:n_samples],
        y[:n_samples],
        l2=l2,
        holdout_features=X[n_samples:],
        holdout_labels=y[n_samples:],
    )


class RosenbrockProblem:
    """Chained Rosenbrock with standard coefficients (nonconvex).

    f(x) = sum_i 100 (x_{i+1} - x_i^2)^2 + (1 - x_i)^2; the infimum 0 is
    attained at the all-ones point.  Curvature constants are certified
    only on the box |x_i| <= box_halfwidth (Gershgorin row sums of the
    tridiagonal Hessian); callers asserting them must keep iterates in
    the box.
    """

    def __init__(self, n: int, box_halfwidth: float = 2.0):
        if n < 2:
            raise ConfigurationError("chained Rosenbrock needs n >= 2")
        if box_halfwidth <= 0:
            raise ConfigurationError("box_halfwidth must be positive")
        self.dim = n
        self.box_halfwidth = float(box_halfwidth)
        B = self.box_halfwidth
        diag_max = 1200.0 * B**2 + 400.0 * B + 202.0
        self.grad_lipschitz = diag_max + 800.0 * B
        self.hess_lipschitz = 800.0 + float(np.hypot(2400.0 * B, 400.0))
        self.pl_constant = None
        self.f_min = 0.0

    def in_box(self, x: Array) -> bool:
        return bool(np.max(np.abs(x)) <= self.box_halfwidth)

    def value(self, x: Array) -> float:
        head, tail = x[:-1], x[1:]
        return float(np.sum(100.0 * (tail - head**2) ** 2 + (1.0 - head) ** 2))

    def grad(self, x: Array) -> Array:
        g = np.zeros_like(x)
        head, tail = x[:-1], x[1:]
        resid = tail - head**2
        g[:-1] += -400.0 * head * resid - 2.0 * (1.0 - head)
        g[1:] += 200.0 * resid
        return g

    def hvp(self, x: Array, v: Array) -> Array:
        out = np.zeros_like(v)
        head, tail = x[:-1], x[1:]
        diag_head = 1200.0 * head**2 - 400.0 * tail + 2.0
        off = -400.0 * head
        out[:-1] += diag_head * v[:-1] + off * v[1:]
        out[1:] += off * v[:-1] + 200.0 * v[1:]
        return out

    def validation_loss(self, x: Array) -> float:
        return self.value(x)


class QuarticBowlProblem:
    """Quadratic-plus-quartic bowl with a Lipschitz-certified Hessian.

    f(x) = 0.5 z'Az + (quartic/4) ||z||^4 with z = x - x_star and A
    positive definite; the unique minimizer is x_star with f_min = 0 and
    PL constant lambda_min(A) (global).  L_g and L_H are certified on
    the ball ||z|| <= radius: L_g = lambda_max + 3 q R^2, L_H = 6 q R.
    """

    def __init__(self, A: Array, x_star: Array, quartic: float = 1.0, radius: float = 5.0):
        A = np.asarray(A, dtype=float)
        x_star = np.asarray(x_star, dtype=float)
        if quartic <= 0 or radius <= 0:
            raise ConfigurationError("quartic coefficient and radius must be positive")
        eigs = np.linalg.eigvalsh(A)
        if eigs[0] <= 0:
            raise ConfigurationError("A must be positive definite")
        self.A = 0.5 * (A + A.T)
        self.x_star = x_star
        self.quartic = float(quartic)
        self.radius = float(radius)
        self.dim = int(x_star.shape[0])
        self.grad_lipschitz = float(eigs[-1] + 3.0 * quartic * radius**2)
        self.hess_lipschitz = float(6.0 * quartic * radius)
        self.pl_constant = float(eigs[0])
        self.f_min = 0.0

    def in_ball(self, x: Array) -> bool:
        return bool(np.linalg.norm(x - self.x_star) <= self.radius)

    def value(self, x: Array) -> float:
        z = x - self.x_star
        zz = float(z @ z)
        return float(0.5 * z @ (self.A @ z) + 0.25 * self.quartic * zz**2)

    def grad(self, x: Array) -> Array:
        z = x - self.x_star
        return self.A @ z + self.quartic * float(z @ z) * z

    def hvp(self, x: Array, v: Array) -> Array:
        z = x - self.x_star
        return self.A @ v + self.quartic * (float(z @ z) * v + 2.0 * float(z @ v) * z)

    def validation_loss(self, x: Array) -> float:
        return self.value(x)


def make_quartic_bowl(
    n: int,
    lam_min: float,
    lam_max: float,
    quartic: float,
    radius: float,
    seed: int,
) -> QuarticBowlProblem:
    """Random-basis quartic bowl centered at a random unit-norm point."""
    base = make_quadratic(n, lam_min, lam_max, seed)
    rng = np.random.default_rng(seed + 1)
    x_star = rng.standard_normal(n)
    x_star /= np.linalg.norm(x_star)
    return QuarticBowlProblem(base.A, x_star, quartic=quartic, radius=radius)


def load_quadratic_csv(path: str) -> QuadraticProblem:
    """Quadratic from CSV: n rows of n+1 numbers, [A | b] per row."""
    rows = _read_numeric_csv(path)
    n = len(rows)
    if any(len(r) != n + 1 for r in rows):
        raise ConfigurationError(f"{path}: expected {n} rows of {n + 1} columns ([A | b])")
    data = np.asarray(rows, dtype=float)
    return QuadraticProblem(data[:, :n], data[:, n])


def load_logistic_csv(path: str, l2: float = 0.0) -> LogisticProblem:
    """Logistic data from CSV: feature columns followed by a +-1 label column."""
    rows = _read_numeric_csv(path)
    data = np.asarray(rows, dtype=float)
    if data.ndim != 2 or data.shape[1] < 2:
        raise ConfigurationError(f"{path}: expected feature columns plus a label column")
    return LogisticProblem(data[:, :-1], data[:, -1], l2=l2)


def _read_numeric_csv(path: str) -> list[list[float]]:
    try:
        with open(path, newline="") as fh:
            return [[float(cell) for cell in row] for row in csv.reader(fh) if row]
    except OSError as exc:
        raise ConfigurationError(f"cannot read {path}: {exc}") from exc
    except ValueError as exc:
        raise ConfigurationError(f"non-numeric cell in {path}: {exc}") from exc
