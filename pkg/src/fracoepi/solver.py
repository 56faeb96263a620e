"""Fractional Adams-Bashforth-Moulton PECE integration of Caputo systems.

Solves ``D^a x = f(t, x)`` (Caputo derivative, 0 < a <= 1) through the
equivalent Volterra form ``x(t) = x(0) + (1/Gamma(a)) * integral of
(t-s)^(a-1) f(s, x(s)) ds`` on a uniform grid: the predictor integrates the
kernel against piecewise-constant history (fractional forward rule), the
corrector against the piecewise-linear interpolant (product trapezoid), with
the classic predict-evaluate-correct-evaluate sweep per step.  For a = 1 the
weights degenerate to the classical rectangle/trapezoid Adams pair.

The memory term makes a single solve inherently sequential and O(n^2) in the
node count; independent solves share nothing and can run concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "DivergenceError",
    "FodeProblem",
    "SolverConfig",
    "Trajectory",
    "abm_weights",
    "solve_pece",
]

DIVERGENCE_LIMIT = 1e12  # component magnitude treated as blow-up
DEFAULT_NODE_CAP = 2_000_000


class DivergenceError(RuntimeError):
    """Raised when the computed solution blows up or turns non-finite."""

    def __init__(self, node: int, time: float, state: np.ndarray):
        self.node = node
        self.time = time
        self.state = state
        super().__init__(
            f"solution diverged at node {node} (t = {time:g}): state = {state}"
        )


@dataclass(frozen=True)
class FodeProblem:
    """Caputo initial value problem of commensurate order in (0, 1]."""

    order: float
    initial_state: np.ndarray
    rhs: Callable[[float, np.ndarray], np.ndarray]
    t0: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.order <= 1.0):
            raise ValueError(f"order must lie in (0,1], got {self.order}")
        state = np.atleast_1d(np.asarray(self.initial_state, dtype=float))
        if state.ndim != 1 or state.size == 0:
            raise ValueError("initial_state must be a non-empty vector")
        if not np.all(np.isfinite(state)):
            raise ValueError(f"initial_state must be finite, got {state}")
        if not (math.isfinite(self.t0) and self.t0 >= 0.0):
            raise ValueError(f"t0 must be finite and non-negative, got {self.t0}")
        object.__setattr__(self, "initial_state", state)

    @property
    def dimension(self) -> int:
        return self.initial_state.size


@dataclass(frozen=True)
class SolverConfig:
    """Uniform-grid settings for :func:`solve_pece`.

    ``memory_window`` truncates the history sums to the most recent nodes;
    the default (None) keeps full memory, which is what the convergence
    guarantees assume.  Truncation trades accuracy for speed and is only
    appropriate for long runs of strongly decaying systems.
    """

    step: float
    t_end: float
    corrector_iterations: int = 1
    memory_window: int | None = None
    node_cap: int = DEFAULT_NODE_CAP

    def __post_init__(self):
        if not (math.isfinite(self.step) and self.step > 0.0):
            raise ValueError(f"step must be positive, got {self.step}")
        if not math.isfinite(self.t_end):
            raise ValueError("t_end must be finite")
        if self.corrector_iterations < 1:
            raise ValueError("corrector_iterations must be a positive integer")
        if self.memory_window is not None and self.memory_window < 1:
            raise ValueError("memory_window must be a positive integer or None")
        if self.node_cap < 1:
            raise ValueError("node_cap must be positive")

    def node_count(self, t0: float) -> int:
        """Number of steps from t0; rejects spans beyond the node cap."""
        span = self.t_end - t0
        if span < 0.0:
            raise ValueError(f"t_end = {self.t_end} lies before t0 = {t0}")
        steps = int(round(span / self.step))
        if steps > self.node_cap:
            raise ValueError(
                f"{steps} nodes exceed the configured cap of {self.node_cap}"
            )
        return steps


@dataclass(frozen=True)
class Trajectory:
    """Grid solution: times (n+1,), states (n+1, dim), row 0 = initial state."""

    times: np.ndarray
    states: np.ndarray
    order: float
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.times.setflags(write=False)
        self.states.setflags(write=False)

    @property
    def step(self) -> float:
        return float(self.metadata.get("step", np.nan))

    @property
    def final_state(self) -> np.ndarray:
        return self.states[-1]


def abm_weights(order: float, n: int, step: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Corrector and predictor weights for the step onto node n+1.

    Returns ``(corrector, predictor)`` where ``predictor[j] =
    (h^a/a)*((n+1-j)^a - (n-j)^a)`` multiplies f(t_j) inside the 1/Gamma(a)
    predictor sum (j = 0..n), and ``corrector[j]`` (j = 0..n+1) is the
    product-trapezoid weight including its h^a/Gamma(a+2) normalization.
    Both quadratures integrate a constant exactly:
    sum(predictor) = h^a (n+1)^a / a and
    sum(corrector) = h^a (n+1)^a (a+1) / Gamma(a+2).
    """
    if not (0.0 < order <= 1.0):
        raise ValueError(f"order must lie in (0,1], got {order}")
    if n < 0:
        raise ValueError(f"node index must be non-negative, got {n}")
    if step <= 0.0:
        raise ValueError(f"step must be positive, got {step}")
    a = order
    ha = step**a
    j = np.arange(n + 1, dtype=float)
    predictor = (ha / a) * ((n + 1 - j) ** a - (n - j) ** a)
    corrector = np.empty(n + 2)
    corrector[0] = n ** (a + 1) - (n - a) * (n + 1) ** a
    jj = np.arange(1, n + 1, dtype=float)
    corrector[1 : n + 1] = (
        (n - jj + 2) ** (a + 1) + (n - jj) ** (a + 1) - 2 * (n - jj + 1) ** (a + 1)
    )
    corrector[n + 1] = 1.0
    corrector *= ha / math.gamma(a + 2)
    return corrector, predictor


def solve_pece(problem: FodeProblem, config: SolverConfig) -> Trajectory:
    """Integrate a Caputo problem on the uniform grid defined by config.

    Raises :class:`DivergenceError` as soon as a corrected state exceeds
    ``DIVERGENCE_LIMIT`` in magnitude or turns non-finite.  States are not
    clipped in any way; slightly negative population values near zero are
    reported as computed so that downstream checks can judge them.
    """
    a = problem.order
    h = config.step
    n_steps = config.node_count(problem.t0)
    dim = problem.dimension
    times = problem.t0 + h * np.arange(n_steps + 1)

    states = np.empty((n_steps + 1, dim))
    rhs_values = np.empty((n_steps + 1, dim))
    states[0] = problem.initial_state
    rhs_values[0] = _eval_rhs(problem.rhs, times[0], states[0])

    if n_steps > 0:
        # lag-indexed weight tables shared by every step:
        #   w[m] multiplies f(t_{n+1-m}) in the predictor sum (m = 1..n+1)
        #   d[u] multiplies f(t_{n+1-u}) in the corrector sum (u = 1..n)
        # both are stored reversed so every per-step dot runs on contiguous
        # slices (w_rev[N-n:] lines up with rhs_values[0:n+1], and so on)
        grid = np.arange(n_steps + 2, dtype=float)
        pow_a = grid**a
        pow_a1 = grid ** (a + 1.0)
        w = np.empty(n_steps + 2)
        w[0] = 0.0
        w[1:] = (h**a / a) * (pow_a[1:] - pow_a[:-1])
        d = np.empty(n_steps + 1)
        d[0] = 0.0
        u = np.arange(1, n_steps + 1)
        d[1:] = pow_a1[u + 1] + pow_a1[u - 1] - 2.0 * pow_a1[u]
        w_rev = np.ascontiguousarray(w[::-1])  # w_rev[N+1-m] = w[m]
        d_rev = np.ascontiguousarray(d[::-1])  # d_rev[N-u] = d[u]
        big_n = n_steps

        inv_gamma_a = 1.0 / math.gamma(a)
        corr_scale = h**a / math.gamma(a + 2.0)
        window = config.memory_window
        iterations = config.corrector_iterations
        y0 = states[0]
        rhs_fn = problem.rhs

        for n in range(n_steps):
            lo = 0 if window is None else max(0, n + 1 - window)
            t_next = times[n + 1]

            # predictor: fractional rectangle rule over the (windowed) history
            hist = w_rev[big_n - n + lo : big_n + 1] @ rhs_values[lo : n + 1]
            predicted = y0 + inv_gamma_a * hist

            # corrector history: hat-function weights, node-0 term separate
            j0 = max(lo, 1)
            if j0 <= n:
                hist_c = d_rev[big_n - n + j0 - 1 : big_n] @ rhs_values[j0 : n + 1]
            else:
                hist_c = 0.0
            if lo == 0:
                hist_c = hist_c + (pow_a1[n] - (n - a) * pow_a[n + 1]) * rhs_values[0]

            f_new = np.asarray(rhs_fn(t_next, predicted), dtype=float)
            for _ in range(iterations):
                corrected = y0 + corr_scale * (hist_c + f_new)
                f_new = np.asarray(rhs_fn(t_next, corrected), dtype=float)

            if not (np.abs(corrected) <= DIVERGENCE_LIMIT).all():
                raise DivergenceError(n + 1, float(t_next), corrected)
            states[n + 1] = corrected
            rhs_values[n + 1] = f_new

    metadata = {
        "step": h,
        "t0": problem.t0,
        "t_end": float(times[-1]),
        "corrector_iterations": config.corrector_iterations,
        "memory_window": config.memory_window,
    }
    return Trajectory(times=times, states=states, order=a, metadata=metadata)


def _eval_rhs(rhs, t, y):
    value = np.asarray(rhs(t, y), dtype=float)
    if value.shape != y.shape:
        raise ValueError(
            f"rhs returned shape {value.shape}, expected {y.shape}"
        )
    return value
