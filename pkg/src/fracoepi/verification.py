"""Numerical checks of the model's analytical guarantees on computed runs.

Solutions started in the positive orthant are non-negative and uniformly
bounded (the weighted total population V = S + I + (m/theta)P is absorbed
below l/eta with l = K(r+eta)^2/(4r) for any eta below both death rates), and
under the respective threshold conditions each stable equilibrium comes with
a Lyapunov function that decreases along solutions.  These facts are checked
here on discrete trajectories with explicit slack for discretization, rather
than re-derived symbolically: the conclusions of the theory, not its proof
steps, are what a computed trajectory can certify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from . import mittag_leffler as ml
from .model import (
    Equilibrium,
    EquilibriumKind,
    ModelParams,
    State,
    ValidationError,
    rhs,
    thresholds,
)
from .solver import Trajectory

__all__ = [
    "BoundednessCertificate",
    "ConvergenceResult",
    "HypothesisCheck",
    "LyapunovReport",
    "NonnegativityReport",
    "boundedness_certificate",
    "check_nonnegativity",
    "convergence_check",
    "lipschitz_bound",
    "lyapunov_monotonicity",
    "lyapunov_value",
]

_MAX_LISTED_NODES = 20
_MAX_SKIPPED_FRACTION = 0.01  # Lyapunov nodes allowed to graze the boundary


@dataclass(frozen=True)
class NonnegativityReport:
    passed: bool
    tolerance: float
    worst_undershoot: np.ndarray      # per component, >= 0
    offending_nodes: tuple[tuple[int, float, int, float], ...]  # (node, t, comp, value)
    offending_count: int


@dataclass(frozen=True)
class BoundednessCertificate:
    eta: float
    absorbing_level: float            # l = K (r+eta)^2 / (4 r)
    bound: float                      # l / eta
    epsilon_margin: float
    passed: bool
    worst_value: float                # max V along the run
    envelope_checked: bool            # sharper Mittag-Leffler envelope applied
    violated_nodes: tuple[tuple[float, float], ...]  # (time, V)


@dataclass(frozen=True)
class HypothesisCheck:
    description: str
    satisfied: Optional[bool]
    detail: str = ""


@dataclass(frozen=True)
class LyapunovReport:
    target: EquilibriumKind
    values: np.ndarray                # V per node, NaN where undefined
    max_increase: float
    monotone: bool
    slack: float
    skipped_nodes: int
    hypothesis: HypothesisCheck


@dataclass(frozen=True)
class ConvergenceResult:
    converged: bool
    max_tail_distance: float
    tail_nodes: int


def check_nonnegativity(traj: Trajectory, tol: float = 1e-8) -> NonnegativityReport:
    """Pass when every component stays above -tol at every node."""
    states = traj.states
    worst = np.maximum(0.0, -states.min(axis=0))
    bad = np.argwhere(states < -tol)
    listed = tuple(
        (int(n), float(traj.times[n]), int(c), float(states[n, c]))
        for n, c in bad[:_MAX_LISTED_NODES]
    )
    return NonnegativityReport(
        passed=bad.size == 0,
        tolerance=tol,
        worst_undershoot=worst,
        offending_nodes=listed,
        offending_count=int(bad.shape[0]),
    )


def total_population(params: ModelParams, states: np.ndarray) -> np.ndarray:
    """V = S + I + (m/theta) P per node."""
    weight = params.predation_rate / params.conversion_efficiency
    return states[:, 0] + states[:, 1] + weight * states[:, 2]


def boundedness_certificate(
    params: ModelParams,
    traj: Trajectory,
    eta: float,
    epsilon_margin: float = 1e-6,
) -> BoundednessCertificate:
    """Check the uniform bound on V = S + I + (m/theta)P.

    Requires 0 < eta < min(infected death rate, predator death rate), which
    makes max(V(0), l/eta) an upper envelope; when V(0) exceeds l/eta the
    sharper decay envelope (V(0) - l/eta) E_alpha(-eta t^alpha) + l/eta is
    checked as well.
    """
    floor = min(params.infected_death_rate, params.predator_death_rate)
    if not (0.0 < eta < floor):
        raise ValidationError(
            f"eta must lie strictly inside (0, {floor}), got {eta}"
        )
    r = params.growth_rate
    level = params.carrying_capacity * (r + eta) ** 2 / (4.0 * r)
    bound = level / eta
    values = total_population(params, traj.states)
    v0 = float(values[0])

    cap = max(v0, bound) + epsilon_margin
    envelope_checked = v0 > bound
    if envelope_checked:
        decay = np.array(
            [
                ml.ml_one(traj.order, -eta * float(t) ** traj.order)
                for t in traj.times
            ]
        )
        envelope = (v0 - bound) * decay + bound + epsilon_margin
        limit = np.minimum(cap, envelope)
    else:
        limit = np.full_like(values, cap)

    bad = np.nonzero(values > limit)[0]
    violated = tuple(
        (float(traj.times[n]), float(values[n])) for n in bad[:_MAX_LISTED_NODES]
    )
    return BoundednessCertificate(
        eta=eta,
        absorbing_level=level,
        bound=bound,
        epsilon_margin=epsilon_margin,
        passed=bad.size == 0,
        worst_value=float(values.max()),
        envelope_checked=envelope_checked,
        violated_nodes=violated,
    )


def _entropy_term(x, x_star):
    """x - x* - x* ln(x/x*), elementwise; the building block of every V."""
    return x - x_star - x_star * np.log(x / x_star)


def _lyapunov_values(
    params: ModelParams, target: Equilibrium, states: np.ndarray
) -> np.ndarray:
    """Vectorized V along state rows; NaN where a required log diverges."""
    if not target.exists or target.state is None:
        raise ValidationError(f"target {target.kind} does not exist")
    weight = params.predation_rate / params.conversion_efficiency
    s, i, p = states[:, 0], states[:, 1], states[:, 2]
    ts = target.state
    with np.errstate(divide="ignore", invalid="ignore"):
        if target.kind is EquilibriumKind.PREY_ONLY:
            values = np.where(
                s > 0.0,
                _entropy_term(s, ts.susceptible) + i + weight * p,
                np.nan,
            )
        elif target.kind is EquilibriumKind.PREDATOR_FREE:
            ok = (s > 0.0) & (i > 0.0)
            values = np.where(
                ok,
                _entropy_term(s, ts.susceptible)
                + _entropy_term(i, ts.infected)
                + weight * p,
                np.nan,
            )
        elif target.kind is EquilibriumKind.COEXISTENCE:
            ok = (s > 0.0) & (i > 0.0) & (p > 0.0)
            values = np.where(
                ok,
                _entropy_term(s, ts.susceptible)
                + _entropy_term(i, ts.infected)
                + weight * _entropy_term(p, ts.predator),
                np.nan,
            )
        else:
            raise ValidationError(
                f"no Lyapunov form is associated with {target.kind}"
            )
    return values


def lyapunov_value(params: ModelParams, target: Equilibrium, state: State) -> float:
    """Candidate Lyapunov value at one state; zero exactly at the target."""
    values = _lyapunov_values(params, target, state.as_array()[None, :])
    value = float(values[0])
    if math.isnan(value):
        raise ValidationError(
            f"state {state} lies on the boundary where the {target.kind} "
            "Lyapunov function diverges"
        )
    return value


def _hypothesis(
    params: ModelParams,
    target: EquilibriumKind,
    theta2_reference: Optional[State],
) -> HypothesisCheck:
    th = thresholds(params, theta2_reference=theta2_reference)
    if target is EquilibriumKind.PREY_ONLY:
        r0 = th.reproduction_number
        return HypothesisCheck("R0 < 1", r0 < 1.0, f"R0 = {r0:.6g}")
    if target is EquilibriumKind.PREDATOR_FREE:
        d2 = th.predator_death_global
        if d2 is None:
            return HypothesisCheck("d > d2", None, "d2 not applicable (R0 <= 1)")
        d = params.predator_death_rate
        return HypothesisCheck("d > d2", d > d2, f"d = {d:.6g}, d2 = {d2:.6g}")
    if target is EquilibriumKind.COEXISTENCE:
        t1, t2 = th.conversion_existence, th.conversion_global
        theta = params.conversion_efficiency
        if t1 is None or t2 is None:
            return HypothesisCheck(
                "theta1 < theta < theta2", None, "thresholds not applicable"
            )
        ok = t1 < theta < t2
        return HypothesisCheck(
            "theta1 < theta < theta2",
            ok,
            f"theta1 = {t1:.6g}, theta = {theta:.6g}, theta2 = {t2:.6g}",
        )
    return HypothesisCheck("none", None, f"{target} has no global-stability claim")


def lyapunov_monotonicity(
    params: ModelParams,
    target: Equilibrium,
    traj: Trajectory,
    slack: float = 1e-3,
    theta2_reference: Optional[State] = None,
) -> LyapunovReport:
    """Largest forward increase of V along the run.

    The theory bounds the fractional derivative of V; the observable
    consequence on a discrete solution is (near-)monotone decrease, checked
    with slack for discretization and fractional-memory effects.  Nodes where
    a required logarithm is undefined are skipped and counted; more than 1%
    of them fails the report outright.
    """
    values = _lyapunov_values(params, target, traj.states)
    valid = ~np.isnan(values)
    skipped = int(values.size - valid.sum())
    kept = values[valid]
    if kept.size >= 2:
        max_increase = float(np.max(np.diff(kept)))
    else:
        max_increase = math.nan
    hypothesis = _hypothesis(params, target.kind, theta2_reference)
    monotone = (
        skipped <= _MAX_SKIPPED_FRACTION * values.size
        and kept.size >= 2
        and max_increase <= slack
    )
    return LyapunovReport(
        target=target.kind,
        values=values,
        max_increase=max_increase,
        monotone=monotone,
        slack=slack,
        skipped_nodes=skipped,
        hypothesis=hypothesis,
    )


def convergence_check(
    traj: Trajectory,
    target,
    tol: float,
    tail_fraction: float = 0.1,
) -> ConvergenceResult:
    """Max-norm distance to target over the trailing fraction of nodes."""
    if not (0.0 < tail_fraction <= 1.0):
        raise ValidationError(
            f"tail_fraction must lie in (0,1], got {tail_fraction}"
        )
    goal = target.as_array() if isinstance(target, State) else np.asarray(target, float)
    n_nodes = traj.states.shape[0]
    tail = max(1, math.ceil(tail_fraction * n_nodes))
    distance = np.abs(traj.states[-tail:] - goal).max()
    return ConvergenceResult(
        converged=bool(distance <= tol),
        max_tail_distance=float(distance),
        tail_nodes=tail,
    )


def lipschitz_bound(params: ModelParams, M: float) -> float:
    """Lipschitz constant (1-norm) of the vector field on the radius-M box.

    Maximum of the three per-component bracket bounds; valid for states with
    components in [0, M].
    """
    if not (math.isfinite(M) and M > 0.0):
        raise ValidationError(f"domain radius must be positive, got {M}")
    r = params.growth_rate
    K = params.carrying_capacity
    lam = params.infection_rate
    m = params.predation_rate
    a = params.half_saturation
    theta = params.conversion_efficiency
    sat = a * M * (m + theta) / (a + M) ** 2
    l1 = r + 2.0 * r * M / K + (2.0 * lam + r / K) * M
    l2 = (2.0 * lam + r / K) * M + params.infected_death_rate + sat
    l3 = sat + params.predator_death_rate + M**2 * (m + theta) / (a + M) ** 2
    return max(l1, l2, l3)


def empirical_lipschitz_ratio(
    params: ModelParams, M: float, pairs: int = 10_000, seed: int = 0
) -> float:
    """Largest observed ||f(x)-f(y)||_1 / ||x-y||_1 over random pairs in [0,M]^3."""
    rng = np.random.default_rng(seed)
    xs = rng.uniform(0.0, M, size=(pairs, 3))
    ys = rng.uniform(0.0, M, size=(pairs, 3))
    worst = 0.0
    for x, y in zip(xs, ys):
        gap = np.abs(x - y).sum()
        if gap < 1e-12:
            continue
        ratio = np.abs(rhs(params, x) - rhs(params, y)).sum() / gap
        worst = max(worst, float(ratio))
    return worst
