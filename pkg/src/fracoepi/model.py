"""Susceptible-infected-predator model: vector field, equilibria, thresholds.

The system couples logistic prey growth, horizontal infection of prey, and a
predator feeding on infected prey through a saturating (type II) functional
response:

    dS = r*S*(1 - (S+I)/K) - lambda*I*S
    dI = lambda*I*S - m*I*P/(a+I) - mu*I
    dP = theta*I*P/(a+I) - d*P

(read with the Caputo derivative of order alpha in the fractional setting;
the algebra below does not depend on the order).  All parameters are positive
densities/rates; populations are dimensionless densities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional

import numpy as np

__all__ = [
    "EquilibriumKind",
    "Equilibrium",
    "ExistenceCondition",
    "ModelParams",
    "PRESETS",
    "State",
    "Thresholds",
    "ValidationError",
    "equilibria",
    "interior_equilibrium",
    "preset",
    "rhs",
    "thresholds",
    "vector_field",
]


class ValidationError(ValueError):
    """Invalid model parameters, states or configuration values."""


@dataclass(frozen=True)
class ModelParams:
    """The eight positive model constants.

    growth_rate            r      intrinsic prey birth rate (1/time)
    carrying_capacity      K      environmental carrying capacity
    infection_rate         lambda force of infection (1/(population*time))
    predation_rate         m      maximum predation rate (1/time)
    infected_death_rate    mu     infected-prey death rate (1/time)
    half_saturation        a      half-saturation constant (population)
    conversion_efficiency  theta  predation-to-growth conversion, in (0, 1]
    predator_death_rate    d      predator death rate (1/time)
    """

    growth_rate: float
    carrying_capacity: float
    infection_rate: float
    predation_rate: float
    infected_death_rate: float
    half_saturation: float
    conversion_efficiency: float
    predator_death_rate: float

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not (math.isfinite(value) and value > 0.0):
                raise ValidationError(f"{name} must be finite and positive, got {value}")
        if self.conversion_efficiency > 1.0:
            raise ValidationError(
                f"conversion_efficiency must not exceed 1, got {self.conversion_efficiency}"
            )

    def replace(self, **changes) -> "ModelParams":
        fields = dict(self.__dict__)
        fields.update(changes)
        return ModelParams(**fields)


@dataclass(frozen=True)
class State:
    """A (susceptible, infected, predator) density triple."""

    susceptible: float
    infected: float
    predator: float

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not math.isfinite(value):
                raise ValidationError(f"{name} must be finite, got {value}")

    @property
    def nonnegative(self) -> bool:
        return self.susceptible >= 0.0 and self.infected >= 0.0 and self.predator >= 0.0

    def as_array(self) -> np.ndarray:
        return np.array([self.susceptible, self.infected, self.predator])

    @classmethod
    def from_array(cls, values) -> "State":
        s, i, p = np.asarray(values, dtype=float)
        return cls(float(s), float(i), float(p))


class EquilibriumKind(Enum):
    EXTINCTION = "E0"    # (0, 0, 0)
    PREY_ONLY = "E1"     # (K, 0, 0), infection- and predator-free
    PREDATOR_FREE = "E2"  # (S1, I1, 0), disease endemic, no predator
    COEXISTENCE = "E*"   # interior equilibrium

    def __str__(self) -> str:
        return self.value


@dataclass(frozen=True)
class ExistenceCondition:
    name: str
    satisfied: bool
    margin: Optional[float]  # positive means satisfied with room; None if undefined


@dataclass(frozen=True)
class Equilibrium:
    kind: EquilibriumKind
    state: Optional[State]  # None when the defining formulas are singular
    exists: bool
    conditions: tuple[ExistenceCondition, ...] = ()


@dataclass(frozen=True)
class Thresholds:
    """Closed-form stability/existence thresholds.

    reproduction_number      R0 = lambda*K/mu; infection invades prey iff > 1
    predator_death_local     d1; predator-free state locally stable iff d > d1
    predator_death_global    d2; predator-free state globally stable if d > d2
    conversion_existence     theta1; interior equilibrium exists iff theta > theta1
                             (given R0 > 1)
    conversion_global        theta2; interior state globally stable if
                             theta1 < theta < theta2
    focus_boundary           1 + r/4; reported node/focus boundary for the
                             predator-free state in terms of R0
    theta2_reference_susceptible  the S* value theta2 was evaluated at

    d1, d2, theta1 require R0 > 1 and are None otherwise; theta2 additionally
    needs an interior susceptible level S* with 2K(lambda*S* - mu) > r and is
    None (with not_applicable reason) when that bracket is empty.
    """

    reproduction_number: float
    predator_death_local: Optional[float]
    predator_death_global: Optional[float]
    conversion_existence: Optional[float]
    conversion_global: Optional[float]
    focus_boundary: float
    theta2_reference_susceptible: Optional[float]
    not_applicable: tuple[str, ...] = ()


def rhs(params: ModelParams, state) -> np.ndarray:
    """Time derivative triple at a state (State or length-3 array)."""
    if isinstance(state, State):
        s, i, p = state.susceptible, state.infected, state.predator
    else:
        s, i, p = (float(x) for x in np.asarray(state, dtype=float))
    a = params.half_saturation
    if a + i == 0.0:
        raise ValidationError("half_saturation + infected must not vanish")
    r = params.growth_rate
    lam = params.infection_rate
    predation = params.predation_rate * i * p / (a + i)
    return np.array(
        [
            r * s * (1.0 - (s + i) / params.carrying_capacity) - lam * i * s,
            lam * i * s - predation - params.infected_death_rate * i,
            params.conversion_efficiency * i * p / (a + i)
            - params.predator_death_rate * p,
        ]
    )


def vector_field(params: ModelParams) -> Callable[[float, np.ndarray], np.ndarray]:
    """Autonomous rhs closure in the (t, y) signature solvers expect."""
    r = params.growth_rate
    K = params.carrying_capacity
    lam = params.infection_rate
    m = params.predation_rate
    mu = params.infected_death_rate
    a = params.half_saturation
    theta = params.conversion_efficiency
    d = params.predator_death_rate

    def f(t: float, y: np.ndarray) -> np.ndarray:
        s, i, p = y
        feeding = i * p / (a + i)
        return np.array(
            [
                r * s * (1.0 - (s + i) / K) - lam * i * s,
                lam * i * s - m * feeding - mu * i,
                theta * feeding - d * p,
            ]
        )

    return f


def interior_equilibrium(params: ModelParams) -> Optional[State]:
    """Formula value of the interior equilibrium, None when theta == d."""
    theta, d = params.conversion_efficiency, params.predator_death_rate
    if theta == d:
        return None
    i_star = params.half_saturation * d / (theta - d)
    s_star = (
        params.carrying_capacity
        - (1.0 + params.infection_rate * params.carrying_capacity / params.growth_rate)
        * i_star
    )
    p_star = (
        (params.half_saturation + i_star)
        * (params.infection_rate * s_star - params.infected_death_rate)
        / params.predation_rate
    )
    return State(s_star, i_star, p_star)


def equilibria(params: ModelParams) -> list[Equilibrium]:
    """All four equilibria with existence flags, in the order E0, E1, E2, E*."""
    r = params.growth_rate
    K = params.carrying_capacity
    lam = params.infection_rate
    mu = params.infected_death_rate
    theta = params.conversion_efficiency
    d = params.predator_death_rate

    th = thresholds(params)
    r0 = th.reproduction_number

    out = [
        Equilibrium(EquilibriumKind.EXTINCTION, State(0.0, 0.0, 0.0), True),
        Equilibrium(EquilibriumKind.PREY_ONLY, State(K, 0.0, 0.0), True),
    ]

    endemic = ExistenceCondition("R0 > 1", r0 > 1.0, r0 - 1.0)
    i1 = r * (lam * K - mu) / (lam * (r + lam * K))
    out.append(
        Equilibrium(
            EquilibriumKind.PREDATOR_FREE,
            State(mu / lam, i1, 0.0),
            endemic.satisfied,
            (endemic,),
        )
    )

    conds = [endemic]
    conds.append(
        ExistenceCondition("theta > d", theta > d, theta - d)
    )
    if th.conversion_existence is None:
        conds.append(ExistenceCondition("theta > theta1", False, None))
    else:
        conds.append(
            ExistenceCondition(
                "theta > theta1",
                theta > th.conversion_existence,
                theta - th.conversion_existence,
            )
        )
    interior = interior_equilibrium(params)
    out.append(
        Equilibrium(
            EquilibriumKind.COEXISTENCE,
            interior,
            all(c.satisfied for c in conds),
            tuple(conds),
        )
    )
    return out


def thresholds(
    params: ModelParams, theta2_reference: Optional[State] = None
) -> Thresholds:
    """Evaluate every closed-form threshold.

    theta2 contains the interior susceptible level S*, which itself depends
    on theta; by default it is evaluated self-consistently at params'
    conversion efficiency.  Passing ``theta2_reference`` evaluates it at an
    explicit reference state instead (useful when theta is being varied
    around a base parameter set).
    """
    r = params.growth_rate
    K = params.carrying_capacity
    lam = params.infection_rate
    m = params.predation_rate
    mu = params.infected_death_rate
    a = params.half_saturation
    theta = params.conversion_efficiency
    d = params.predator_death_rate

    r0 = lam * K / mu
    not_applicable: list[str] = []
    d1 = d2 = theta1 = theta2 = None
    s_ref: Optional[float] = None

    excess = lam * K - mu
    if excess > 0.0:
        d1 = theta * r * excess / (a * lam * (lam * K + r) + r * excess)
        d2 = theta * r * excess / (a * lam * (r + lam * K))
        theta1 = d + lam * a * d * (r + lam * K) / (r * excess)
    else:
        not_applicable.append("d1, d2, theta1 need R0 > 1")

    if theta2_reference is not None:
        s_ref = theta2_reference.susceptible
    else:
        interior = interior_equilibrium(params)
        if interior is not None and excess > 0.0 and theta > d:
            s_ref = interior.susceptible
        else:
            not_applicable.append("theta2 needs an interior susceptible level")
    if s_ref is not None:
        denom = 2.0 * K * (lam * s_ref - mu) - r
        if denom > 0.0:
            theta2 = m * d * K / denom
        else:
            not_applicable.append(
                "theta2 bracket empty: 2K(lambda*S* - mu) <= r"
            )

    return Thresholds(
        reproduction_number=r0,
        predator_death_local=d1,
        predator_death_global=d2,
        conversion_existence=theta1,
        conversion_global=theta2,
        focus_boundary=1.0 + r / 4.0,
        theta2_reference_susceptible=s_ref,
        not_applicable=tuple(not_applicable),
    )


def _example_base(**overrides) -> ModelParams:
    base = dict(
        growth_rate=2.0,
        carrying_capacity=40.0,
        infection_rate=0.015,
        predation_rate=0.52,
        infected_death_rate=0.28,
        half_saturation=15.0,
        conversion_efficiency=0.189,
        predator_death_rate=0.09,
    )
    base.update(overrides)
    return ModelParams(**base)


@dataclass(frozen=True)
class Preset:
    name: str
    params: ModelParams
    description: str
    initial_states: tuple[State, ...]


#: Built-in parameter sets.  Initial-state spreads are artifact choices:
#: distinct positive points whose deviations are moderate enough that the
#: algebraically slow fractional decay reaches convergence tolerances within
#: desk-scale spans (components along slow modes sized accordingly).
PRESETS: dict[str, Preset] = {
    p.name: p
    for p in [
        Preset(
            "example1",
            _example_base(),
            "coexistence equilibrium stable for every order in (0,1]",
            (State(30.0, 5.0, 10.0), State(25.0, 8.0, 6.0), State(35.0, 3.0, 12.0)),
        ),
        Preset(
            "example1-unstable",
            _example_base(
                carrying_capacity=200.0,
                infection_rate=0.15,
                half_saturation=5.0,
                conversion_efficiency=0.9,
            ),
            "coexistence equilibrium unstable for orders above 2/3",
            (State(30.0, 5.0, 10.0),),
        ),
        Preset(
            "example1-global",
            _example_base(conversion_efficiency=0.5),
            "globally stable coexistence (theta raised into the global band)",
            (State(33.0, 4.0, 8.0), State(38.0, 2.5, 10.0), State(35.0, 3.0, 9.5)),
        ),
        Preset(
            "example2",
            _example_base(conversion_efficiency=0.08),
            "globally stable predator-free state (low conversion efficiency)",
            (State(16.0, 14.0, 0.5), State(12.0, 20.0, 0.5), State(17.0, 18.0, 0.6)),
        ),
        Preset(
            "example3",
            _example_base(infection_rate=0.005),
            "globally stable infection- and predator-free state (R0 < 1)",
            (State(35.0, 1.5, 1.0), State(42.0, 1.0, 2.0), State(38.0, 0.5, 1.5)),
        ),
    ]
}


def preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        known = ", ".join(sorted(PRESETS))
        raise ValidationError(f"unknown preset {name!r}; known presets: {known}") from None
