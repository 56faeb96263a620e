"""Jacobians, characteristic cubics and fractional-order stability verdicts.

An equilibrium of a commensurate Caputo system of order ``alpha`` is
asymptotically stable iff every Jacobian eigenvalue ``xi`` satisfies
``|arg(xi)| > alpha*pi/2``; the verdict therefore depends on the order, and
an equilibrium that is unstable classically can be stable at small enough
orders.  For the interior equilibrium the eigenvalues are the roots of a
monic cubic whose sign pattern (discriminant, coefficients, the product
A1*A2 - A3) supports order-independent sufficient conditions; those
hypothesis sets are evaluated here as annotations while the eigenvalue
criterion remains the ground truth.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .model import Equilibrium, EquilibriumKind, ModelParams, State, ValidationError

__all__ = [
    "CubicCharacteristic",
    "EigenSpectrum",
    "MatignonResult",
    "StabilityVerdict",
    "TIE_TOLERANCE",
    "characteristic_cubic",
    "classify_equilibrium",
    "cubic_roots",
    "jacobian",
    "matignon_check",
    "coefficient_case",
]

TIE_TOLERANCE = 1e-9  # radians; |arg| within this of alpha*pi/2 counts as marginal
_CASE_EQ_RTOL = 1e-9  # relative tolerance for the A1*A2 == A3 equality in case (iv)
_ZERO_EIG_RTOL = 1e-12


@dataclass(frozen=True)
class CubicCharacteristic:
    """Monic cubic F(x) = x^3 + a1 x^2 + a2 x + a3."""

    a1: float
    a2: float
    a3: float

    @property
    def discriminant(self) -> float:
        a1, a2, a3 = self.a1, self.a2, self.a3
        return (
            18.0 * a1 * a2 * a3
            + (a1 * a2) ** 2
            - 4.0 * a3 * a1**3
            - 4.0 * a2**3
            - 27.0 * a3**2
        )

    @property
    def routh_product(self) -> float:
        return self.a1 * self.a2 - self.a3

    def __call__(self, x: complex) -> complex:
        return ((x + self.a1) * x + self.a2) * x + self.a3

    def coefficients(self) -> np.ndarray:
        return np.array([1.0, self.a1, self.a2, self.a3])


@dataclass(frozen=True)
class EigenSpectrum:
    """Three eigenvalues with their principal arguments in (-pi, pi]."""

    eigenvalues: np.ndarray  # complex, length 3, conjugate pairs exact

    @property
    def args(self) -> np.ndarray:
        return np.angle(self.eigenvalues)

    @property
    def min_abs_arg(self) -> float:
        return float(np.min(np.abs(self.args)))

    @property
    def has_complex_pair(self) -> bool:
        return bool(np.any(self.eigenvalues.imag != 0.0))

    @property
    def has_zero(self) -> bool:
        scale = max(1.0, float(np.max(np.abs(self.eigenvalues))))
        return bool(np.any(np.abs(self.eigenvalues) <= _ZERO_EIG_RTOL * scale))


@dataclass(frozen=True)
class MatignonResult:
    stable: Optional[bool]  # None when marginal
    marginal: bool
    margin: float           # min |arg xi| - alpha*pi/2
    critical_order: float   # (2/pi) min |arg xi|, capped at 1
    note: str = ""


@dataclass(frozen=True)
class StabilityVerdict:
    """Order-dependent classification of one equilibrium.

    ``label`` is one of stable-node, stable-focus, stable-matignon (stable
    only through the fractional criterion, some eigenvalue has non-negative
    real part), marginal, unstable-node, unstable-focus, unstable.
    ``case`` tags the matching coefficient-based hypothesis set (i)-(iv) for
    the interior equilibrium, with ``case_agrees`` recording whether that
    prediction matches the eigenvalue verdict.
    """

    kind: EquilibriumKind
    order: float
    label: str
    margin: float
    critical_order: float
    spectrum: EigenSpectrum
    case: Optional[str] = None
    case_agrees: Optional[bool] = None
    cubic: Optional[CubicCharacteristic] = None
    notes: tuple[str, ...] = ()

    @property
    def stable(self) -> Optional[bool]:
        if self.label == "marginal":
            return None
        return self.label.startswith("stable")


def jacobian(params: ModelParams, state) -> np.ndarray:
    """Analytic Jacobian of the model vector field at an arbitrary state."""
    if isinstance(state, State):
        s, i, p = state.susceptible, state.infected, state.predator
    else:
        s, i, p = (float(x) for x in np.asarray(state, dtype=float))
    r = params.growth_rate
    K = params.carrying_capacity
    lam = params.infection_rate
    m = params.predation_rate
    a = params.half_saturation
    theta = params.conversion_efficiency
    if a + i <= 0.0:
        raise ValidationError("Jacobian needs half_saturation + infected > 0")
    den = (a + i) ** 2
    return np.array(
        [
            [r * (1.0 - (2.0 * s + i) / K) - lam * i, -(r / K + lam) * s, 0.0],
            [lam * i, lam * s - m * a * p / den - params.infected_death_rate,
             -m * i / (a + i)],
            [0.0, theta * a * p / den, theta * i / (a + i) - params.predator_death_rate],
        ]
    )


def characteristic_cubic(params: ModelParams, estar: State) -> CubicCharacteristic:
    """Characteristic polynomial coefficients at the interior equilibrium."""
    s, i, p = estar.susceptible, estar.infected, estar.predator
    if s <= 0.0 or i <= 0.0 or p <= 0.0:
        raise ValidationError(
            f"interior equilibrium must have positive coordinates, got {estar}"
        )
    r = params.growth_rate
    K = params.carrying_capacity
    lam = params.infection_rate
    m = params.predation_rate
    a = params.half_saturation
    d = params.predator_death_rate
    den = (a + i) ** 2
    a1 = r * s / K - m * i * p / den
    a2 = (
        a * m * d * p / den
        + r * lam * i * s / K
        + lam**2 * i * s
        - r * m * s * i * p / (K * den)
    )
    a3 = r * m * d * a * s * p / (K * den)
    return CubicCharacteristic(a1, a2, a3)


def cubic_roots(cubic: CubicCharacteristic) -> EigenSpectrum:
    """Roots via companion-matrix eigenvalues plus one Newton polish per root.

    Complex roots come out as exact conjugate pairs (the pair is polished
    once and mirrored).
    """
    coeffs = cubic.coefficients()
    if not np.all(np.isfinite(coeffs)):
        raise ValidationError(f"cubic coefficients must be finite, got {coeffs}")
    roots = np.roots(coeffs)

    def polish(x: complex) -> complex:
        deriv = (3.0 * x + 2.0 * cubic.a1) * x + cubic.a2
        if abs(deriv) < 1e-30:
            return x
        step = cubic(x) / deriv
        return x - step if abs(step) < 1.0 + abs(x) else x

    polished = []
    seen_pair = False
    for root in roots:
        if root.imag == 0.0:
            polished.append(complex(polish(root.real).real))
        elif root.imag > 0.0:
            z = polish(root)
            polished.append(z)
            seen_pair = True
        else:
            continue  # filled in by mirroring below
    if seen_pair:
        pair = next(z for z in polished if z.imag != 0.0)
        polished.append(pair.conjugate())
    eigen = np.sort_complex(np.array(polished, dtype=complex))
    return EigenSpectrum(eigenvalues=eigen)


def matignon_check(
    spectrum: EigenSpectrum, alpha: float, tie_tolerance: float = TIE_TOLERANCE
) -> MatignonResult:
    """Fractional-order stability test: min |arg xi| against alpha*pi/2."""
    if not (0.0 < alpha <= 1.0):
        raise ValidationError(f"order must lie in (0,1], got {alpha}")
    if spectrum.has_zero:
        # arg(0) is undefined; the boundary case is reported, not adjudicated
        return MatignonResult(
            stable=None,
            marginal=True,
            margin=-alpha * math.pi / 2.0,
            critical_order=0.0,
            note="zero eigenvalue",
        )
    min_arg = spectrum.min_abs_arg
    margin = min_arg - alpha * math.pi / 2.0
    critical = min(1.0, 2.0 * min_arg / math.pi)
    if abs(margin) <= tie_tolerance:
        return MatignonResult(None, True, margin, critical, "on the stability boundary")
    return MatignonResult(margin > 0.0, False, margin, critical)


def coefficient_case(cubic: CubicCharacteristic, alpha: float) -> Optional[str]:
    """Matching coefficient-based hypothesis set, or None.

    (i)   D > 0, A1 > 0, A3 > 0, A1*A2 - A3 > 0        -> stable, any order
    (ii)  D < 0, A1 >= 0, A2 >= 0, A3 > 0, alpha < 2/3 -> stable
    (iii) D < 0, A1 < 0, A2 < 0, alpha > 2/3           -> unstable
    (iv)  D < 0, A1 > 0, A2 > 0, A1*A2 == A3, alpha < 1 -> stable
    """
    disc = cubic.discriminant
    a1, a2, a3 = cubic.a1, cubic.a2, cubic.a3
    if disc > 0.0 and a1 > 0.0 and a3 > 0.0 and cubic.routh_product > 0.0:
        return "i"
    if disc < 0.0:
        if a1 >= 0.0 and a2 >= 0.0 and a3 > 0.0 and alpha < 2.0 / 3.0:
            return "ii"
        if a1 < 0.0 and a2 < 0.0 and alpha > 2.0 / 3.0:
            return "iii"
        if (
            a1 > 0.0
            and a2 > 0.0
            and abs(cubic.routh_product) <= _CASE_EQ_RTOL * max(1.0, abs(a3))
            and alpha < 1.0
        ):
            return "iv"
    return None


_CASE_PREDICTS_STABLE = {"i": True, "ii": True, "iii": False, "iv": True}


def _label(check: MatignonResult, spectrum: EigenSpectrum) -> str:
    """Node/focus sub-label keyed on eigenvalue structure (pair present or not)."""
    if check.marginal:
        return "marginal"
    if check.stable:
        if not spectrum.has_complex_pair:
            return "stable-node"
        pair_re = spectrum.eigenvalues[spectrum.eigenvalues.imag != 0.0][0].real
        return "stable-focus" if pair_re < 0.0 else "stable-matignon"
    return "unstable-focus" if spectrum.has_complex_pair else "unstable-node"


def classify_equilibrium(
    params: ModelParams,
    eq: Equilibrium,
    alpha: float,
    tie_tolerance: float = TIE_TOLERANCE,
) -> StabilityVerdict:
    """Order-dependent verdict for an existing equilibrium.

    The trivial and prey-only equilibria carry plain stable/unstable labels
    (their spectra are real); the predator-free and interior equilibria get
    node/focus sub-labels from the eigenvalue structure.  For the interior
    equilibrium the verdict is annotated with the matching coefficient case,
    and any disagreement between that sufficient condition and the eigenvalue
    criterion is recorded rather than suppressed.
    """
    if not eq.exists:
        raise ValidationError(f"{eq.kind} does not exist for these parameters")
    if eq.state is None:
        raise ValidationError(f"{eq.kind} has no well-defined coordinates")

    notes: list[str] = []
    cubic = None
    case = None
    case_agrees = None

    if eq.kind is EquilibriumKind.COEXISTENCE:
        cubic = characteristic_cubic(params, eq.state)
        spectrum = cubic_roots(cubic)
        check = matignon_check(spectrum, alpha, tie_tolerance)
        case = coefficient_case(cubic, alpha)
        if case is not None and check.stable is not None:
            case_agrees = _CASE_PREDICTS_STABLE[case] == check.stable
            if not case_agrees:
                notes.append(
                    f"case ({case}) predicts "
                    f"{'stable' if _CASE_PREDICTS_STABLE[case] else 'unstable'} "
                    f"but the eigenvalue criterion says otherwise"
                )
        label = _label(check, spectrum)
    else:
        spectrum = EigenSpectrum(
            eigenvalues=np.sort_complex(
                np.linalg.eigvals(jacobian(params, eq.state)).astype(complex)
            )
        )
        check = matignon_check(spectrum, alpha, tie_tolerance)
        if eq.kind in (EquilibriumKind.EXTINCTION, EquilibriumKind.PREY_ONLY):
            if check.marginal:
                label = "marginal"
            else:
                label = "stable-node" if check.stable else "unstable"
        else:
            label = _label(check, spectrum)
    if check.note:
        notes.append(check.note)

    return StabilityVerdict(
        kind=eq.kind,
        order=alpha,
        label=label,
        margin=check.margin,
        critical_order=check.critical_order,
        spectrum=spectrum,
        case=case,
        case_agrees=case_agrees,
        cubic=cubic,
        notes=tuple(notes),
    )

