"""One- and two-parameter Mittag-Leffler functions for real arguments.

``E_{a,b}(z) = sum_{k>=0} z^k / Gamma(a*k + b)`` generalizes the exponential
(``E_{1,1} = exp``) and governs solutions of linear Caputo equations, so the
dominant use case here is strongly negative ``z``.

Evaluation picks between three routes and certifies the advertised relative
accuracy (1e-10) before returning:

* direct float64 series summation, accepted while the cancellation ratio
  (largest term over result) stays small;
* the algebraic tail expansion ``-sum_{k>=1} z^{-k} / Gamma(b - a*k)`` for
  strongly negative ``z``, truncated at its smallest term;
* an adaptive-precision series (mpmath) for the mid-range band where neither
  double-precision route can certify the tolerance.

All functions are pure and thread-safe.
"""

from __future__ import annotations

import math

import mpmath

__all__ = ["AccuracyError", "ml_one", "ml_two", "recip_gamma"]

REL_TOL = 1e-10

_MAX_TERMS = 20_000
_CANCEL_LIMIT = 1e3      # max tolerated (peak term / result) in float64 summation
_ASYMP_CERT = 1e-11      # smallest-term certificate for the tail expansion
_SKIP_FLOAT_LN = 12.0    # predicted ln-cancellation above which float64 is hopeless
_MAX_DPS = 300


class AccuracyError(ArithmeticError):
    """No evaluation route could certify the requested accuracy."""


def recip_gamma(x: float) -> float:
    """1/Gamma(x), with the value 0.0 at the poles x = 0, -1, -2, ...

    Non-positive arguments within float-rounding distance of an integer are
    snapped to the pole: they arise from expressions like ``beta - alpha*k``
    whose exact value is the integer, and the true reciprocal there is zero.
    """
    if x > 0.0:
        try:
            return 1.0 / math.gamma(x)
        except OverflowError:
            return 0.0  # Gamma overflows, reciprocal underflows
    if abs(x - round(x)) <= 4e-13 * max(1.0, abs(x)):
        return 0.0
    # Gamma alternates sign on the intervals (-n-1, -n)
    sign = 1.0 if (int(math.floor(x)) % 2 == 0) else -1.0
    lg = math.lgamma(x)
    if -lg > 709.0:
        raise AccuracyError(f"1/Gamma({x}) exceeds the double-precision range")
    return sign * math.exp(-lg)


def _tail_magnitude_ln(alpha: float, beta: float, z: float) -> float:
    """ln of a rough lower bound on |E_{a,b}(z)| for z < 0 (leading tail terms)."""
    ln_az = math.log(-z)
    best = -80.0
    for k in range(1, 7):
        rg = recip_gamma(beta - alpha * k)
        if rg != 0.0:
            best = max(best, -k * ln_az + math.log(abs(rg)))
    return best


def _peak_term_ln(alpha: float, beta: float, z: float) -> float:
    """ln of the largest series term magnitude (stationary-point estimate)."""
    ln_az = math.log(abs(z))
    if ln_az <= 0.0:
        return -math.lgamma(beta)
    x_star = math.exp(ln_az / alpha)  # where psi(alpha*k + beta) = ln|z| / alpha
    k_star = max(0.0, (x_star - beta) / alpha)
    return k_star * ln_az - math.lgamma(alpha * k_star + beta)


def _float_series(alpha: float, beta: float, z: float) -> tuple[float, bool]:
    """Direct summation in float64. Returns (value, certified)."""
    ln_az = math.log(abs(z))
    negative = z < 0.0
    terms = [recip_gamma(beta)]
    peak = abs(terms[0])
    running = terms[0]
    tiny_in_a_row = 0
    for k in range(1, _MAX_TERMS):
        ln_mag = k * ln_az - math.lgamma(alpha * k + beta)
        if ln_mag > 708.0:
            return math.inf, False  # a single term exceeds the float range
        mag = math.exp(ln_mag)
        term = -mag if (negative and k % 2 == 1) else mag
        terms.append(term)
        running += term
        if math.isinf(running):
            return running, False
        peak = max(peak, mag)
        # stopping rule: three consecutive terms below 1e-16 of the partial sum
        if mag < 1e-16 * max(abs(running), 5e-324):
            tiny_in_a_row += 1
            if tiny_in_a_row >= 3:
                break
        else:
            tiny_in_a_row = 0
    else:
        return math.fsum(terms), False
    value = math.fsum(terms)
    if value == 0.0 or math.isinf(value):
        return value, False
    return value, (peak / abs(value)) <= _CANCEL_LIMIT


def _asymptotic(alpha: float, beta: float, z: float) -> tuple[float, bool]:
    """Algebraic tail expansion for z << 0, valid for 0 < alpha < 2.

    Term k is ``-z^(-k)/Gamma(beta - alpha*k)``; by reflection its magnitude
    is a smooth envelope ``|z|^(-k) Gamma(1 + alpha*k - beta)/pi`` times
    ``|sin(pi*(beta - alpha*k))|``.  The sin factor supplies the pole zeros
    and oscillates for small alpha, so truncation is decided on the envelope
    alone: sum while it decreases, stop at its minimum, certify with the
    first omitted envelope value as the error bound.
    """
    ln_az = math.log(-z)
    log_pi = math.log(math.pi)
    terms: list[float] = []
    running = 0.0
    ln_env_prev = math.inf
    omitted = math.inf
    for k in range(1, 60_001):
        x = beta - alpha * k  # Gamma argument, marching toward -inf
        if x > 0.5:
            term = -(z**-k) / math.gamma(x)
            terms.append(term)
            running += term
            if term != 0.0:
                ln_env_prev = math.log(abs(term))
            continue
        ln_env = -k * ln_az + math.lgamma(1.0 + alpha * k - beta) - log_pi
        if ln_env > ln_env_prev:
            omitted = math.exp(min(ln_env, 700.0))  # envelope minimum passed
            break
        # remainder(x, 2) is exact, so sin stays accurate for large |x|
        sin_factor = math.sin(math.pi * math.remainder(x, 2.0))
        magnitude = 0.0 if ln_env < -745.0 else math.exp(ln_env) * abs(sin_factor)
        sign = 1.0 if k % 2 == 1 else -1.0  # the -(-1)^k prefactor
        if sin_factor < 0.0:
            sign = -sign
        terms.append(sign * magnitude)
        running += sign * magnitude
        ln_env_prev = ln_env
        if running != 0.0 and (
            ln_env < -745.0 or math.exp(ln_env) < 1e-18 * abs(running)
        ):
            omitted = 0.0 if ln_env < -745.0 else math.exp(ln_env)
            break
    if not terms:
        return 0.0, False
    value = math.fsum(terms)
    if value == 0.0:
        return 0.0, False
    return value, omitted <= _ASYMP_CERT * abs(value)


def _mp_series(alpha: float, beta: float, z: float) -> float:
    """Series summation at elevated precision sized from the cancellation depth."""
    cancel_ln = _peak_term_ln(alpha, beta, z) - _tail_magnitude_ln(alpha, beta, z)
    digits = 25 + max(0, int(cancel_ln / math.log(10.0))) + 10
    if digits > _MAX_DPS:
        raise AccuracyError(
            f"E_({alpha},{beta})({z}) needs more than {_MAX_DPS} working digits"
        )
    with mpmath.workdps(digits):
        a, b, zz = mpmath.mpf(alpha), mpmath.mpf(beta), mpmath.mpf(z)
        stop = mpmath.mpf(10) ** (3 - digits)
        floor = mpmath.mpf("1e-120")
        total = mpmath.mpf(0)
        zpow = mpmath.mpf(1)
        tiny_in_a_row = 0
        for k in range(_MAX_TERMS):
            term = zpow / mpmath.gamma(a * k + b)
            total += term
            zpow *= zz
            if abs(term) < stop * max(abs(total), floor):
                tiny_in_a_row += 1
                if tiny_in_a_row >= 3:
                    return float(total)
            else:
                tiny_in_a_row = 0
    raise AccuracyError(
        f"series for E_({alpha},{beta})({z}) did not converge in {_MAX_TERMS} terms"
    )


def ml_two(alpha: float, beta: float, z: float) -> float:
    """Two-parameter Mittag-Leffler function E_{alpha,beta}(z), real z.

    Raises ValueError for alpha <= 0, beta <= 0 or non-finite arguments and
    AccuracyError when the value cannot be certified to REL_TOL (for example
    when it exceeds the double-precision range).
    """
    if not (math.isfinite(alpha) and alpha > 0.0):
        raise ValueError(f"first parameter must be finite and positive, got {alpha}")
    if not (math.isfinite(beta) and beta > 0.0):
        raise ValueError(f"second parameter must be finite and positive, got {beta}")
    if not math.isfinite(z):
        raise ValueError(f"argument must be finite, got {z}")
    if z == 0.0:
        return recip_gamma(beta)
    if alpha == 1.0 and beta == 1.0:
        if z > 709.0:
            raise AccuracyError(f"E_1({z}) exceeds the double-precision range")
        return math.exp(z)

    hopeless = (
        z < 0.0
        and _peak_term_ln(alpha, beta, z) - _tail_magnitude_ln(alpha, beta, z)
        > _SKIP_FLOAT_LN
    )
    if not hopeless:
        value, certified = _float_series(alpha, beta, z)
        if certified:
            return value
        if z > 0.0:
            raise AccuracyError(
                f"E_({alpha},{beta})({z}) exceeds the double-precision range"
            )
    if 0.0 < alpha < 2.0:
        value, certified = _asymptotic(alpha, beta, z)
        if certified:
            return value
    return _mp_series(alpha, beta, z)


def ml_one(alpha: float, z: float) -> float:
    """One-parameter Mittag-Leffler function E_alpha(z) = E_{alpha,1}(z)."""
    return ml_two(alpha, 1.0, z)
