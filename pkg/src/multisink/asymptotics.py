"""Small-pressure expansions of the branch periods and the critical
pressure, plus the Mellin coefficient integrals that back them.

With s = 1/(2 lam - 2), the PLUS period behaves like

    pi - 2 lam^(2 lam - 2) sqrt(pi) Gamma(lam) tan(pi lam) / Gamma(lam - 1/2) * |P|
        (1 < lam < 3/2)
    pi - 3 |P| log(1/|P|)                                       (lam = 3/2)
    pi - 2^(1+s) lam Gamma(1 - s) Gamma(lam s) / sqrt(pi) * |P|^s - O(|P|)
        (3/2 < lam < 2)

and the MINUS period like 2^(1+s) sqrt(pi) lam Gamma(lam s) / Gamma(s)
* |P|^s.  Every constant here is pinned by independent quadrature (see
the test suite): the three regimes then agree where they meet -- the
subcritical coefficient's pole residue at lam -> 3/2- is 3/(3 - 2 lam),
matching the logarithmic constant 3, the combined T_plus + T_minus
expansion factors through the reflection formula into (1 - sin(pi s)),
and its lam -> 2- balance reproduces the pi^2/512 critical-pressure law.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .local_solutions import (
    _amplitude_root_minus,
    _amplitude_shape_plus,
)
from .numerics import QuadratureSpec, integrate_singular, log_gamma

__all__ = [
    "Regime",
    "ExpansionResult",
    "a_of_P",
    "b_of_P",
    "t_plus_expansion",
    "t_minus_expansion",
    "t_sum_expansion",
    "pstar_approx",
    "mellin_F",
    "beta_tangent_identity_check",
]

# Width of the window routed to the logarithmic formula; the neighbouring
# regimes' coefficients blow up at lam = 3/2 (tangent and Gamma poles).
_REGIME_SWITCH = 1e-6

_SQRT_PI = math.sqrt(math.pi)


class Regime(enum.Enum):
    SUB_CRITICAL = "sub_critical"  # 1 < lam < 3/2
    LOGARITHMIC = "logarithmic"  # lam = 3/2
    SUPER_CRITICAL = "super_critical"  # 3/2 < lam < 2


@dataclass(frozen=True)
class ExpansionResult:
    value: float
    regime: Regime
    terms: tuple[tuple[str, float], ...]

    def __post_init__(self):
        if not all(math.isfinite(c) for _, c in self.terms):
            raise DomainError("expansion produced a non-finite coefficient")


def _check_lam(lam: float) -> None:
    if not (isinstance(lam, (int, float)) and 1.0 < lam < 2.0):
        raise DomainError(f"lam must be in (1, 2), got {lam!r}")


def _check_pressure(pressure: float, strict: bool = False) -> float:
    if not (math.isfinite(pressure) and (pressure < 0.0 or (pressure == 0.0 and not strict))):
        kind = "< 0" if strict else "<= 0"
        raise DomainError(f"pressure must be {kind}, got {pressure!r}")
    return -pressure


def _regime(lam: float) -> Regime:
    if abs(lam - 1.5) < _REGIME_SWITCH:
        return Regime.LOGARITHMIC
    return Regime.SUB_CRITICAL if lam < 1.5 else Regime.SUPER_CRITICAL


def _tan_pi(lam: float) -> float:
    # tan(pi*lam) via the shifted argument: exact period reduction.
    return math.tan(math.pi * (lam - 1.0))


def a_of_P(lam: float, pressure: float, mode: str = "exact") -> float:
    """Amplitude-shape parameter a = (lam^2 - x_plus^(-2/lam)) / lam^2.

    Exact mode solves -2P lam^(2 lam - 2) (1 - a)^lam = a; series mode
    returns the two-term small-pressure expansion."""
    _check_lam(lam)
    p_abs = _check_pressure(pressure)
    if mode == "exact":
        return _amplitude_shape_plus(lam, 2.0 * p_abs)
    if mode == "series":
        return (
            2.0 * lam ** (2.0 * lam - 2.0) * p_abs
            - 4.0 * lam ** (4.0 * lam - 3.0) * p_abs * p_abs
        )
    raise DomainError(f"mode must be 'exact' or 'series', got {mode!r}")


def b_of_P(lam: float, pressure: float, mode: str = "exact") -> float:
    """MINUS amplitude root b = x_minus^(1/lam), from
    b^(2 lam - 2) + lam^2 b^(2 lam) = -2P (exact) or its expansion."""
    _check_lam(lam)
    p_abs = _check_pressure(pressure)
    if mode == "exact":
        return _amplitude_root_minus(lam, 2.0 * p_abs)
    if mode == "series":
        s = 1.0 / (2.0 * lam - 2.0)
        return (
            2.0 ** s * p_abs ** s
            - lam * lam * 2.0 ** (1.0 / (lam - 1.0)) * p_abs ** (3.0 * s)
        )
    raise DomainError(f"mode must be 'exact' or 'series', got {mode!r}")


def _linear_coeff(lam: float) -> float:
    """Coefficient of |P| in pi - T_plus for 1 < lam < 3/2 (positive there)."""
    return (
        2.0
        * lam ** (2.0 * lam - 2.0)
        * _SQRT_PI
        * math.exp(log_gamma(lam) - log_gamma(lam - 0.5))
        * _tan_pi(lam)
    )


def _sqrt_coeff(lam: float) -> float:
    """Coefficient of |P|^s in pi - T_plus for 3/2 < lam < 2 (positive)."""
    s = 1.0 / (2.0 * lam - 2.0)
    return (
        2.0 ** (1.0 + s)
        * lam
        * math.exp(log_gamma(1.0 - s) + log_gamma(lam * s))
        / _SQRT_PI
    )


def _minus_coeff(lam: float) -> float:
    """Coefficient of |P|^s in T_minus (positive for all lam in (1, 2))."""
    s = 1.0 / (2.0 * lam - 2.0)
    return (
        2.0 ** (1.0 + s)
        * _SQRT_PI
        * lam
        * math.exp(log_gamma(lam * s) - log_gamma(s))
    )


def t_plus_expansion(lam: float, pressure: float) -> ExpansionResult:
    """Small-pressure truncation of T_plus in the regime owning ``lam``."""
    _check_lam(lam)
    p_abs = _check_pressure(pressure, strict=True)
    regime = _regime(lam)
    if regime is Regime.SUB_CRITICAL:
        c = _linear_coeff(lam)
        value = math.pi - c * p_abs
        terms = (("1", math.pi), ("|P|", -c))
    elif regime is Regime.LOGARITHMIC:
        value = math.pi - 3.0 * p_abs * math.log(1.0 / p_abs)
        terms = (("1", math.pi), ("|P| log(1/|P|)", -3.0))
    else:
        s = 1.0 / (2.0 * lam - 2.0)
        c1 = _sqrt_coeff(lam)
        ct = 2.0 * _SQRT_PI * lam ** (2.0 * lam - 2.0) * math.exp(
            log_gamma(lam) - log_gamma(lam - 0.5)
        ) * _tan_pi(lam)
        value = math.pi - c1 * p_abs ** s - ct * p_abs
        terms = (("1", math.pi), (f"|P|^{s:g}", -c1), ("|P|", -ct))
    return ExpansionResult(value, regime, terms)


def t_minus_expansion(lam: float, pressure: float) -> ExpansionResult:
    """Leading small-pressure term of T_minus: C |P|^(1/(2 lam - 2))."""
    _check_lam(lam)
    p_abs = _check_pressure(pressure, strict=True)
    s = 1.0 / (2.0 * lam - 2.0)
    c = _minus_coeff(lam)
    return ExpansionResult(c * p_abs ** s, _regime(lam), ((f"|P|^{s:g}", c),))


def t_sum_expansion(lam: float, pressure: float) -> ExpansionResult:
    """Truncation of T_plus + T_minus; its leading correction to pi is
    negative in every regime, which drives the gluing existence argument."""
    _check_lam(lam)
    p_abs = _check_pressure(pressure, strict=True)
    regime = _regime(lam)
    if regime is Regime.SUB_CRITICAL:
        c = _linear_coeff(lam)
        value = math.pi - c * p_abs
        terms = (("1", math.pi), ("|P|", -c))
        leading = -c
    elif regime is Regime.LOGARITHMIC:
        value = math.pi - 3.0 * p_abs * math.log(1.0 / p_abs)
        terms = (("1", math.pi), ("|P| log(1/|P|)", -3.0))
        leading = -3.0
    else:
        s = 1.0 / (2.0 * lam - 2.0)
        c = _sqrt_coeff(lam) * (1.0 - math.sin(math.pi * s))
        value = math.pi - c * p_abs ** s
        terms = (("1", math.pi), (f"|P|^{s:g}", -c))
        leading = -c
    if not leading < 0.0:
        raise DomainError(f"leading coefficient not negative at lam={lam}")
    return ExpansionResult(value, regime, terms)


def pstar_approx(lam: float, mode: str = "quadratic") -> float:
    """Approximate |P*| of the two-sink combination.

    ``quadratic`` evaluates (pi^2/512) (2 - lam)^2 (valid as lam -> 2);
    ``implicit`` balances the |P|^s and |P| terms of the period sum and
    requires 3/2 < lam < 2."""
    _check_lam(lam)
    if mode == "quadratic":
        return (math.pi ** 2 / 512.0) * (2.0 - lam) ** 2
    if mode != "implicit":
        raise DomainError(f"mode must be 'implicit' or 'quadratic', got {mode!r}")
    if lam <= 1.5:
        raise DomainError("implicit mode requires 3/2 < lam < 2")
    s = 1.0 / (2.0 * lam - 2.0)
    rhs = (
        2.0 ** s
        * math.exp(
            log_gamma(1.0 - s)
            + log_gamma(lam * s)
            + log_gamma(lam - 0.5)
            - log_gamma(lam)
        )
        / (math.pi * lam ** (2.0 * lam - 3.0))
        * (1.0 - math.cos((2.0 - lam) * math.pi * s))
        / math.tan((2.0 - lam) * math.pi)
    )
    return rhs ** ((2.0 * lam - 2.0) / (2.0 * lam - 3.0))


_MELLIN_QUAD = QuadratureSpec(relative_tolerance=1e-10, max_levels=10)


def mellin_F(lam: float, z: float) -> float:
    """The weighted coefficient integral

        (lam/2) * int_0^1 w^((lam-1)(z-1) - 1/2) (1-w)^(z - 3/2)
                          / (1 - w^(lam-1))^(z-1) dw,

    convergent as written for z > 1/2 and (lam-1)(z-1) > -1/2.
    At z = 1 it evaluates to lam*pi/2."""
    _check_lam(lam)
    if not math.isfinite(z):
        raise DomainError("z must be finite")
    left_exp = (lam - 1.0) * (z - 1.0) - 0.5
    if z <= 0.5 or left_exp <= -1.0:
        raise DomainError(
            f"integral not convergent as written at lam={lam}, z={z}"
        )

    def integrand(w):
        w = np.asarray(w)
        hi = w > 0.5
        logw = np.empty_like(w)
        logw[hi] = np.log1p(-(1.0 - w[hi]))
        logw[~hi] = np.log(w[~hi])
        one_minus_pow = -np.expm1((lam - 1.0) * logw)  # 1 - w^(lam-1)
        return (
            0.5
            * lam
            * w ** left_exp
            * (1.0 - w) ** (z - 1.5)
            * one_minus_pow ** (1.0 - z)
        )

    # Combined right-endpoint exponent: (z - 3/2) - (z - 1) = -1/2.
    value, _ = integrate_singular(integrand, left_exp, -0.5, _MELLIN_QUAD)
    return value


def beta_tangent_identity_check(lam: float) -> tuple[float, float]:
    """Numeric and closed forms of the linear-coefficient integral:

    lhs = int_0^1 (t^(1/2 - lam) - t^(-1/2)) (1-t)^(-3/2) dt,
    rhs = 2 sqrt(pi) Gamma(lam) tan(pi lam) / Gamma(lam - 1/2),

    finite only for 1 < lam < 3/2 (the integrand's zero at t = 1 tames
    the (1-t)^(-3/2) factor)."""
    _check_lam(lam)
    if lam >= 1.5:
        raise DomainError("identity integral diverges for lam >= 3/2")

    def integrand(t):
        t = np.asarray(t)
        hi = t > 0.5
        logt = np.empty_like(t)
        logt[hi] = np.log1p(-(1.0 - t[hi]))
        logt[~hi] = np.log(t[~hi])
        # t^(1/2-lam) - t^(-1/2) = t^(-1/2) * expm1((1 - lam) log t)
        diff = np.exp(-0.5 * logt) * np.expm1((1.0 - lam) * logt)
        return diff * (1.0 - t) ** -1.5

    lhs, _ = integrate_singular(
        integrand, 0.5 - lam, -0.5, QuadratureSpec(relative_tolerance=1e-10)
    )
    rhs = 2.0 * _SQRT_PI * math.exp(log_gamma(lam) - log_gamma(lam - 0.5)) * _tan_pi(lam)
    return lhs, rhs
