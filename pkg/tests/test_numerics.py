import math

import numpy as np
import pytest

from multisink.errors import DomainError, NonConvergenceError, NoSignChangeError
from multisink.numerics import (
    BracketedRootSpec,
    QuadratureSpec,
    find_root,
    integrate_singular,
    log_gamma,
)


def bisection_oracle(f, lo, hi, iters=200):
    """Plain bisection, independent of the library's Brent path."""
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) * flo <= 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


class TestIntegrateSingular:
    def test_arcsine(self):
        v, err = integrate_singular(lambda s: 1.0 / np.sqrt((1 - s) * (1 + s)), 0.0, -0.5)
        assert v == pytest.approx(math.pi / 2, rel=1e-11)
        assert err >= 0.0

    def test_beta_half_half(self):
        v, _ = integrate_singular(lambda s: s ** -0.5 * (1 - s) ** -0.5, -0.5, -0.5)
        assert v == pytest.approx(math.pi, rel=1e-11)

    def test_degenerate_plus_period_integrand(self):
        # 2 / (lam sqrt(s^(2-2/lam) - s^2)) integrates to pi at zero pressure.
        lam = 1.5
        kappa = 2 - 2 / lam
        # As naively written the integrand loses digits to the s -> 1
        # cancellation inside s^kappa - s^2, which caps the achievable
        # accuracy around 1e-10 regardless of the rule.
        v, _ = integrate_singular(
            lambda s: 2.0 / (lam * np.sqrt(s ** kappa - s * s)),
            -(1 - 1 / lam),
            -0.5,
        )
        assert v == pytest.approx(math.pi, rel=1e-9)

        # The cancellation-free arrangement meets the full contract.
        def stable(s):
            with np.errstate(divide="ignore", over="ignore"):
                logs = np.where(s > 0.5, np.log1p(-(1 - s)), np.log(s))
                return 2.0 / (lam * s * np.sqrt(np.expm1((kappa - 2.0) * logs)))

        v2, _ = integrate_singular(stable, -(1 - 1 / lam), -0.5)
        assert v2 == pytest.approx(math.pi, rel=1e-11)

    def test_beta_battery_cross_checked_with_log_gamma(self):
        rng = np.random.default_rng(20240817)
        for _ in range(20):
            p, q = rng.uniform(0.2, 3.0, size=2)
            truth = math.exp(log_gamma(p) + log_gamma(q) - log_gamma(p + q))
            v, _ = integrate_singular(
                lambda s: s ** (p - 1) * (1 - s) ** (q - 1), p - 1, q - 1
            )
            assert v == pytest.approx(truth, rel=1e-11)

    def test_error_estimate_honours_tolerance(self):
        spec = QuadratureSpec(relative_tolerance=1e-9)
        v, err = integrate_singular(lambda s: np.exp(s), 0.0, 0.0, spec)
        assert err <= 1e-9 * abs(v)
        assert v == pytest.approx(math.e - 1.0, rel=1e-12)

    def test_rejects_bad_exponents(self):
        for bad in (-1.0, -1.5, math.nan):
            with pytest.raises(DomainError):
                integrate_singular(lambda s: s, bad, 0.0)
            with pytest.raises(DomainError):
                integrate_singular(lambda s: s, 0.0, bad)

    def test_nonconvergence_is_reported(self):
        spec = QuadratureSpec(relative_tolerance=1e-13, max_levels=2, absolute_floor=1e-19)
        with pytest.raises(NonConvergenceError):
            integrate_singular(lambda s: np.cos(40.0 * s) / np.sqrt(1 - s), 0.0, -0.5, spec)

    def test_spec_validation(self):
        with pytest.raises(DomainError):
            QuadratureSpec(relative_tolerance=2.0)
        with pytest.raises(DomainError):
            QuadratureSpec(relative_tolerance=1e-12, absolute_floor=1e-3)
        with pytest.raises(DomainError):
            QuadratureSpec(max_levels=0)

    def test_deterministic(self):
        f = lambda s: s ** -0.3 * (1 - s) ** -0.7  # noqa: E731
        first = integrate_singular(f, -0.3, -0.7)
        second = integrate_singular(f, -0.3, -0.7)
        assert first == second


class TestLogGamma:
    def test_known_values(self):
        assert log_gamma(1.0) == 0.0
        assert log_gamma(0.5) == pytest.approx(0.5 * math.log(math.pi), rel=1e-14)
        assert log_gamma(1.5) == pytest.approx(math.log(math.sqrt(math.pi) / 2), rel=1e-14)

    @pytest.mark.parametrize("x", [0.3, 0.7, 1.1, 1.9, 5.5])
    def test_recurrence(self, x):
        assert abs(log_gamma(x + 1.0) - log_gamma(x) - math.log(x)) <= 1e-12

    def test_domain(self):
        for bad in (0.0, -1.0, math.nan):
            with pytest.raises(DomainError):
                log_gamma(bad)


class TestFindRoot:
    def test_linear(self):
        assert find_root(lambda x: x - 2.0, BracketedRootSpec(0.0, 5.0)) == pytest.approx(2.0)

    def test_sqrt2(self):
        r = find_root(lambda x: x * x - 2.0, BracketedRootSpec(1.0, 2.0))
        assert r == pytest.approx(math.sqrt(2.0), rel=1e-12)

    def test_against_bisection_oracle(self):
        # 2.25 x^2 + x^(2/3) - 1 has a single root near 0.435 in [0, 1]
        f = lambda x: 2.25 * x * x + x ** (2.0 / 3.0) - 1.0  # noqa: E731
        oracle = bisection_oracle(f, 0.0, 1.0)
        assert oracle == pytest.approx(0.435048196652390, abs=1e-13)
        r = find_root(f, BracketedRootSpec(0.0, 1.0))
        assert r == pytest.approx(oracle, rel=1e-12)

    def test_result_path_independent(self):
        # Brent's accelerated path and plain bisection agree to tolerance.
        f = lambda x: math.cos(x) - x  # noqa: E731
        brent = find_root(f, BracketedRootSpec(0.0, 1.0))
        assert brent == pytest.approx(bisection_oracle(f, 0.0, 1.0), rel=1e-12)

    def test_no_sign_change(self):
        with pytest.raises(NoSignChangeError):
            find_root(lambda x: x * x + 1.0, BracketedRootSpec(-1.0, 1.0))

    def test_exact_endpoint_root(self):
        assert find_root(lambda x: x, BracketedRootSpec(0.0, 1.0)) == 0.0

    def test_nonconvergence(self):
        spec = BracketedRootSpec(0.0, 1.0, relative_tolerance=1e-15, max_iterations=3)
        with pytest.raises(NonConvergenceError):
            find_root(lambda x: math.tanh(50.0 * (x - 0.6180339887)), spec)

    def test_spec_validation(self):
        with pytest.raises(DomainError):
            BracketedRootSpec(1.0, 0.0)
        with pytest.raises(DomainError):
            BracketedRootSpec(0.0, 1.0, relative_tolerance=0.0)
        with pytest.raises(DomainError):
            BracketedRootSpec(0.0, 1.0, max_iterations=0)
