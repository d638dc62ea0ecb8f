"""Gluing local solutions into 2*pi-periodic profiles.

A gluing combination is an even-length sequence of branch tokens; pieces
alternate in sign starting positive.  The critical pressure is the P < 0
at which the lifespans sum to 2*pi.  The solve works on the objective

    n_minus * T_minus(q) - n_plus * (pi - T_plus(q)) + (n_plus - 2) * pi

with q = -2P, which keeps full relative accuracy when the root sits many
orders of magnitude below the period scale (it does as lam -> 2).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, NoRootError, NonConvergenceError
from .local_solutions import (
    Branch,
    LocalSolution,
    Parameters,
    amplitude,
    evaluate_profile,
    period,
    period_plus_deficit,
    reconstruct,
)
from .numerics import BracketedRootSpec, QuadratureSpec, find_root

__all__ = [
    "GluingSpec",
    "PeriodicProfile",
    "SolveStatus",
    "CriticalPressureResult",
    "GluingOutcome",
    "period_sum",
    "solve_critical_pressure",
    "assemble",
    "enumerate_gluings",
]

TWO_PI = 2.0 * math.pi

# Pressure scan: q = -2P, log-spaced.  The lower end covers critical
# pressures down to ~1e-12 with margin; the upper end is deep in the
# T -> pi/lam regime.
_SCAN_LO = 1e-16
_SCAN_HI = 1e6
_SCAN_POINTS = 400

# Period evaluations inside the solver run tighter than the public
# period() contract: near lam = 2 the root is conditioned like
# |objective| ~ 1e-10 * |T - pi| scale.
_SOLVER_QUAD = QuadratureSpec(relative_tolerance=1e-13, max_levels=10, absolute_floor=1e-19)

_RESIDUAL_TOL = 1e-10 * TWO_PI


@dataclass(frozen=True)
class GluingSpec:
    """An even-length alternating-sign sequence of branch tokens."""

    sequence: tuple[Branch, ...]

    def __post_init__(self):
        if len(self.sequence) == 0 or len(self.sequence) % 2 != 0:
            raise DomainError("gluing sequence must have even, positive length")

    @classmethod
    def parse(cls, text: str) -> "GluingSpec":
        """Parse comma-separated tokens from {P, M}; case-insensitive,
        whitespace ignored (e.g. "P,M,P,M")."""
        tokens = [t for t in (p.strip() for p in text.split(",")) if t]
        if not tokens:
            raise DomainError("empty gluing specification")
        return cls(tuple(Branch.from_token(t) for t in tokens))

    @property
    def n_plus(self) -> int:
        return sum(1 for b in self.sequence if b is Branch.PLUS)

    @property
    def n_minus(self) -> int:
        return len(self.sequence) - self.n_plus

    def __str__(self) -> str:
        return ",".join(b.value for b in self.sequence)


def period_sum(spec: GluingSpec, params: Parameters, quad: QuadratureSpec = _SOLVER_QUAD) -> float:
    """n_plus * T_plus + n_minus * T_minus; depends only on the token multiset."""
    return _period_sum_minus_2pi(spec.n_plus, spec.n_minus, params, quad) + TWO_PI


def _period_sum_minus_2pi(n_plus: int, n_minus: int, params: Parameters, quad: QuadratureSpec) -> float:
    total = (n_plus - 2) * math.pi
    if n_plus:
        total -= n_plus * period_plus_deficit(params, quad)
    if n_minus:
        total += n_minus * period(Branch.MINUS, params, quad)
    return total


class SolveStatus(enum.Enum):
    FOUND = "found"
    NO_ROOT = "no_root"
    DEGENERATE_SHEAR = "degenerate_shear"


@dataclass(frozen=True)
class CriticalPressureResult:
    status: SolveStatus
    pressure: float | None
    residual: float | None
    root_count: int
    scanned: tuple[float, float]

    @property
    def found(self) -> bool:
        return self.status is SolveStatus.FOUND


@lru_cache(maxsize=256)
def _scan_values(lam: float, scan_points: int, rtol: float, floor: float, levels: int):
    """Shared log-grid scan of (pi - T_plus, T_minus) over q = -2P."""
    quad = QuadratureSpec(rtol, levels, floor)
    q_grid = np.logspace(math.log10(_SCAN_LO), math.log10(_SCAN_HI), scan_points)
    deficit = np.array([period_plus_deficit(Parameters(lam, -q / 2.0), quad) for q in q_grid])
    t_minus = np.array([period(Branch.MINUS, Parameters(lam, -q / 2.0), quad) for q in q_grid])
    return q_grid, deficit, t_minus


def solve_critical_pressure(
    spec: GluingSpec,
    lam: float,
    scan_points: int = _SCAN_POINTS,
    quad: QuadratureSpec = _SOLVER_QUAD,
) -> CriticalPressureResult:
    """Find P* < 0 with period_sum = 2*pi for the combination.

    Scans a log-spaced bracket in -P over [1e-16, 1e6] and refines the
    first sign change (the root closest to P = 0); reports the number of
    sign changes seen on the scan.  The two-PLUS combination is the
    degenerate P = 0 shear case.
    """
    if not 1.0 < lam < 2.0:
        raise DomainError(f"lam must be in (1, 2), got {lam!r}")
    n_plus, n_minus = spec.n_plus, spec.n_minus
    if (n_plus, n_minus) == (2, 0):
        return CriticalPressureResult(
            SolveStatus.DEGENERATE_SHEAR, 0.0, 0.0, 0, (_SCAN_LO, _SCAN_HI)
        )

    q_grid, deficit, t_minus = _scan_values(
        lam, scan_points, quad.relative_tolerance, quad.absolute_floor, quad.max_levels
    )
    g = n_minus * t_minus - n_plus * deficit + (n_plus - 2) * math.pi
    sign_flips = np.nonzero(np.sign(g[:-1]) * np.sign(g[1:]) < 0)[0]
    root_count = int(sign_flips.size)
    if root_count == 0:
        return CriticalPressureResult(
            SolveStatus.NO_ROOT, None, None, 0, (_SCAN_LO, _SCAN_HI)
        )

    i = int(sign_flips[0])

    def objective(q):
        return _period_sum_minus_2pi(n_plus, n_minus, Parameters(lam, -q / 2.0), quad)

    q_star = find_root(
        objective,
        BracketedRootSpec(q_grid[i], q_grid[i + 1], relative_tolerance=1e-14, max_iterations=256),
    )
    residual = abs(objective(q_star))
    if residual > _RESIDUAL_TOL:
        raise NonConvergenceError(
            f"critical-pressure residual {residual:.3e} exceeds {_RESIDUAL_TOL:.3e}"
        )
    return CriticalPressureResult(
        SolveStatus.FOUND, -q_star / 2.0, residual, root_count, (_SCAN_LO, _SCAN_HI)
    )


@dataclass(frozen=True)
class GluingOutcome:
    """Scan result for one token multiset in :func:`enumerate_gluings`."""

    n_plus: int
    n_minus: int
    status: SolveStatus
    pressure: float | None
    root_count: int


def enumerate_gluings(
    lam: float, max_pieces: int, scan_points: int = _SCAN_POINTS
) -> list[GluingOutcome]:
    """Solvability report for every multiset with an even piece count
    up to ``max_pieces``.  The (2, 0) multiset is the degenerate shear."""
    if not 1.0 < lam < 2.0:
        raise DomainError(f"lam must be in (1, 2), got {lam!r}")
    if max_pieces < 2 or max_pieces % 2 != 0:
        raise DomainError("max_pieces must be an even integer >= 2")
    outcomes = []
    for total in range(2, max_pieces + 1, 2):
        for n_plus in range(0, total + 1):
            n_minus = total - n_plus
            spec = GluingSpec(
                tuple([Branch.PLUS] * n_plus + [Branch.MINUS] * n_minus)
            )
            res = solve_critical_pressure(spec, lam, scan_points)
            outcomes.append(
                GluingOutcome(n_plus, n_minus, res.status, res.pressure, res.root_count)
            )
    return outcomes


# ---------------------------------------------------------------------------
# assembled periodic profiles
# ---------------------------------------------------------------------------


def _shear_local_solution(lam: float, n_samples: int) -> LocalSolution:
    """The degenerate P = 0 positive piece psi = lam^-lam sin(theta)^lam."""
    params = Parameters(lam, 0.0)
    amp = lam ** (-lam)
    m = n_samples // 2
    theta = math.pi * 0.5 * (1.0 - np.cos(np.pi * np.arange(2 * m + 1) / (2 * m)))
    s = np.sin(theta)
    psi = amp * s ** lam
    dpsi = amp * lam * s ** (lam - 1.0) * np.cos(theta)
    dpsi[0] = 0.0
    dpsi[-1] = 0.0
    return LocalSolution(Branch.PLUS, params, math.pi, amp, theta, psi, dpsi)


@dataclass(frozen=True)
class PeriodicProfile:
    """A glued 2*pi-periodic stream profile.

    Knots are the angles where psi vanishes; piece k runs from knot k
    with alternating sign, the first piece positive from theta = 0.
    Pointwise evaluation is exact (quadrature inversion), not an
    interpolation of the stored samples.
    """

    spec: GluingSpec
    lam: float
    pressure: float
    knots: np.ndarray
    pieces: tuple[tuple[LocalSolution, int], ...]
    total_period: float

    @property
    def alpha(self) -> float:
        return 2.0 - self.lam

    @property
    def is_shear(self) -> bool:
        return self.pressure == 0.0

    def piece_index(self, theta) -> np.ndarray:
        """Index of the piece owning each angle; angles exactly on a knot
        belong to the lower-angle piece (one-sided limit from below)."""
        th = np.mod(np.asarray(theta, dtype=float), TWO_PI)
        idx = np.searchsorted(self.knots, th, side="left") - 1
        return np.where(idx < 0, len(self.pieces) - 1, idx)

    def psi_dpsi(self, theta) -> tuple[np.ndarray, np.ndarray]:
        """Profile psi and psi' at arbitrary angles (vectorised)."""
        th = np.mod(np.atleast_1d(np.asarray(theta, dtype=float)), TWO_PI)
        idx = self.piece_index(th)
        psi = np.empty_like(th)
        dpsi = np.empty_like(th)
        for k, (sol, sign) in enumerate(self.pieces):
            mask = idx == k
            if not np.any(mask):
                continue
            start = self.knots[k]
            tau = th[mask] - start
            tau = np.where(tau < 0.0, tau + TWO_PI, tau)  # wrap of the last piece
            tau = np.clip(tau, 0.0, sol.lifespan)
            if self.is_shear:
                s = np.sin(tau)
                p = sol.amplitude * s ** self.lam
                d = sol.amplitude * self.lam * s ** (self.lam - 1.0) * np.cos(tau)
                d = np.where((tau == 0.0) | (tau == sol.lifespan), 0.0, d)
            else:
                p, d = evaluate_profile(sol.branch, sol.params, tau)
            psi[mask] = sign * p
            dpsi[mask] = sign * d
        return psi, dpsi

    def branch_value(self, theta) -> np.ndarray:
        """First-integral value B of the piece owning each angle."""
        idx = self.piece_index(theta)
        bvals = np.array([sol.branch.b_value for sol, _ in self.pieces])
        return bvals[idx]

    def piece_sign(self, theta) -> np.ndarray:
        idx = self.piece_index(theta)
        signs = np.array([sign for _, sign in self.pieces])
        return signs[idx]

    def descending_knots(self) -> np.ndarray:
        """Knot angles where the profile crosses from positive to negative."""
        return self.knots[1::2]


def assemble(spec: GluingSpec, lam: float, n_samples_per_piece: int = 64) -> PeriodicProfile:
    """Solve the critical pressure and glue the pieces into a profile.

    The two-PLUS spec assembles the closed-form shear profile at P = 0.
    Raises NoRootError when the combination admits no critical pressure.
    """
    res = solve_critical_pressure(spec, lam)
    if res.status is SolveStatus.NO_ROOT:
        raise NoRootError(
            f"no critical pressure for {spec} at lam={lam} in -P range {res.scanned}"
        )
    if res.status is SolveStatus.DEGENERATE_SHEAR:
        piece = _shear_local_solution(lam, n_samples_per_piece)
        knots = np.array([0.0, math.pi])
        pieces = ((piece, 1), (piece, -1))
        return PeriodicProfile(spec, lam, 0.0, knots, pieces, TWO_PI)

    params = Parameters(lam, res.pressure)
    sols = {
        branch: reconstruct(branch, params, n_samples_per_piece)
        for branch in set(spec.sequence)
    }
    pieces = []
    knots = [0.0]
    sign = 1
    for branch in spec.sequence:
        sol = sols[branch]
        pieces.append((sol, sign))
        knots.append(knots[-1] + sol.lifespan)
        sign = -sign
    total = knots.pop()
    return PeriodicProfile(spec, lam, res.pressure, np.array(knots), tuple(pieces), total)
