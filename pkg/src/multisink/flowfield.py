"""Velocity, pseudo-velocity, and vorticity of an assembled profile;
stagnation-point location and classification; Cartesian grid sampling.

The velocity of the homogeneous state with stream function r^lam psi is
u = r^(lam-1) (-psi' e_r + lam psi e_theta); the pseudo-velocity
subtracts the self-similar drift r/alpha e_r with alpha = 2 - lam.
Each sign change of psi from + to - carries a stagnation point at radius
alpha^(1/alpha) (-2P)^(1/(2 alpha)); the origin is a saddle.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, KnotSingularityError, StepTooLargeError
from .gluing import TWO_PI, PeriodicProfile

__all__ = [
    "StagnationKind",
    "StagnationPoint",
    "FieldGrid",
    "velocity",
    "pseudo_velocity",
    "vorticity_angular",
    "stagnation_points",
    "sink_radius",
    "jacobian_fd",
    "eigenvalues_2x2",
    "sample_grid",
]

# Angular distance below which vorticity evaluation is refused at a knot.
_KNOT_RESOLUTION = 1e-12


def _polar_components(profile: PeriodicProfile, r, theta):
    r = np.asarray(r, dtype=float)
    theta = np.asarray(theta, dtype=float)
    psi, dpsi = profile.psi_dpsi(theta)
    lam = profile.lam
    rp = np.where(r > 0.0, r ** (lam - 1.0), 0.0)
    return rp * -dpsi, rp * lam * psi


def velocity(profile: PeriodicProfile, r, theta) -> np.ndarray:
    """Cartesian velocity at polar points; shape (..., 2).  Vanishes at
    the origin since lam > 1."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if np.any(r < 0.0):
        raise DomainError("radius must be nonnegative")
    u_r, u_t = _polar_components(profile, r, theta)
    ct, st = np.cos(theta), np.sin(theta)
    return np.stack([u_r * ct - u_t * st, u_r * st + u_t * ct], axis=-1)


def pseudo_velocity(profile: PeriodicProfile, r, theta) -> np.ndarray:
    """Velocity minus the self-similar drift (r/alpha) e_r."""
    r = np.atleast_1d(np.asarray(r, dtype=float))
    theta = np.atleast_1d(np.asarray(theta, dtype=float))
    if np.any(r < 0.0):
        raise DomainError("radius must be nonnegative")
    u_r, u_t = _polar_components(profile, r, theta)
    u_r = u_r - r / profile.alpha
    ct, st = np.cos(theta), np.sin(theta)
    return np.stack([u_r * ct - u_t * st, u_r * st + u_t * ct], axis=-1)


def _pseudo_cartesian(profile: PeriodicProfile, xy: np.ndarray) -> np.ndarray:
    x, y = xy[..., 0], xy[..., 1]
    r = np.hypot(x, y)
    theta = np.mod(np.arctan2(y, x), TWO_PI)
    return pseudo_velocity(profile, r, theta)


def vorticity_angular(profile: PeriodicProfile, theta) -> np.ndarray:
    """Angular factor of the vorticity: (lam-1) B / lam * sign(psi)
    |psi|^(1 - 2/lam); the full vorticity is r^(lam-2) times this.

    Diverges at the knots; evaluation within 1e-12 rad of one raises
    KnotSingularityError.
    """
    th = np.atleast_1d(np.mod(np.asarray(theta, dtype=float), TWO_PI))
    knots = profile.knots
    dist = np.min(
        np.abs((th[:, None] - knots[None, :] + math.pi) % TWO_PI - math.pi), axis=1
    )
    if np.any(dist < _KNOT_RESOLUTION):
        raise KnotSingularityError("vorticity requested within 1e-12 rad of a knot")
    lam = profile.lam
    psi, _ = profile.psi_dpsi(th)
    b = profile.branch_value(th)
    return (lam - 1.0) / lam * b * np.sign(psi) * np.abs(psi) ** (1.0 - 2.0 / lam)


class StagnationKind(enum.Enum):
    SINK = "sink"
    SADDLE = "saddle"


@dataclass(frozen=True)
class StagnationPoint:
    angle: float
    radius: float
    kind: StagnationKind
    eigenvalues: tuple[float, float] | None


def sink_radius(profile: PeriodicProfile) -> float:
    """alpha^(1/alpha) * (-2P)^(1/(2 alpha))."""
    a = profile.alpha
    return a ** (1.0 / a) * (-2.0 * profile.pressure) ** (1.0 / (2.0 * a))


def stagnation_points(profile: PeriodicProfile) -> list[StagnationPoint]:
    """Origin saddle plus one sink per descending knot (half the pieces).

    The shear profile has psi' = 0 at its knots, so it contributes no
    sinks; only the origin is reported.  Sink eigenvalues are the exact
    pair (-1, -lam/(2-lam)).
    """
    points = [StagnationPoint(0.0, 0.0, StagnationKind.SADDLE, None)]
    if profile.is_shear:
        return points
    lam = profile.lam
    r = sink_radius(profile)
    eig = (-1.0, -lam / (2.0 - lam))
    for angle in profile.descending_knots():
        points.append(StagnationPoint(float(angle), r, StagnationKind.SINK, eig))
    return points


def _ray_distance(profile: PeriodicProfile, x: float, y: float) -> float:
    """Distance from (x, y) to the nearest knot ray."""
    r = math.hypot(x, y)
    theta = math.atan2(y, x)
    best = math.inf
    for k in profile.knots:
        d = theta - k
        if math.cos(d) > 0.0:
            best = min(best, abs(r * math.sin(d)))
        else:
            best = min(best, r)
    return best


def jacobian_fd(profile: PeriodicProfile, point, h: float) -> np.ndarray:
    """Central-difference Jacobian of the pseudo-velocity at a Cartesian
    point, as a 2x2 array.

    At points on a knot ray (the sinks live there) the stencil is taken
    along the ray frame, where the tangential component vanishes
    identically along the ray and the eigenvalue structure survives the
    one-sided vorticity blow-up; elsewhere the stencil is axis-aligned.
    A point off a ray by less than h cannot be probed symmetrically and
    raises StepTooLargeError.
    """
    if not h > 0.0:
        raise DomainError("step h must be positive")
    x, y = float(point[0]), float(point[1])
    r = math.hypot(x, y)
    if r == 0.0:
        raise DomainError("the pseudo-velocity is not differentiable at the origin")
    d_ray = _ray_distance(profile, x, y)
    if d_ray <= 1e-9 * r:
        c, s = x / r, y / r
        e1 = np.array([c, s])
        e2 = np.array([-s, c])
    elif d_ray < h:
        raise StepTooLargeError(
            f"stencil of size {h:g} straddles a knot ray at distance {d_ray:g}"
        )
    else:
        e1 = np.array([1.0, 0.0])
        e2 = np.array([0.0, 1.0])

    p = np.array([x, y])
    probes = np.stack([p + h * e1, p - h * e1, p + h * e2, p - h * e2])
    vals = _pseudo_cartesian(profile, probes)
    d1 = (vals[0] - vals[1]) / (2.0 * h)
    d2 = (vals[2] - vals[3]) / (2.0 * h)
    rot = np.stack([e1, e2], axis=1)  # columns are the stencil directions
    return np.stack([d1, d2], axis=1) @ rot.T


def eigenvalues_2x2(mat: np.ndarray) -> tuple[complex, complex]:
    """Eigenvalues of a 2x2 matrix from the closed-form quadratic."""
    a, b = float(mat[0, 0]), float(mat[0, 1])
    c, d = float(mat[1, 0]), float(mat[1, 1])
    tr = a + d
    disc = (a - d) ** 2 / 4.0 + b * c
    root = math.sqrt(disc) if disc >= 0.0 else complex(0.0, math.sqrt(-disc))
    return (tr / 2.0 - root, tr / 2.0 + root)


@dataclass(frozen=True)
class FieldGrid:
    """Row-major uniform grid of field samples over a bounding box."""

    bbox: tuple[float, float, float, float]
    nx: int
    ny: int
    x: np.ndarray
    y: np.ndarray
    u: np.ndarray
    v: np.ndarray

    def rows(self):
        """(x, y, u, v) tuples in row-major order."""
        return zip(self.x, self.y, self.u, self.v)


def sample_grid(
    profile: PeriodicProfile,
    bbox: tuple[float, float, float, float],
    nx: int,
    ny: int,
    field: str = "pseudo",
) -> FieldGrid:
    """Evaluate a field on an nx-by-ny grid spanning the box.

    ``field`` is "velocity" or "pseudo".  Grid points exactly on knot
    rays take the one-sided limit from the lower-angle piece (the
    profile's piece-lookup convention); the fields themselves are
    continuous there.
    """
    xmin, xmax, ymin, ymax = bbox
    if not (xmin < xmax and ymin < ymax) or nx < 1 or ny < 1:
        raise DomainError("invalid bounding box or resolution")
    if field not in ("velocity", "pseudo"):
        raise DomainError(f"unknown field {field!r}")
    xs = np.linspace(xmin, xmax, nx) if nx > 1 else np.array([xmin])
    ys = np.linspace(ymin, ymax, ny) if ny > 1 else np.array([ymin])
    yy, xx = np.meshgrid(ys, xs, indexing="ij")  # row-major over y rows
    x = xx.ravel()
    y = yy.ravel()
    r = np.hypot(x, y)
    theta = np.mod(np.arctan2(y, x), TWO_PI)
    fn = pseudo_velocity if field == "pseudo" else velocity
    uv = fn(profile, r, theta)
    return FieldGrid(tuple(map(float, bbox)), nx, ny, x, y, uv[:, 0], uv[:, 1])
