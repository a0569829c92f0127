"""Spatially structured response to a Laguerre-Gaussian vortex probe.

Probe b carries orbital angular momentum l, so at transverse position
(x, y) = (rho cos Phi, rho sin Phi) the uniform-field results apply with the
relative phase phi -> l * Phi and the ratio x -> X (rho/w)^|l| exp(-rho^2/w^2),
X = |Omega_b| / |Omega_a|.  Maps are evaluated pointwise from the closed
forms; nothing is interpolated except in :func:`count_angular_extrema`.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.ndimage import map_coordinates

from .errors import DomainError, ParameterError
from .model import SystemParams
from .plasmon_env import PlasmonEnvironment
from .susceptibility import _factors, chi1, chi3

QUANTITIES = ("im_chi1", "re_chi1", "im_chi3", "re_chi3")


@dataclass(frozen=True)
class VortexBeam:
    strength: float = 1.0
    l: int = 1
    w: float = 1.0

    def __post_init__(self):
        if not np.isfinite(self.strength) or self.strength < 0:
            raise ParameterError("vortex strength must be finite and >= 0")
        if int(self.l) != self.l:
            raise ParameterError("winding number l must be an integer")
        if not np.isfinite(self.w) or self.w <= 0:
            raise ParameterError("beam waist w must be > 0")


@dataclass(frozen=True)
class SpatialGrid:
    half_extent: float = 2.0
    n: int = 201

    def __post_init__(self):
        if not np.isfinite(self.half_extent) or self.half_extent <= 0:
            raise ParameterError("half_extent must be > 0")
        if int(self.n) != self.n or self.n < 2:
            raise ParameterError("grid needs n >= 2 points per axis")

    @property
    def axis(self) -> np.ndarray:
        return np.linspace(-self.half_extent, self.half_extent, self.n)

    @property
    def spacing(self) -> float:
        return 2 * self.half_extent / (self.n - 1)

    def mesh(self):
        """(X, Y) arrays with X varying along axis 1."""
        return np.meshgrid(self.axis, self.axis, indexing="xy")


@dataclass
class SpatialMap:
    grid: SpatialGrid
    quantity: str
    values: np.ndarray
    metadata: dict = field(default_factory=dict)


def lg_amplitude(rho_dist, beam: VortexBeam):
    rho_dist = np.asarray(rho_dist, dtype=float)
    if np.any(rho_dist < 0):
        raise DomainError("radial distance must be >= 0")
    r = rho_dist / beam.w
    out = beam.strength * r ** abs(beam.l) * np.exp(-r ** 2)
    return out[()] if out.ndim == 0 else out


def effective_drive(x_pos, y_pos, beam: VortexBeam, omega_a_strength: float):
    """(x_eff, phase) seen by the emitter at transverse position (x_pos, y_pos).

    The azimuth is undefined at the core; there x_eff = 0 for l != 0 and the
    phase is reported as 0.
    """
    if omega_a_strength <= 0:
        raise DomainError("omega_a_strength must be > 0")
    x_pos = np.asarray(x_pos, dtype=float)
    y_pos = np.asarray(y_pos, dtype=float)
    azimuth = np.arctan2(y_pos, x_pos)
    x_eff = lg_amplitude(np.hypot(x_pos, y_pos), beam) / omega_a_strength
    phase = beam.l * azimuth
    return x_eff, (phase[()] if np.ndim(phase) == 0 else phase)


def _quantity(values, quantity):
    if quantity not in QUANTITIES:
        raise ParameterError(f"quantity must be one of {QUANTITIES}")
    return np.imag(values) if quantity.startswith("im") else np.real(values)


def point_value(rho_dist, azimuth, beam: VortexBeam, X: float, sys: SystemParams,
                env: PlasmonEnvironment, delta: float = 0.0, quantity: str = "im_chi1"):
    """Analytic map value at polar position (rho_dist, azimuth); no grid involved."""
    x_eff = X * lg_amplitude(rho_dist, VortexBeam(1.0, beam.l, beam.w))
    phase = beam.l * np.asarray(azimuth, dtype=float)
    fn = chi1 if quantity.endswith("chi1") else chi3
    return _quantity(fn(delta, x_eff, phase, sys, env), quantity)


def resonant_absorption(x_eff, phase, sys: SystemParams, env: PlasmonEnvironment):
    """Line-centre Im chi1 for degenerate upper levels: (G - kappa x cos phase) / (G^2 - kappa^2)."""
    _factors(0.0, sys, env)
    G = env.gamma + sys.gamma_prime
    return (G - env.kappa * np.asarray(x_eff) * np.cos(phase)) / (G ** 2 - env.kappa ** 2)


def _map_inputs(grid: SpatialGrid, beam: VortexBeam, X: float):
    xs, ys = grid.mesh()
    unit = VortexBeam(1.0, beam.l, beam.w)
    x_eff, phase = effective_drive(xs, ys, unit, 1.0)
    return X * x_eff, phase


def _metadata(beam, X, sys, env, delta, extra=None):
    meta = {"l": beam.l, "X": X, "w": beam.w, "delta": delta, "omega32": sys.omega32,
            "gamma_prime": sys.gamma_prime, "gamma": env.gamma, "kappa": env.kappa, "p": env.p}
    meta.update(extra or {})
    return meta


def absorption_map(grid: SpatialGrid, beam: VortexBeam, X: float, sys: SystemParams,
                   env: PlasmonEnvironment, delta: float = 0.0, metadata=None) -> SpatialMap:
    x_eff, phase = _map_inputs(grid, beam, X)
    if delta == 0 and sys.omega32 == 0:
        values = resonant_absorption(x_eff, phase, sys, env)
    else:
        values = np.imag(chi1(delta, x_eff, phase, sys, env))
    return SpatialMap(grid, "im_chi1", np.asarray(values, dtype=float),
                      _metadata(beam, X, sys, env, delta, metadata))


def kerr_map(grid: SpatialGrid, beam: VortexBeam, X: float, sys: SystemParams,
             env: PlasmonEnvironment, delta: float = 0.0, metadata=None) -> SpatialMap:
    x_eff, phase = _map_inputs(grid, beam, X)
    values = np.real(chi3(delta, x_eff, phase, sys, env))
    return SpatialMap(grid, "re_chi3", np.asarray(values, dtype=float),
                      _metadata(beam, X, sys, env, delta, metadata))


def quantity_map(quantity: str, grid, beam, X, sys, env, delta=0.0, metadata=None) -> SpatialMap:
    if quantity == "im_chi1":
        return absorption_map(grid, beam, X, sys, env, delta, metadata)
    if quantity == "re_chi3":
        return kerr_map(grid, beam, X, sys, env, delta, metadata)
    x_eff, phase = _map_inputs(grid, beam, X)
    fn = chi1 if quantity.endswith("chi1") else chi3
    values = _quantity(fn(delta, x_eff, phase, sys, env), quantity)
    return SpatialMap(grid, quantity, np.asarray(values, dtype=float),
                      _metadata(beam, X, sys, env, delta, metadata))


def ring_samples(smap: SpatialMap, radius: float, n_angles: int = 360):
    """Bilinearly interpolated map values on a circle about the vortex core."""
    if n_angles < 64:
        raise ParameterError("need at least 64 angular samples")
    g = smap.grid
    if not 0 < radius <= g.half_extent:
        raise DomainError(f"radius {radius} outside grid half-extent {g.half_extent}")
    theta = np.linspace(0, 2 * np.pi, n_angles, endpoint=False)
    col = (radius * np.cos(theta) + g.half_extent) / g.spacing
    row = (radius * np.sin(theta) + g.half_extent) / g.spacing
    vals = map_coordinates(smap.values, [row, col], order=1, mode="nearest")
    return theta, vals


def count_angular_extrema(smap: SpatialMap, radius: float, n_angles: int = 360, flat_tol: float = 1e-12):
    """Number of strict local (maxima, minima) around the ring, periodic in angle."""
    _, vals = ring_samples(smap, radius, n_angles)
    if np.ptp(vals) <= flat_tol * max(1.0, float(np.max(np.abs(vals)))):
        return 0, 0
    prev, nxt = np.roll(vals, 1), np.roll(vals, -1)
    n_max = int(np.sum((vals > prev) & (vals > nxt)))
    n_min = int(np.sum((vals < prev) & (vals < nxt)))
    return n_max, n_min
