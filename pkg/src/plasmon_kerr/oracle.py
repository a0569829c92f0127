"""Nonperturbative reference path: exact steady states and ladder fits.

The steady state is the normalized null vector of the full 16x16 generator,
found by a dense linear solve.  Susceptibilities are extracted by fitting the
probe coherence rho20 against a ladder of weak probe amplitudes at fixed
ratio x and phase phi.  An adaptive integrator provides an independent
cross-check of the linear solve.

With ``gamma_dprime = 0`` nothing returns population from |1>, so any probe
drive eventually pumps the emitter into |1><1| and rho20 vanishes.  The ladder
fit therefore needs ``gamma_dprime > 0``; it raises :class:`DarkStateError`
otherwise.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DarkStateError, FitError, IntegrationError, NonUniqueSteadyStateError, ParameterError
from .model import DriveConfig, SystemParams, build_liouvillian, rhs, unvec, vec
from .plasmon_env import PlasmonEnvironment
from .susceptibility import SusceptibilityPoint

STEADY_RESIDUAL_TOL = 1e-10
AGREEMENT_TOL = 1e-8
FIT_COND_MAX = 1e8
NULL_RTOL = 1e-11

# Index of rho_ij in the column-stacked vector.
_IDX = {(i, j): i + 4 * j for i in range(4) for j in range(4)}
_TRACE_IDX = [_IDX[i, i] for i in range(4)]


@dataclass(frozen=True)
class AmplitudeLadder:
    amplitudes: tuple = (1e-3, 2e-3, 3e-3, 4e-3, 5e-3)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=float)
        if amps.ndim != 1 or len(amps) < 2:
            raise ParameterError("amplitude ladder needs at least two rungs")
        if not np.all(np.isfinite(amps)) or np.any(amps <= 0):
            raise ParameterError("ladder amplitudes must be finite and > 0")
        if np.any(np.diff(amps) <= 0):
            raise ParameterError("ladder amplitudes must be strictly increasing")

    def scaled(self, factor: float) -> "AmplitudeLadder":
        return AmplitudeLadder(tuple(float(a) * factor for a in self.amplitudes))


DEFAULT_LADDER = AmplitudeLadder()


def _bordered(gen: np.ndarray) -> np.ndarray:
    # Population rows sum to zero, so the rho00 row is redundant; swap in Tr rho = 1.
    a = np.array(gen, dtype=complex)
    a[_IDX[0, 0], :] = 0.0
    a[_IDX[0, 0], _TRACE_IDX] = 1.0
    return a


def null_dimension(gen: np.ndarray, rtol: float = NULL_RTOL) -> int:
    sv = np.linalg.svd(gen, compute_uv=False)
    return int(np.sum(sv <= rtol * sv[0]))


def steady_state(gen: np.ndarray, residual_tol: float = STEADY_RESIDUAL_TOL) -> np.ndarray:
    """Unit-trace density matrix annihilated by ``gen``."""
    gen = np.asarray(gen, dtype=complex)
    dim = null_dimension(gen)
    if dim > 1:
        raise NonUniqueSteadyStateError(f"generator has {dim} stationary directions")
    a = _bordered(gen)
    b = np.zeros(16, dtype=complex)
    b[_IDX[0, 0]] = 1.0
    x = np.linalg.solve(a, b)
    x += np.linalg.solve(a, b - a @ x)
    res = float(np.linalg.norm(gen @ x))
    if res > residual_tol:
        raise NonUniqueSteadyStateError(f"steady-state residual {res:.3e} exceeds {residual_tol:.1e}")
    return unvec(x)


def steady_state_for(sys: SystemParams, env: PlasmonEnvironment, drive: DriveConfig) -> np.ndarray:
    return steady_state(build_liouvillian(sys, env, drive))


def fit_odd_cubic(amplitudes, values, cond_max: float = FIT_COND_MAX):
    """Least-squares ``values ~ c1 * a + c3 * a**3``; returns (c1, c3, residual norm)."""
    amps = np.asarray(amplitudes, dtype=float)
    y = np.asarray(values, dtype=complex)
    scale = amps.max()
    u = amps / scale
    design = np.column_stack([u, u ** 3])
    cond = np.linalg.cond(design)
    if not np.isfinite(cond) or cond > cond_max:
        raise FitError(f"ladder fit condition number {cond:.3e} exceeds {cond_max:.1e}; "
                       "use more distinct, smaller amplitudes")
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = float(np.linalg.norm(y - design @ coef))
    return coef[0] / scale, coef[1] / scale ** 3, resid


def coherence_ladder(sys, env, x, phi, delta, ladder: AmplitudeLadder = DEFAULT_LADDER):
    """rho20 of the exact steady state at every rung."""
    out = []
    for amp in ladder.amplitudes:
        drive = DriveConfig.from_ratio(amp, x, phi=phi, delta=delta)
        out.append(steady_state_for(sys, env, drive)[2, 0])
    return np.array(out)


def extract_susceptibilities(sys: SystemParams, env: PlasmonEnvironment, x: float, phi: float,
                             delta: float, ladder: AmplitudeLadder = DEFAULT_LADDER,
                             cond_max: float = FIT_COND_MAX) -> SusceptibilityPoint:
    """Fit rho20(Omega_a) over the ladder and convert to susceptibility units.

    chi1 = 2 * c1 (line-centre free-space value 1/(gamma+gamma')), chi3 = c3.
    """
    if sys.gamma_dprime <= 0:
        raise DarkStateError("gamma_dprime = 0: every driven steady state is |1><1| and rho20 = 0; "
                             "the ladder fit needs gamma_dprime > 0")
    values = coherence_ladder(sys, env, x, phi, delta, ladder)
    c1, c3, resid = fit_odd_cubic(ladder.amplitudes, values, cond_max)
    return SusceptibilityPoint(chi1=complex(2 * c1), chi3=complex(c3), residual=resid)


def perturbative_orders(sys: SystemParams, env: PlasmonEnvironment, x: float, phi: float,
                        delta: float, order: int = 3):
    """Exact Taylor coefficients rho^(n) of the steady state in powers of Omega_a.

    Solves L0 rho^(n) = -V rho^(n-1) with Tr rho^(n) = 0, where the generator
    at drive strength Omega_a is L0 + Omega_a V.  Needs a unique drive-free
    steady state, i.e. ``gamma_dprime > 0``.
    """
    gen0 = build_liouvillian(sys, env, DriveConfig(0.0, 0.0, phi, delta))
    pert = build_liouvillian(sys, env, DriveConfig.from_ratio(1.0, x, phi, delta)) - gen0
    if null_dimension(gen0) > 1:
        raise DarkStateError("drive-free generator has a degenerate null space (gamma_dprime = 0)")
    a = _bordered(gen0)
    rho = [vec(steady_state(gen0))]
    for _ in range(order):
        b = -pert @ rho[-1]
        b[_IDX[0, 0]] = 0.0
        rho.append(np.linalg.solve(a, b))
    return [unvec(r) for r in rho]


def trajectory(sys: SystemParams, env: PlasmonEnvironment, drive: DriveConfig, rho0,
               t_final: float, dt_max: float = np.inf, t_eval=None,
               rtol: float = 1e-11, atol: float = 1e-13):
    """Adaptive explicit (DOP853) integration of the master equation."""
    if t_final <= 0:
        raise ParameterError("t_final must be > 0")

    def f(_t, y):
        return vec(rhs(sys, env, drive, unvec(y)))

    sol = solve_ivp(f, (0.0, float(t_final)), vec(rho0), method="DOP853", t_eval=t_eval,
                    max_step=dt_max, rtol=rtol, atol=atol)
    if sol.status != 0:
        raise IntegrationError(f"time integration failed: {sol.message}")
    states = np.array([unvec(sol.y[:, i]) for i in range(sol.y.shape[1])])
    return sol.t, states


def time_evolve(sys: SystemParams, env: PlasmonEnvironment, drive: DriveConfig, rho0,
                t_final: float, dt_max: float = np.inf) -> np.ndarray:
    _, states = trajectory(sys, env, drive, rho0, t_final, dt_max, t_eval=[float(t_final)])
    return states[-1]
