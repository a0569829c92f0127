"""Closed-form weak-probe susceptibilities of the double-V emitter.

Everything here is a direct evaluation of the analytic perturbative results:
the S coefficients, first-order coherences, the second-order populations and
upper-state coherence, the A-D coefficients with their helper terms f1-f8,
and the resulting linear and third-order susceptibilities.

Units: ``chi1`` is returned in units of N mu'^2 / (eps0 hbar) and ``chi3`` in
units of 2 N mu'^4 / (3 eps0 hbar^3), the units used for every plotted
spectrum.  In these units the line-centre free-space absorption is
``1 / (gamma + gamma')``, which equals ``2 * rho20^(1) / Omega_a``; the cubic
coefficient follows the ``rho20^(3) / Omega_a^3`` convention.  The total
response for probe strength Omega_a is ``chi1 + chi3 * Omega_a**2``
(see :meth:`SusceptibilityPoint.total`).

All functions broadcast over numpy arrays of ``delta``, ``x`` and ``phi``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import bisect

from .errors import DomainError, SingularityError
from .model import DriveConfig, SystemParams
from .plasmon_env import PlasmonEnvironment

_SINGULAR_RTOL = 1e-13


def _scalar(a):
    a = np.asarray(a)
    return a[()] if a.ndim == 0 else a


def _factors(delta, sys: SystemParams, env: PlasmonEnvironment):
    """(u, v, den) with u = -i delta + i w32/2 + G, v = -i delta - i w32/2 + G."""
    delta = np.asarray(delta, dtype=float)
    big_gamma = env.gamma + sys.gamma_prime
    u = -1j * delta + 0.5j * sys.omega32 + big_gamma
    v = -1j * delta - 0.5j * sys.omega32 + big_gamma
    den = u * v - env.kappa ** 2
    scale = np.abs(u * v) + env.kappa ** 2
    bad = np.abs(den) <= _SINGULAR_RTOL * scale
    if np.any(bad):
        where = np.broadcast_to(delta, bad.shape)[bad]
        first = float(where.flat[0])
        raise SingularityError(f"susceptibility denominator vanishes at delta={first}", delta=first)
    return u, v, den


@dataclass(frozen=True)
class SCoefficients:
    s1: complex
    s2: complex
    s3: complex


@dataclass(frozen=True)
class SecondOrderBlock:
    """Second-order populations and coherences (rho00 is identically zero)."""

    rho11: float
    rho22: float
    rho33: float
    rho23: complex
    t: complex
    r: complex
    s: complex

    rho00 = 0.0


@dataclass(frozen=True)
class SusceptibilityPoint:
    chi1: complex
    chi3: complex
    residual: float | None = None

    unit_chi1 = "N mu'^2 / (eps0 hbar)"
    unit_chi3 = "2 N mu'^4 / (3 eps0 hbar^3)"

    def total(self, omega_a):
        """Probe susceptibility to third order, in the units of ``chi1``."""
        return self.chi1 + self.chi3 * np.asarray(omega_a) ** 2


def s_coefficients(delta, sys: SystemParams, env: PlasmonEnvironment) -> SCoefficients:
    u, v, den = _factors(delta, sys, env)
    return SCoefficients(s1=_scalar(u / den), s2=_scalar(1.0 / den), s3=_scalar(v / den))


def first_order_coherences(drive: DriveConfig, sys: SystemParams, env: PlasmonEnvironment):
    """(rho20, rho30) to first order in the probe amplitudes."""
    s = s_coefficients(drive.delta, sys, env)
    ea = 0.5 * drive.omega_a
    eb = 0.5 * drive.omega_b * np.exp(-1j * drive.phi)
    rho20 = 1j * ea * s.s1 - 1j * env.kappa * eb * s.s2
    rho30 = 1j * eb * s.s3 - 1j * env.kappa * ea * s.s2
    return rho20, rho30


def second_order_block(drive: DriveConfig, sys: SystemParams, env: PlasmonEnvironment) -> SecondOrderBlock:
    """Second-order steady-state block built from the first-order coherences.

    The populations use the closure rho00^(2) = 0.  The common factor kappa
    of numerator and denominator in rho22 / rho33 is cancelled, so the
    free-space limit kappa = 0 is admissible.
    """
    gp = sys.gamma_prime
    if gp <= 0:
        raise DomainError("second-order block divides by gamma_prime; it must be > 0")
    g, k = env.gamma, env.kappa
    big_gamma = g + gp
    s = s_coefficients(drive.delta, sys, env)
    ea = 0.5 * drive.omega_a
    eb = 0.5 * drive.omega_b
    ph = np.exp(1j * drive.phi)

    rho20 = 1j * ea * s.s1 - 1j * k * eb / ph * s.s2
    rho30 = 1j * eb / ph * s.s3 - 1j * k * ea * s.s2
    rho02, rho03 = np.conj(rho20), np.conj(rho30)

    t = 1j * ea * rho03 - 1j * eb * ph * rho20
    r = 1j * ea * (rho02 - rho20)
    s_ = 1j * eb * (rho03 / ph - rho30 * ph)

    rho11 = -(r + s_) / (2 * gp)
    rho22 = (2 * gp * r + g * (r + s_)) / (4 * gp * big_gamma)
    rho33 = (2 * gp * s_ + g * (r + s_)) / (4 * gp * big_gamma)
    rho23 = (k * (r + s_) - 2 * gp * t) / (2 * gp * (1j * sys.omega32 - 2 * big_gamma))
    return SecondOrderBlock(rho11=_scalar(np.real(rho11)), rho22=_scalar(np.real(rho22)),
                            rho33=_scalar(np.real(rho33)), rho23=_scalar(rho23),
                            t=_scalar(t), r=_scalar(r), s=_scalar(s_))


def third_order_coherence(drive: DriveConfig, sys: SystemParams, env: PlasmonEnvironment):
    """(rho20, rho30) at third order, driven by :func:`second_order_block`.

    Solves the 2x2 stationary system for the optical coherences directly with
    the second-order sources, rather than going through the A-D coefficients.
    """
    blk = second_order_block(drive, sys, env)
    u, v, den = _factors(drive.delta, sys, env)
    ea = 0.5 * drive.omega_a
    eb = 0.5 * drive.omega_b * np.exp(-1j * drive.phi)
    src20 = 1j * ea * (blk.rho00 - blk.rho22) - 1j * eb * blk.rho23
    src30 = 1j * eb * (blk.rho00 - blk.rho33) - 1j * ea * np.conj(blk.rho23)
    k = env.kappa
    rho20 = (u * src20 - k * src30) / den
    rho30 = (v * src30 - k * src20) / den
    return _scalar(rho20), _scalar(rho30)


# Helper terms of the cubic coefficients, one function each.
# Arguments: ratio x, phase factor e = exp(-i phi), S coefficients, kappa.

def f1(x, e, s, k):
    return -x ** 3 * e * (s.s3 + np.conj(s.s3)) + x ** 2 * k * e ** 2 * np.conj(s.s2) + k * x ** 2 * s.s2


def f2(x, e, s, k):
    s1c, s2c, s3c = np.conj(s.s1), np.conj(s.s2), np.conj(s.s3)
    return (-x * e * (s.s1 + s1c) + k * x ** 2 * (s.s2 + s2c)
            - x ** 3 * e * (s.s3 + s3c) - k * x ** 2 * e ** 2 * (s.s2 - s2c))


def f3(x, e, s, k):
    s1c, s2c, s3c = np.conj(s.s1), np.conj(s.s2), np.conj(s.s3)
    return (-(s.s1 + s1c) + k * x * e * s.s2 + x * k / e * s2c - x ** 2 * s.s3
            + x * k * s.s2 / e - x ** 2 / e * s3c + k * x * s2c * e)


def f4(x, e, s, k):
    return x * e * (s.s3 + np.conj(s.s1)) - k * s.s2 - x ** 2 * k * np.conj(s.s2)


def f5(x, e, s, k):
    return (s.s1 + np.conj(s.s1)) - x * k * np.conj(s.s2) - k * x * s.s2 * e


def f6(x, e, s, k):
    s2c = np.conj(s.s2)
    return ((s.s1 + np.conj(s.s1)) - k * x * (s2c / e + s.s2 * e + s2c * e + s.s2 / e)
            + x ** 2 * (s.s3 + np.conj(s.s3)))


def f7(x, e, s, k):
    s2c = np.conj(s.s2)
    return (x * e * (s.s1 + np.conj(s.s1)) - k * x ** 2 * (s.s2 + s2c)
            - k * x ** 2 * e ** 2 * (s.s2 + s2c) + x ** 3 * (e * s.s3 + np.conj(s.s3)))


def f8(x, e, s, k):
    return -x ** 2 * np.conj(s.s3) + x * k * e * np.conj(s.s2) - x ** 2 * s.s1 + k * x ** 3 * s.s2 * e


def abcd_coefficients(x, phi, sys: SystemParams, env: PlasmonEnvironment, delta=0.0):
    """(A, B, C, D): numerator coefficients of the linear and cubic susceptibilities."""
    gp = sys.gamma_prime
    if gp <= 0:
        raise DomainError("cubic coefficients divide by gamma_prime; it must be > 0")
    g, k = env.gamma, env.kappa
    big_gamma = g + gp
    s = s_coefficients(delta, sys, env)
    x = np.asarray(x, dtype=float)
    e = np.exp(-1j * np.asarray(phi, dtype=float))
    pop = 4 * gp * big_gamma
    c = (-(2 * gp * f1(x, e, s, k) + g * f2(x, e, s, k)) / pop
         - (k * f3(x, e, s, k) + 2 * gp * f4(x, e, s, k))
         / (2 * gp * (-1j * sys.omega32 - 2 * big_gamma))) / 8
    d = (-(2 * gp * f5(x, e, s, k) + g * f6(x, e, s, k)) / pop
         - (k * f7(x, e, s, k) + 2 * gp * f8(x, e, s, k))
         / (2 * gp * (1j * sys.omega32 - 2 * big_gamma))) / 8
    a = x * e
    b = np.ones_like(a)
    return _scalar(a), _scalar(b), _scalar(c), _scalar(d)


def _assemble(coef_k, coef_d, delta, sys, env):
    _, _, den = _factors(delta, sys, env)
    big_gamma = env.gamma + sys.gamma_prime
    delta = np.asarray(delta, dtype=float)
    return _scalar((-1j * env.kappa * coef_k + coef_d * (delta - sys.omega32 / 2 + 1j * big_gamma)) / den)


def chi1(delta, x, phi, sys: SystemParams, env: PlasmonEnvironment):
    """Linear susceptibility of probe a in the presence of probe b (ratio x, phase phi)."""
    _factors(delta, sys, env)
    a = np.asarray(x, dtype=float) * np.exp(-1j * np.asarray(phi, dtype=float))
    return _assemble(a, 1.0, delta, sys, env)


def chi3(delta, x, phi, sys: SystemParams, env: PlasmonEnvironment):
    """Third-order susceptibility of probe a assembled from C and D."""
    _, _, c, d = abcd_coefficients(x, phi, sys, env, delta)
    return _assemble(c, d, delta, sys, env)


def susceptibility_point(delta, x, phi, sys: SystemParams, env: PlasmonEnvironment) -> SusceptibilityPoint:
    return SusceptibilityPoint(chi1=chi1(delta, x, phi, sys, env), chi3=chi3(delta, x, phi, sys, env))


def resonant_closed_forms(x, phi, sys: SystemParams, env: PlasmonEnvironment):
    """(Im chi1, Re chi1, Im chi3, Re chi3) at delta = 0 for degenerate upper levels."""
    if sys.omega32 != 0:
        raise DomainError("resonant closed forms require omega32 = 0")
    gp, g, k = sys.gamma_prime, env.gamma, env.kappa
    G = g + gp
    x = np.asarray(x, dtype=float)
    phi = np.asarray(phi, dtype=float)
    lin_den = G ** 2 - k ** 2
    if abs(lin_den) <= _SINGULAR_RTOL * (G ** 2 + k ** 2):
        raise SingularityError("resonant denominator (gamma+gamma')^2 - kappa^2 vanishes", delta=0.0)
    m1 = (4 * gp * x ** 3 * k * G - 6 * x * k * g * G + 2 * g * x ** 3 * k * G - 4 * k ** 3 * x
          - k ** 2 * x ** 2 * G - 7 * gp * k * x * G
          - 4 * k * x * g * G - 2 * x * k * G ** 2 - k * x ** 3 * G ** 2 - gp * k * x ** 3 * G)
    m2 = 2 * k ** 2 * x ** 2 * gp + 2 * k ** 2 * x ** 2 * G
    m3 = (2 * k ** 2 * G * (1 + 2 * x ** 2) + 2 * gp * k ** 2 * (1 - x ** 2) - 2 * gp * k * x * G
          - k * x ** 3 * G ** 2 + 4 * gp * G ** 3 * (x ** 2 - 1))
    m4 = (3 * k * gp * x ** 3 * G + 2 * g * x ** 3 * k * G - k ** 2 * x ** 2 * G
          - 5 * gp * x * k * G - 2 * x * k * G ** 2 - k * x ** 3 * G)
    cub_den = 32 * gp * G * lin_den ** 2
    im1 = (G - k * x * np.cos(phi)) / lin_den
    re1 = -k * x * np.sin(phi) / lin_den
    im3 = (-m1 * np.cos(phi) - m2 * np.cos(2 * phi) - m3) / cub_den
    re3 = (-m4 * np.sin(phi) - m2 * np.sin(2 * phi)) / cub_den
    return _scalar(im1), _scalar(re1), _scalar(im3), _scalar(re3)


def gain_threshold(sys: SystemParams, env: PlasmonEnvironment, phi: float):
    """Ratio x* above which the line centre shows gain; ``None`` if gain is impossible.

    x* = (2 gamma' + G_perp + G_par) / ((G_perp - G_par) cos phi).
    """
    lever = (env.gamma_perp - env.gamma_par) * np.cos(phi)
    if lever <= 1e-12 * max(env.gamma, 1.0):
        return None
    return float((2 * sys.gamma_prime + env.gamma_perp + env.gamma_par) / lever)


def locate_gain_onset(sys: SystemParams, env: PlasmonEnvironment, phi: float,
                      x_lo: float, x_hi: float, xtol: float = 1e-12) -> float:
    """Bisect Im chi1(delta=0) in x; needs a sign change on [x_lo, x_hi]."""
    def f(x):
        return float(np.imag(chi1(0.0, x, phi, sys, env)))

    if f(x_lo) * f(x_hi) > 0:
        raise DomainError(f"Im chi1 does not change sign on [{x_lo}, {x_hi}]")
    return float(bisect(f, x_lo, x_hi, xtol=xtol, maxiter=200))
