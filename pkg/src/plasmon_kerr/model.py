"""Four-level double-V emitter: domain types and the full master equation.

States are indexed 0..3: |0>, |1> lower levels, |2>, |3> the near-degenerate
upper doublet.  Probe a drives |0>-|2>, probe b drives |0>-|3>.  All rates
and Rabi frequencies are in units of the free-space decay rate Gamma_0.

Density matrices are plain complex ``(4, 4)`` numpy arrays.  Superoperators
act on the column-stacked vector ``vec(rho) = rho.reshape(-1, order="F")``,
so element ``rho[i, j]`` sits at index ``i + 4 * j``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .plasmon_env import PlasmonEnvironment

N_LEVELS = 4
_I4 = np.eye(N_LEVELS, dtype=complex)


def _require_finite(**values):
    for name, v in values.items():
        if not math.isfinite(v):
            raise ParameterError(f"{name} must be finite, got {v!r}")


def _require_nonnegative(**values):
    for name, v in values.items():
        if v < 0:
            raise ParameterError(f"{name} must be >= 0, got {v!r}")


@dataclass(frozen=True)
class SystemParams:
    """Internal constants of the emitter.

    ``omega32`` is the upper-level splitting, ``gamma_prime`` the free-space
    decay of each upper state to |0>, ``gamma_dprime`` the (dipole-forbidden)
    |1> -> |0> decay.  ``gamma_dprime = 0`` makes |1> a trap for any drive.
    """

    omega32: float = 0.0
    gamma_prime: float = 0.3
    gamma_dprime: float = 0.0

    def __post_init__(self):
        _require_finite(omega32=self.omega32, gamma_prime=self.gamma_prime,
                        gamma_dprime=self.gamma_dprime)
        if self.gamma_prime <= 0:
            raise ParameterError(f"gamma_prime must be > 0, got {self.gamma_prime!r}")
        _require_nonnegative(gamma_dprime=self.gamma_dprime)


@dataclass(frozen=True)
class DriveConfig:
    """Probe amplitudes |Omega_a|, |Omega_b|, relative phase phi_b - phi_a, detuning."""

    omega_a: float = 0.0
    omega_b: float = 0.0
    phi: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        _require_finite(omega_a=self.omega_a, omega_b=self.omega_b,
                        phi=self.phi, delta=self.delta)
        _require_nonnegative(omega_a=self.omega_a, omega_b=self.omega_b)

    @property
    def ratio(self) -> float:
        if self.omega_a <= 0:
            raise ParameterError("ratio x = omega_b / omega_a needs omega_a > 0")
        return self.omega_b / self.omega_a

    @classmethod
    def from_ratio(cls, omega_a: float, x: float, phi: float = 0.0, delta: float = 0.0):
        return cls(omega_a=omega_a, omega_b=x * omega_a, phi=phi, delta=delta)


def ket_bra(i: int, j: int) -> np.ndarray:
    m = np.zeros((N_LEVELS, N_LEVELS), dtype=complex)
    m[i, j] = 1.0
    return m


def vec(rho: np.ndarray) -> np.ndarray:
    return np.asarray(rho, dtype=complex).reshape(-1, order="F")


def unvec(v: np.ndarray) -> np.ndarray:
    return np.asarray(v, dtype=complex).reshape(N_LEVELS, N_LEVELS, order="F")


def _check_env(env: PlasmonEnvironment):
    _require_finite(gamma=env.gamma, kappa=env.kappa)
    _require_nonnegative(gamma=env.gamma)


def hamiltonian(sys: SystemParams, drive: DriveConfig, phase_a: float = 0.0) -> np.ndarray:
    """Rotating-frame Hamiltonian (hbar = 1).

    ``phase_a`` is the absolute phase of probe a; only ``drive.phi`` enters any
    observable, the extra argument exists to check that gauge freedom.
    """
    _require_finite(phase_a=phase_a)
    h = np.zeros((N_LEVELS, N_LEVELS), dtype=complex)
    h[2, 2] = -drive.delta - sys.omega32 / 2
    h[3, 3] = -drive.delta + sys.omega32 / 2
    coupling = (0.5 * drive.omega_a * np.exp(1j * phase_a) * ket_bra(0, 2)
                + 0.5 * drive.omega_b * np.exp(1j * (phase_a + drive.phi)) * ket_bra(0, 3))
    return h - coupling - coupling.conj().T


def decay_channels(sys: SystemParams, env: PlasmonEnvironment):
    """Dissipator as ``(jump operators, rate matrix)`` pairs.

    Each pair contributes ``sum_jk G_jk (2 A_j rho A_k^+ - A_k^+ A_j rho - rho A_k^+ A_j)``.
    The upper doublet decays to |1> through the anisotropic plasmonic vacuum,
    whose off-diagonal rate kappa produces the interference cross terms.
    """
    gp = sys.gamma_prime
    channels = [
        ((ket_bra(0, 2), ket_bra(0, 3)), np.array([[gp, 0.0], [0.0, gp]])),
        ((ket_bra(1, 2), ket_bra(1, 3)),
         np.array([[env.gamma, env.kappa], [env.kappa, env.gamma]])),
    ]
    if sys.gamma_dprime > 0:
        channels.append(((ket_bra(0, 1),), np.array([[sys.gamma_dprime]])))
    return channels


def build_liouvillian(sys: SystemParams, env: PlasmonEnvironment, drive: DriveConfig,
                      phase_a: float = 0.0) -> np.ndarray:
    """16x16 generator ``L`` with ``d vec(rho)/dt = L @ vec(rho)``.

    Assembled with Kronecker products from the Hamiltonian commutator and the
    dissipator channels, so no component equation is written out by hand.  This
    is the authoritative form of the dynamics.
    """
    _check_env(env)
    h = hamiltonian(sys, drive, phase_a)
    gen = -1j * (np.kron(_I4, h) - np.kron(h.T, _I4))
    for ops, rates in decay_channels(sys, env):
        for j, a_j in enumerate(ops):
            for k, a_k in enumerate(ops):
                g = rates[j, k]
                if g == 0:
                    continue
                ak_aj = a_k.conj().T @ a_j
                gen += g * (2 * np.kron(a_k.conj(), a_j)
                            - np.kron(_I4, ak_aj) - np.kron(ak_aj.T, _I4))
    return gen


def rhs(sys: SystemParams, env: PlasmonEnvironment, drive: DriveConfig,
        rho: np.ndarray, phase_a: float = 0.0) -> np.ndarray:
    """Time derivative of ``rho`` written directly as operator products."""
    _check_env(env)
    rho = np.asarray(rho, dtype=complex)
    h = hamiltonian(sys, drive, phase_a)
    out = -1j * (h @ rho - rho @ h)
    for ops, rates in decay_channels(sys, env):
        for j, a_j in enumerate(ops):
            for k, a_k in enumerate(ops):
                g = rates[j, k]
                if g == 0:
                    continue
                ak_aj = a_k.conj().T @ a_j
                out += g * (2 * a_j @ rho @ a_k.conj().T - ak_aj @ rho - rho @ ak_aj)
    return out


def density_matrix_defects(rho: np.ndarray) -> dict:
    """Deviation of ``rho`` from a physical state: Hermiticity, trace, positivity."""
    rho = np.asarray(rho, dtype=complex)
    herm = float(np.max(np.abs(rho - rho.conj().T)))
    trace = float(abs(np.trace(rho) - 1.0))
    min_eig = float(np.min(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T))))
    return {"hermiticity": herm, "trace": trace, "min_eigenvalue": min_eig}


def is_density_matrix(rho: np.ndarray, herm_tol=1e-12, trace_tol=1e-10, psd_tol=1e-10) -> bool:
    d = density_matrix_defects(rho)
    return d["hermiticity"] <= herm_tol and d["trace"] <= trace_tol and d["min_eigenvalue"] >= -psd_tol
