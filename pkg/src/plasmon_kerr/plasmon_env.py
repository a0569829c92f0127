"""Decay rates near the nanostructure: modified rates, interference, rate tables.

Gamma_perp / Gamma_par are the spontaneous-emission rates of dipoles normal
and parallel to the surface, in units of Gamma_0.  Distances are in units of
c / omega_p.  The rates themselves come from external electromagnetic
calculations and enter only as tabulated data.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DomainError, ParameterError

CSV_HEADER = ("d", "gamma_perp", "gamma_par")

# Synthetic fixture: Gamma_perp = PERP_FLOOR + (1 - PERP_FLOOR) * exp(-PERP_DECAY * (d - PERP_CROSSING))
# crosses Gamma_0 at d = PERP_CROSSING; Gamma_par = PAR_FLOOR + PAR_AMPLITUDE * exp(-PAR_DECAY * d).
PERP_FLOOR = 0.7
PERP_DECAY = 6.0
PERP_CROSSING = 0.62
PAR_FLOOR = 0.02
PAR_AMPLITUDE = 0.15
PAR_DECAY = 3.0


@dataclass(frozen=True)
class PlasmonEnvironment:
    """Modified decay ``gamma``, interference coupling ``kappa`` and degree ``p``."""

    gamma: float
    kappa: float
    p: float

    def __post_init__(self):
        for name in ("gamma", "kappa", "p"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"{name} must be finite")
        if self.gamma < 0:
            raise ParameterError(f"gamma must be >= 0, got {self.gamma!r}")
        if abs(self.kappa) > self.gamma * (1 + 1e-12):
            raise ParameterError(f"|kappa| must not exceed gamma (kappa={self.kappa}, gamma={self.gamma})")
        if not -1.0 <= self.p <= 1.0:
            raise ParameterError(f"p must lie in [-1, 1], got {self.p!r}")

    @classmethod
    def explicit(cls, gamma: float, kappa: float) -> "PlasmonEnvironment":
        if gamma <= 0:
            if kappa != 0:
                raise ParameterError("kappa must vanish when gamma = 0")
            return cls(gamma=float(gamma), kappa=0.0, p=0.0)
        return cls(gamma=float(gamma), kappa=float(kappa), p=float(kappa) / float(gamma))

    @property
    def gamma_perp(self) -> float:
        return self.gamma + self.kappa

    @property
    def gamma_par(self) -> float:
        return self.gamma - self.kappa


def from_rates(gamma_perp: float, gamma_par: float) -> PlasmonEnvironment:
    """gamma = (G_perp + G_par)/2, kappa = (G_perp - G_par)/2, p = kappa/gamma."""
    if not (math.isfinite(gamma_perp) and math.isfinite(gamma_par)):
        raise ParameterError("decay rates must be finite")
    if gamma_perp < 0 or gamma_par < 0:
        raise ParameterError(f"decay rates must be >= 0, got ({gamma_perp}, {gamma_par})")
    total = gamma_perp + gamma_par
    if total == 0:
        raise DomainError("interference degree p is undefined when both rates vanish")
    return PlasmonEnvironment(gamma=0.5 * total, kappa=0.5 * (gamma_perp - gamma_par),
                              p=(gamma_perp - gamma_par) / total)


def free_space() -> PlasmonEnvironment:
    return PlasmonEnvironment(gamma=1.0, kappa=0.0, p=0.0)


def drude_permittivity(omega, tau_inv=0.05):
    """Drude metal permittivity with omega and 1/tau in units of omega_p."""
    omega = np.asarray(omega, dtype=float)
    if np.any(omega <= 0):
        raise DomainError("omega must be > 0")
    eps = 1.0 - 1.0 / (omega * (omega + 1j * tau_inv))
    return eps[()] if eps.ndim == 0 else eps


@dataclass(frozen=True)
class DecayRateTable:
    """Gamma_perp and Gamma_par tabulated against emitter-surface distance."""

    d: tuple
    gamma_perp: tuple
    gamma_par: tuple
    frequency_note: str = field(default="")

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        gp = np.asarray(self.gamma_perp, dtype=float)
        gl = np.asarray(self.gamma_par, dtype=float)
        if not (d.ndim == gp.ndim == gl.ndim == 1 and len(d) == len(gp) == len(gl)):
            raise ParameterError("rate table columns must be 1-D and of equal length")
        if len(d) < 2:
            raise ParameterError("rate table needs at least 2 rows")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(gp)) and np.all(np.isfinite(gl))):
            raise ParameterError("rate table entries must be finite")
        if np.any(np.diff(d) <= 0):
            raise ParameterError("distances must be strictly increasing")
        if np.any(gp < 0) or np.any(gl < 0):
            raise ParameterError("rates must be >= 0")

    @classmethod
    def from_rows(cls, rows, frequency_note: str = "") -> "DecayRateTable":
        rows = list(rows)
        return cls(d=tuple(float(r[0]) for r in rows),
                   gamma_perp=tuple(float(r[1]) for r in rows),
                   gamma_par=tuple(float(r[2]) for r in rows),
                   frequency_note=frequency_note)

    @property
    def rows(self):
        return list(zip(self.d, self.gamma_perp, self.gamma_par))

    @property
    def d_range(self):
        return self.d[0], self.d[-1]


def at_distance(table: DecayRateTable, d: float):
    """Piecewise-linear (Gamma_perp, Gamma_par) at distance ``d``; no extrapolation."""
    lo, hi = table.d_range
    if not lo <= d <= hi:
        raise DomainError(f"distance {d} outside table range [{lo}, {hi}]")
    return (float(np.interp(d, table.d, table.gamma_perp)),
            float(np.interp(d, table.d, table.gamma_par)))


def environment_at(table: DecayRateTable, d: float) -> PlasmonEnvironment:
    return from_rates(*at_distance(table, d))


def fixture_rates(d):
    """Closed form behind :func:`synthetic_fixture`."""
    d = np.asarray(d, dtype=float)
    perp = PERP_FLOOR + (1.0 - PERP_FLOOR) * np.exp(-PERP_DECAY * (d - PERP_CROSSING))
    par = PAR_FLOOR + PAR_AMPLITUDE * np.exp(-PAR_DECAY * d)
    return perp, par


def synthetic_fixture(n_rows: int = 19, d_min: float = 0.1, d_max: float = 1.0) -> DecayRateTable:
    """Deterministic stand-in for tabulated rate data.

    Gamma_perp decreases monotonically and crosses Gamma_0 at d = 0.62;
    Gamma_par stays well below Gamma_0 and below Gamma_perp.
    """
    if n_rows < 2:
        raise ParameterError("n_rows must be >= 2")
    if not (math.isfinite(d_min) and math.isfinite(d_max)) or d_min >= d_max or d_min < 0:
        raise ParameterError(f"invalid distance range [{d_min}, {d_max}]")
    d = np.linspace(d_min, d_max, n_rows)
    perp, par = fixture_rates(d)
    return DecayRateTable(d=tuple(d.tolist()), gamma_perp=tuple(perp.tolist()),
                          gamma_par=tuple(par.tolist()),
                          frequency_note="synthetic fixture (not measured data)")


def parse_rate_table(text: str, frequency_note: str = "") -> DecayRateTable:
    lines = [ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")]
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise ParameterError("rate table is empty") from None
    if tuple(h.strip() for h in header) != CSV_HEADER:
        raise ParameterError(f"rate table header must be {','.join(CSV_HEADER)}, got {','.join(header)}")
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != 3:
            raise ParameterError(f"rate table row {lineno}: expected 3 columns, got {len(row)}")
        try:
            rows.append(tuple(float(v) for v in row))
        except ValueError as exc:
            raise ParameterError(f"rate table row {lineno}: {exc}") from None
    return DecayRateTable.from_rows(rows, frequency_note=frequency_note)


def read_rate_table(path) -> DecayRateTable:
    text = Path(path).read_text(encoding="utf-8")
    notes = [ln.lstrip()[1:].strip() for ln in text.splitlines() if ln.lstrip().startswith("#")]
    return parse_rate_table(text, frequency_note="; ".join(notes))


def format_rate_table(table: DecayRateTable) -> str:
    buf = io.StringIO()
    if table.frequency_note:
        buf.write(f"# {table.frequency_note}\n")
    buf.write(",".join(CSV_HEADER) + "\n")
    for row in table.rows:
        buf.write(",".join(format(v, ".17g") for v in row) + "\n")
    return buf.getvalue()


def write_rate_table(table: DecayRateTable, path) -> None:
    Path(path).write_text(format_rate_table(table), encoding="utf-8")
