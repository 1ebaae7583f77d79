"""Phonon-free dynamics of the driven two-level system.

State conventions: basis (|g>, |e>), pseudo-spin
s = (Re rho_ge, Im rho_ge, (rho_ee - rho_gg)/2), so n = rho_ee = 1/2 + s_z
and the closed equation of motion is ds/dt = Omega x s with precession
axis Omega(t) = (Re f, Im f, 0) in rad/ps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.integrate import cumulative_simpson

from .errors import ConfigError, NumericalError
from .pulsegen import DichromaticPulse, PulseShape, gaussian_sigma_t
from .units import HBAR


@dataclass(frozen=True)
class BlochState:
    """Pseudo-spin 3-vector; |s| <= 1/2 (surface = pure states)."""

    s: np.ndarray

    def __post_init__(self) -> None:
        s = np.asarray(self.s, dtype=float)
        if s.shape != (3,):
            raise ConfigError("Bloch vector must have 3 components")
        if np.linalg.norm(s) > 0.5 + 1e-9:
            raise ConfigError("Bloch vector length exceeds 1/2")
        object.__setattr__(self, "s", s)

    @classmethod
    def ground(cls) -> "BlochState":
        return cls(np.array([0.0, 0.0, -0.5]))

    @classmethod
    def from_rho(cls, rho: np.ndarray) -> "BlochState":
        rho = np.asarray(rho, dtype=complex)
        if rho.shape != (2, 2):
            raise ConfigError("density matrix must be 2x2")
        if abs(np.trace(rho) - 1.0) > 1e-9:
            raise ConfigError("density matrix trace must be 1")
        return cls(np.array([rho[0, 1].real, rho[0, 1].imag,
                             (rho[1, 1].real - rho[0, 0].real) / 2.0]))

    @property
    def rho(self) -> np.ndarray:
        sx, sy, sz = self.s
        return np.array([[0.5 - sz, sx + 1j * sy],
                         [sx - 1j * sy, 0.5 + sz]])

    @property
    def occupation(self) -> float:
        return 0.5 + float(self.s[2])


@dataclass
class BlochTrajectory:
    """Time series of Bloch vectors on a fixed grid."""

    t: np.ndarray
    s: np.ndarray  # shape (len(t), 3)

    def __post_init__(self) -> None:
        if self.s.shape != (len(self.t), 3):
            raise ConfigError("trajectory shape mismatch")

    @property
    def occupation(self) -> np.ndarray:
        return 0.5 + self.s[:, 2]

    @property
    def states(self) -> list[BlochState]:
        return [BlochState(row) for row in self.s]

    def final_state(self) -> BlochState:
        return BlochState(self.s[-1])


@dataclass(frozen=True)
class DissipationParams:
    """Radiative lifetime T1 (ps; None disables decay) and pure
    dephasing rate gamma_star (1/ps)."""

    t1: float | None = None
    gamma_star: float = 0.0

    def __post_init__(self) -> None:
        if self.t1 is not None and self.t1 <= 0:
            raise ConfigError("t1 must be > 0 or None")
        if self.gamma_star < 0:
            raise ConfigError("gamma_star must be >= 0")


class FinalOccupation(NamedTuple):
    value: float
    stationary: bool


def default_time_grid(pulse: DichromaticPulse, dt: float | None = None,
                      padding: float = 0.0) -> np.ndarray:
    """Uniform grid covering the pulse support.

    Default step resolves the carrier e^{+-i Delta t/hbar} with >= 50
    points per period: dt = min(0.02, 2 pi hbar / (50 Delta)).
    """
    spec = pulse.spec
    if dt is None:
        dt = 0.02
        if spec.delta > 0:
            dt = min(dt, 2.0 * math.pi * HBAR / (50.0 * spec.delta))
    if spec.shape is PulseShape.RECT_SPECTRUM:
        half = spec.window + padding
    else:
        wmax = max(spec.w_red, spec.w_blue)
        wmin = min(w for w in (spec.w_red, spec.w_blue) if w > 0)
        half = 8.0 * gaussian_sigma_t(wmin if wmin > 0 else wmax) + padding
    n = int(math.ceil(2.0 * half / dt))
    return spec.t0 + np.linspace(-half, half, n + 1)


def _omega_series(pulse: DichromaticPulse, t_half: np.ndarray) -> np.ndarray:
    f = pulse.f(t_half)
    omega = np.zeros((len(t_half), 3))
    omega[:, 0] = f.real
    omega[:, 1] = f.imag
    return omega


def evolve_closed(pulse: DichromaticPulse, t_grid,
                  initial: BlochState | None = None) -> BlochTrajectory:
    """Fixed-step RK4 integration of ds/dt = Omega(t) x s.

    Raises NumericalError when the norm drift exceeds 1e-6 (step too
    large for the drive); pure initial states should stay on the sphere
    to ~1e-8.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or len(t) < 2:
        raise ConfigError("t_grid must contain at least two points")
    steps = np.diff(t)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
        raise ConfigError("t_grid must be uniform")
    h = steps[0]
    if initial is None:
        initial = BlochState.ground()

    # Omega at t_k, t_k + h/2, t_k + h for the RK4 stages
    t_half = t[0] + (h / 2.0) * np.arange(2 * (len(t) - 1) + 1)
    omega = _omega_series(pulse, t_half)

    s = initial.s.copy()
    out = np.empty((len(t), 3))
    out[0] = s
    norm0 = np.linalg.norm(s)
    for k in range(len(t) - 1):
        w1 = omega[2 * k]
        w2 = omega[2 * k + 1]
        w3 = omega[2 * k + 2]
        k1 = np.cross(w1, s)
        k2 = np.cross(w2, s + 0.5 * h * k1)
        k3 = np.cross(w2, s + 0.5 * h * k2)
        k4 = np.cross(w3, s + h * k3)
        s = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = s
    drift = abs(np.linalg.norm(s) - norm0)
    if drift > 1e-6:
        raise NumericalError(
            f"Bloch norm drift {drift:.2e} exceeds 1e-6; reduce the time step")
    return BlochTrajectory(t=t, s=out)


def _require_symmetric(pulse: DichromaticPulse) -> None:
    if not pulse.symmetric:
        raise ConfigError("operation requires a symmetric pulse (w_red = w_blue)")
    if pulse.spec.carrier_detuning != 0.0:
        raise ConfigError("operation requires carrier_detuning = 0")


def accumulated_phase(pulse: DichromaticPulse, t) -> np.ndarray:
    """Phase integral Phi(t) = int_start^t 2 eps(t') cos(Delta (t'-t0)/hbar) dt'
    for a symmetric pulse, by composite Simpson on a fine grid."""
    _require_symmetric(pulse)
    spec = pulse.spec
    t = np.atleast_1d(np.asarray(t, dtype=float))
    dtq = min(0.005, 2.0 * math.pi * HBAR / (200.0 * max(spec.delta, 1e-3)))
    support = default_time_grid(pulse)
    t_hi = max(support[-1], t.max())
    grid = np.arange(support[0], t_hi + dtq, dtq)
    b = spec.delta / HBAR
    integrand = 2.0 * pulse.envelope_red(grid) * np.cos(b * (grid - spec.t0))
    phi = np.concatenate(([0.0], cumulative_simpson(integrand, x=grid)))
    return np.interp(t, grid, phi)


def analytic_occupation(pulse: DichromaticPulse, t) -> np.ndarray | float:
    """Closed-system occupation for a symmetric pulse,
    n(t) = (1 - cos Phi(t))/2. Exact because the drive is real, so the
    Hamiltonian commutes with itself at different times."""
    t_arr = np.atleast_1d(np.asarray(t, dtype=float))
    phi = accumulated_phase(pulse, t_arr)
    n = 0.5 * (1.0 - np.cos(phi))
    return n if np.ndim(t) else float(n[0])


def evolve_lindblad(pulse: DichromaticPulse, dissipation: DissipationParams,
                    t_grid, initial: BlochState | None = None) -> BlochTrajectory:
    """RK4 on the density matrix with radiative decay and pure dephasing:

        drho/dt = -(i/hbar)[H, rho] + (1/T1) D[sigma_-] rho
                  + (gamma*/2) D[sigma_z] rho

    with H = (hbar/2) (f |g><e| + f* |e><g|). Trace is preserved by
    construction; positivity is monitored and a violation beyond 1e-6
    raises NumericalError.
    """
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or len(t) < 2:
        raise ConfigError("t_grid must contain at least two points")
    steps = np.diff(t)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
        raise ConfigError("t_grid must be uniform")
    h = steps[0]
    if initial is None:
        initial = BlochState.ground()

    g1 = 0.0 if dissipation.t1 is None else 1.0 / dissipation.t1
    gs = dissipation.gamma_star

    t_half = t[0] + (h / 2.0) * np.arange(2 * (len(t) - 1) + 1)
    fvals = pulse.f(t_half)

    def rhs(fv: complex, r: np.ndarray) -> np.ndarray:
        hm = 0.5 * np.array([[0.0, fv], [np.conj(fv), 0.0]])
        out = -1j * (hm @ r - r @ hm)
        if g1:
            # D[sigma_-]: |e> decays to |g>; sigma_- = |g><e|
            out += g1 * np.array([[r[1, 1], -0.5 * r[0, 1]],
                                  [-0.5 * r[1, 0], -r[1, 1]]])
        if gs:
            # (gamma*/2) D[sigma_z] damps coherences at rate gamma*
            out += gs * np.array([[0.0, -r[0, 1]],
                                  [-r[1, 0], 0.0]])
        return out

    r = initial.rho.astype(complex)
    out = np.empty((len(t), 3))
    out[0] = initial.s
    for k in range(len(t) - 1):
        f1, f2, f3 = fvals[2 * k], fvals[2 * k + 1], fvals[2 * k + 2]
        k1 = rhs(f1, r)
        k2 = rhs(f2, r + 0.5 * h * k1)
        k3 = rhs(f2, r + 0.5 * h * k2)
        k4 = rhs(f3, r + h * k3)
        r = r + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[k + 1] = [r[0, 1].real, r[0, 1].imag,
                      (r[1, 1].real - r[0, 0].real) / 2.0]
    if abs(np.trace(r) - 1.0) > 1e-9:
        raise NumericalError("Lindblad trace drift exceeds 1e-9")
    eigs = np.linalg.eigvalsh(r)
    if eigs.min() < -1e-6:
        raise NumericalError(
            f"density matrix eigenvalue {eigs.min():.2e} below -1e-6; reduce the step")
    return BlochTrajectory(t=t, s=out)


def final_occupation(traj: BlochTrajectory) -> FinalOccupation:
    """Occupation at the last grid point plus a stationarity flag
    (|dn/dt| < 1e-5 / ps over the trailing 10% of the grid)."""
    n = traj.occupation
    tail = max(2, len(n) // 10)
    dn = np.diff(n[-tail:]) / np.diff(traj.t[-tail:])
    return FinalOccupation(value=float(n[-1]),
                           stationary=bool(np.all(np.abs(dn) < 1e-5)))
