"""Acoustic-phonon environment of the emitter.

Deformation-potential coupling to bulk longitudinal-acoustic phonons is
characterized entirely by the super-ohmic spectral density

    J(w) = w^3 / (4 pi^2 rho hbar c_s^5)
           * (D_e e^{-w^2 a_e^2 / 4 c_s^2} - D_h e^{-w^2 a_h^2 / 4 c_s^2})^2

with w in rad/ps. From J follow the finite-temperature bath correlation
C(tau) and the discretized influence-functional coefficients eta_m that
the path integral consumes. The eta are exact integrals of C over square
dt x dt time cells (time-ordered half cell on the diagonal), evaluated
in closed form in frequency space.
"""

from __future__ import annotations

import functools
import hashlib
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad

from .errors import ConfigError, NumericalError
from .units import EV_TO_MEV, HBAR, KB, KG_PER_M3_TO_MEV_PS2_PER_NM5, M_PER_S_TO_NM_PER_PS

_QUAD_KW = dict(limit=400, epsabs=1e-12, epsrel=1e-10)


@dataclass(frozen=True)
class PhononParams:
    """Material and bath parameters, in laboratory units.

    a_e, a_h: carrier localization radii (nm); c_s: sound speed (m/s);
    rho: mass density (kg/m^3); d_e, d_h: deformation potentials (eV,
    d_h < 0 for GaAs); temperature (K). Defaults are the GaAs quantum-dot
    values. Setting d_e = d_h = 0 switches the coupling off.
    """

    a_e: float = 3.0
    a_h: float = 3.0 / 1.15
    c_s: float = 5110.0
    rho: float = 5370.0
    d_e: float = 7.0
    d_h: float = -3.5
    temperature: float = 4.0

    def __post_init__(self) -> None:
        if min(self.a_e, self.a_h, self.c_s, self.rho, self.temperature) <= 0:
            raise ConfigError("radii, sound speed, density and temperature must be > 0")
        if not all(math.isfinite(v) for v in (self.d_e, self.d_h)):
            raise ConfigError("deformation potentials must be finite")

    # internal-unit views (meV / ps / nm)
    @property
    def c_s_nm_ps(self) -> float:
        return self.c_s * M_PER_S_TO_NM_PER_PS

    @property
    def rho_internal(self) -> float:
        return self.rho * KG_PER_M3_TO_MEV_PS2_PER_NM5

    @property
    def prefactor(self) -> float:
        """1 / (4 pi^2 rho hbar c_s^5) in internal units; J = pref * w^3 * (...)^2."""
        return 1.0 / (4.0 * math.pi ** 2 * self.rho_internal * HBAR
                      * self.c_s_nm_ps ** 5)

    @property
    def coupled(self) -> bool:
        return self.d_e != 0.0 or self.d_h != 0.0

    def sha256(self) -> str:
        key = ",".join(repr(float(v)) for v in
                       (self.a_e, self.a_h, self.c_s, self.rho,
                        self.d_e, self.d_h, self.temperature))
        return hashlib.sha256(key.encode()).hexdigest()


@dataclass(frozen=True)
class InfluenceCoefficients:
    """Lag-indexed influence table eta_m, m in [0, memory_k].

    eta[m] is the integral of C(t - t') over a cell pair at lag m
    (stationary bath, so only the lag matters); eta[0] is the
    time-ordered half of the diagonal cell.
    """

    dt: float
    memory_k: int
    eta: np.ndarray

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ConfigError("dt must be > 0")
        if self.memory_k < 1:
            raise ConfigError("memory_k must be >= 1")
        eta = np.asarray(self.eta, dtype=complex)
        if eta.shape != (self.memory_k + 1,):
            raise ConfigError("eta table must have memory_k + 1 entries")
        if not np.all(np.isfinite(eta)):
            raise NumericalError("eta table contains non-finite entries")
        object.__setattr__(self, "eta", eta)

    def lag(self, m: int) -> complex:
        return complex(self.eta[m])


def spectral_density(omega, params: PhononParams) -> np.ndarray | float:
    """J(omega) in rad/ps for omega in rad/ps; domain omega >= 0."""
    w = np.asarray(omega, dtype=float)
    if np.any(w < 0):
        raise ConfigError("spectral_density requires omega >= 0")
    cs = params.c_s_nm_ps
    ge = np.exp(-(w * params.a_e / (2.0 * cs)) ** 2)
    gh = np.exp(-(w * params.a_h / (2.0 * cs)) ** 2)
    de = params.d_e * EV_TO_MEV  # deformation potentials in meV
    dh = params.d_h * EV_TO_MEV
    out = params.prefactor * w ** 3 * (de * ge - dh * gh) ** 2
    return out if np.ndim(omega) else float(out)


@functools.lru_cache(maxsize=None)
def omega_cutoff(params: PhononParams) -> float:
    """Upper quadrature cutoff: smallest omega beyond which
    J < 1e-10 * J_peak (J decays super-exponentially)."""
    if not params.coupled:
        return 1.0
    grid = np.linspace(1e-6, 60.0 * params.c_s_nm_ps / max(params.a_e, params.a_h), 8001)
    j = spectral_density(grid, params)
    peak = j.max()
    above = np.nonzero(j > 1e-10 * peak)[0]
    return float(grid[above[-1] + 1]) if above[-1] + 1 < len(grid) else float(grid[-1])


def _thermal_coth(params: PhononParams):
    beta = 1.0 / (KB * params.temperature)

    def coth(w):
        return 1.0 / np.tanh(0.5 * beta * HBAR * w)

    return coth


def bath_correlation(tau: float, params: PhononParams) -> complex:
    """C(tau) = int_0^inf dw J(w) [coth(hbar w / 2 kB T) cos(w tau) - i sin(w tau)].

    Satisfies C(-tau) = C(tau)*. Oscillatory weights are handled with
    dedicated cos/sin quadrature.
    """
    if not params.coupled:
        return 0.0 + 0.0j
    coth = _thermal_coth(params)
    cut = omega_cutoff(params)
    at = abs(tau)

    def j_coth(w):
        return spectral_density(w, params) * coth(w)

    def j_plain(w):
        return spectral_density(w, params)

    try:
        if at < 1e-12:
            re, _ = quad(j_coth, 0.0, cut, **_QUAD_KW)
            return complex(re, 0.0)
        re, _ = quad(j_coth, 0.0, cut, weight="cos", wvar=at, **_QUAD_KW)
        im, _ = quad(j_plain, 0.0, cut, weight="sin", wvar=at, **_QUAD_KW)
    except Exception as exc:  # scipy raises bare Exception subclasses here
        raise NumericalError(f"bath correlation quadrature failed: {exc}") from exc
    c = complex(re, -im)
    return np.conj(c) if tau < 0 else c


def memory_time(params: PhononParams, threshold: float = 1e-3,
                t_max: float = 20.0, dt: float = 0.1) -> float:
    """Smallest tau beyond which |C| stays below threshold * C(0)."""
    if not params.coupled:
        return 0.0
    c0 = abs(bath_correlation(0.0, params))
    taus = np.arange(0.0, t_max + dt, dt)
    mags = np.array([abs(bath_correlation(t, params)) for t in taus])
    below = mags < threshold * c0
    for i in range(len(taus)):
        if below[i:].all():
            return float(taus[i])
    raise NumericalError("bath correlation did not decay within t_max")


def eta_coefficients(dt: float, memory_k: int, params: PhononParams) -> InfluenceCoefficients:
    """Influence coefficients as exact cell integrals of C, evaluated in
    frequency space:

      eta_m   = int dw J/w^2 [coth * 2(1-cos(w dt)) cos(m w dt)
                              - 2 i (1-cos(w dt)) sin(m w dt)],  m >= 1
      eta_0   = int dw J/w^2 [coth * (1-cos(w dt)) + i (sin(w dt) - w dt)]

    The w -> 0 limit of the integrands is finite (J ~ w^3).
    """
    if dt <= 0:
        raise ConfigError("dt must be > 0")
    if memory_k < 1:
        raise ConfigError("memory_k must be >= 1")
    if not params.coupled:
        return InfluenceCoefficients(dt=dt, memory_k=memory_k,
                                     eta=np.zeros(memory_k + 1, dtype=complex))
    coth = _thermal_coth(params)
    cut = omega_cutoff(params)

    def jw2(w):
        return spectral_density(w, params) / w ** 2

    eta = np.empty(memory_k + 1, dtype=complex)
    try:
        re0, _ = quad(lambda w: jw2(w) * coth(w) * (1.0 - np.cos(w * dt)),
                      0.0, cut, **_QUAD_KW)
        im0, _ = quad(lambda w: jw2(w) * (np.sin(w * dt) - w * dt),
                      0.0, cut, **_QUAD_KW)
        eta[0] = complex(re0, im0)
        for m in range(1, memory_k + 1):
            re, _ = quad(lambda w: jw2(w) * coth(w) * 2.0 * (1.0 - np.cos(w * dt))
                         * np.cos(m * w * dt), 0.0, cut, **_QUAD_KW)
            im, _ = quad(lambda w: jw2(w) * 2.0 * (1.0 - np.cos(w * dt))
                         * np.sin(m * w * dt), 0.0, cut, **_QUAD_KW)
            eta[m] = complex(re, -im)
    except NumericalError:
        raise
    except Exception as exc:
        raise NumericalError(f"eta quadrature failed: {exc}") from exc
    return InfluenceCoefficients(dt=dt, memory_k=memory_k, eta=eta)


# ---------------------------------------------------------------------------
# disk cache

def cache_filename(params: PhononParams, dt: float, memory_k: int) -> str:
    return f"eta_{params.sha256()[:12]}_dt{dt:g}_K{memory_k}.csv"


def save_eta_cache(coeffs: InfluenceCoefficients, params: PhononParams,
                   cache_dir: str) -> str:
    """Write the eta table as CSV `m, re_eta, im_eta` with a header
    recording dt, K and the parameter hash. Returns the file path."""
    os.makedirs(cache_dir, exist_ok=True)
    path = os.path.join(cache_dir, cache_filename(params, coeffs.dt, coeffs.memory_k))
    lines = [
        "# eta influence coefficients (dimensionless)",
        f"# dt_ps = {coeffs.dt!r}",
        f"# memory_k = {coeffs.memory_k}",
        f"# params_sha256 = {params.sha256()}",
        "m,re_eta,im_eta",
    ]
    for m, e in enumerate(coeffs.eta):
        lines.append(f"{m},{e.real!r},{e.imag!r}")
    tmp = path + ".tmp"
    with open(tmp, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    os.replace(tmp, path)
    return path


def load_eta_cache(params: PhononParams, dt: float, memory_k: int,
                   cache_dir: str) -> InfluenceCoefficients | None:
    """Load a cached table if one matches (params hash, dt, K) exactly."""
    path = os.path.join(cache_dir, cache_filename(params, dt, memory_k))
    if not os.path.exists(path):
        return None
    header: dict[str, str] = {}
    rows: list[tuple[int, float, float]] = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                if "=" in line:
                    key, val = line[1:].split("=", 1)
                    header[key.strip()] = val.strip()
                continue
            if line.startswith("m,"):
                continue
            m_s, re_s, im_s = line.split(",")
            rows.append((int(m_s), float(re_s), float(im_s)))
    if header.get("params_sha256") != params.sha256():
        return None
    if abs(float(header.get("dt_ps", "nan")) - dt) > 1e-12:
        return None
    if int(header.get("memory_k", "-1")) != memory_k:
        return None
    eta = np.zeros(memory_k + 1, dtype=complex)
    for m, re, im in rows:
        eta[m] = complex(re, im)
    return InfluenceCoefficients(dt=dt, memory_k=memory_k, eta=eta)


def get_eta_coefficients(dt: float, memory_k: int, params: PhononParams,
                         cache_dir: str | None = None) -> InfluenceCoefficients:
    """Cache-aware eta construction."""
    if cache_dir:
        cached = load_eta_cache(params, dt, memory_k, cache_dir)
        if cached is not None:
            return cached
    coeffs = eta_coefficients(dt, memory_k, params)
    if cache_dir:
        save_eta_cache(coeffs, params, cache_dir)
    return coeffs


def dump_spectral_density(params: PhononParams, path: str, n: int = 400) -> str:
    """Write J(omega) on a uniform grid as CSV `omega_rad_ps, j_rad_ps`."""
    grid = np.linspace(0.0, omega_cutoff(params), n)
    j = spectral_density(grid, params)
    with open(path, "w") as fh:
        fh.write("# phonon spectral density\n")
        fh.write("omega_rad_ps,j_rad_ps\n")
        for w, val in zip(grid, j):
            fh.write(f"{w!r},{val!r}\n")
    return path
