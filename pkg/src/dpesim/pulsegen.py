"""Dichromatic excitation fields in the rotating frame of the emitter.

A dichromatic pulse is a phase-locked pair of components detuned by
-Delta (red) and +Delta (blue) from the transition. In the rotating
frame the complex drive is

    f(t) = eps_R(t) e^{-i Delta (t-t0)/hbar} + eps_B(t) e^{+i Delta (t-t0)/hbar}

with real envelopes eps in rad/ps (angular Rabi amplitude). Two envelope
families are provided: rectangular spectra (sinc envelopes, truncated to
a finite window) and Gaussians.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.special import sici

from .errors import ConfigError
from .units import HBAR


class PulseShape(enum.Enum):
    RECT_SPECTRUM = "rect"
    GAUSSIAN = "gaussian"


# default half-width of the sinc truncation window, ps. Chosen so the
# residual resonant overlap stays small up to A = 20 pi (n < 0.005);
# shorter windows leave a visible truncation residue.
DEFAULT_WINDOW = 200.0


@dataclass(frozen=True)
class PulseSpec:
    """Declarative description of a dichromatic pulse pair.

    shape:   envelope family.
    delta:   detuning of each component from resonance, meV. delta = 0
             degenerates to a monochromatic resonant field and is allowed.
    w_red, w_blue:
             spectral widths, meV. Rectangular width for RECT_SPECTRUM,
             spectral FWHM for GAUSSIAN. A zero width switches that
             component off.
    area:    calibration pulse area A (radians) of a single resonant
             reference pulse; see the envelope conventions below.
    t0:      pulse center, ps.
    carrier_detuning:
             offset of the pair's center from the transition, meV.
    window:  truncation half-width for sinc envelopes, ps.
    """

    shape: PulseShape
    delta: float
    w_red: float
    w_blue: float
    area: float
    t0: float = 0.0
    carrier_detuning: float = 0.0
    window: float = DEFAULT_WINDOW

    def __post_init__(self) -> None:
        vals = (self.delta, self.w_red, self.w_blue, self.area, self.t0,
                self.carrier_detuning, self.window)
        if not all(math.isfinite(v) for v in vals):
            raise ConfigError("pulse spec fields must be finite")
        if self.w_red < 0 or self.w_blue < 0:
            raise ConfigError("spectral widths must be >= 0")
        if self.w_red == 0 and self.w_blue == 0:
            raise ConfigError("at least one spectral component must be present")
        if self.area < 0:
            raise ConfigError("pulse area must be >= 0")
        if self.window <= 0:
            raise ConfigError("truncation window must be > 0")


@dataclass(frozen=True)
class DichromaticPulse:
    """A realized pulse: callable envelopes and complex drive.

    envelope_red / envelope_blue map time (ps) to rad/ps and are real
    everywhere, including the removable singularity at t0. f returns the
    complex rotating-frame drive. residue_red / residue_blue report the
    signed envelope area lost to truncation (zero for Gaussians).
    """

    spec: PulseSpec
    envelope_red: Callable[[np.ndarray], np.ndarray]
    envelope_blue: Callable[[np.ndarray], np.ndarray]
    f: Callable[[np.ndarray], np.ndarray] = field(repr=False, default=None)  # type: ignore[assignment]

    residue_red: float = 0.0
    residue_blue: float = 0.0

    def __post_init__(self) -> None:
        if self.f is None:
            object.__setattr__(self, "f", _make_f(self.spec, self.envelope_red,
                                                  self.envelope_blue))

    @property
    def symmetric(self) -> bool:
        return self.spec.w_red == self.spec.w_blue


def _make_f(spec: PulseSpec,
            env_r: Callable[[np.ndarray], np.ndarray],
            env_b: Callable[[np.ndarray], np.ndarray]) -> Callable[[np.ndarray], np.ndarray]:
    b = spec.delta / HBAR
    cd = spec.carrier_detuning / HBAR
    t0 = spec.t0

    def f(t):
        tau = np.asarray(t, dtype=float) - t0
        er = env_r(t)
        eb = env_b(t)
        if spec.delta == 0.0:
            out = (er + eb).astype(complex)
        else:
            # shared sin/cos keeps the symmetric case exactly real
            c = np.cos(b * tau)
            s = np.sin(b * tau)
            out = (er + eb) * c + 1j * (eb - er) * s
        if cd != 0.0:
            out = out * np.exp(1j * cd * tau)
        return out

    return f


def _rect_envelope(area: float, w: float, t0: float, window: float):
    """sinc envelope (A/pi) sin(W tau / 2 hbar)/tau, zero outside the window."""
    if w == 0.0 or area == 0.0:
        def zero(t):
            return np.zeros_like(np.asarray(t, dtype=float))
        return zero
    a = w / (2.0 * HBAR)

    def env(t):
        tau = np.asarray(t, dtype=float) - t0
        # sin(a tau)/tau = a sinc(a tau / pi), finite at tau = 0
        out = (area / np.pi) * a * np.sinc(a * tau / np.pi)
        return np.where(np.abs(tau) <= window, out, 0.0)

    return env


def _rect_residue(area: float, w: float, window: float) -> float:
    """Signed envelope area outside the truncation window.

    The full-line integral of the sinc envelope is exactly `area`; the
    window captures (2A/pi) Si(W T / 2 hbar).
    """
    if w == 0.0 or area == 0.0:
        return 0.0
    a = w / (2.0 * HBAR)
    si, _ = sici(a * window)
    return area * (1.0 - 2.0 * si / np.pi)


def make_rect_dichromatic(spec: PulseSpec) -> DichromaticPulse:
    """Build a rectangular-spectrum (sinc-envelope) dichromatic pulse.

    Both components share the same spectral height: the envelope
    prefactor is A/pi regardless of width, so each present component
    integrates to A over the full line and its intensity scales linearly
    with its width.
    """
    if spec.shape is not PulseShape.RECT_SPECTRUM:
        raise ConfigError("spec.shape must be RECT_SPECTRUM")
    env_r = _rect_envelope(spec.area, spec.w_red, spec.t0, spec.window)
    env_b = _rect_envelope(spec.area, spec.w_blue, spec.t0, spec.window)
    return DichromaticPulse(
        spec=spec,
        envelope_red=env_r,
        envelope_blue=env_b,
        residue_red=_rect_residue(spec.area, spec.w_red, spec.window),
        residue_blue=_rect_residue(spec.area, spec.w_blue, spec.window),
    )


def gaussian_sigma_t(fwhm_energy: float) -> float:
    """Temporal sigma (ps) of a transform-limited Gaussian with the given
    spectral FWHM (meV): sigma_t = 4 hbar ln2 / FWHM_E."""
    return 4.0 * HBAR * math.log(2.0) / fwhm_energy


def make_gaussian_dichromatic(spec: PulseSpec) -> DichromaticPulse:
    """Build a Gaussian dichromatic pulse.

    Widths are spectral FWHMs. The calibration area A is split between
    the present components proportionally to their widths (A/2 each when
    symmetric, all of A for a single component), each envelope being a
    normalized Gaussian times its share.
    """
    if spec.shape is not PulseShape.GAUSSIAN:
        raise ConfigError("spec.shape must be GAUSSIAN")
    wsum = spec.w_red + spec.w_blue

    def component(w: float):
        if w == 0.0:
            def zero(t):
                return np.zeros_like(np.asarray(t, dtype=float))
            return zero
        share = spec.area * w / wsum
        sig = gaussian_sigma_t(w)
        norm = share / (sig * math.sqrt(2.0 * math.pi))
        t0 = spec.t0

        def env(t):
            tau = np.asarray(t, dtype=float) - t0
            return norm * np.exp(-0.5 * (tau / sig) ** 2)

        return env

    return DichromaticPulse(
        spec=spec,
        envelope_red=component(spec.w_red),
        envelope_blue=component(spec.w_blue),
    )


def make_pulse(spec: PulseSpec) -> DichromaticPulse:
    """Dispatch on spec.shape."""
    if spec.shape is PulseShape.RECT_SPECTRUM:
        return make_rect_dichromatic(spec)
    return make_gaussian_dichromatic(spec)


def component_intensities(pulse: DichromaticPulse) -> tuple[float, float]:
    """Full-line spectral intensities (integral of eps^2 dt) of the two
    components, in rad^2/ps.

    Closed forms: A^2 W / (2 pi hbar) for a rectangle of width W at equal
    spectral height, A_j^2 / (2 sigma_j sqrt(pi)) for a Gaussian with
    area share A_j. Using the full line rather than the truncation window
    keeps the contrast <-> widths round trip exact.
    """
    spec = pulse.spec
    if spec.shape is PulseShape.RECT_SPECTRUM:
        i_r = spec.area ** 2 * spec.w_red / (2.0 * math.pi * HBAR)
        i_b = spec.area ** 2 * spec.w_blue / (2.0 * math.pi * HBAR)
        return i_r, i_b
    wsum = spec.w_red + spec.w_blue

    def gauss_i(w: float) -> float:
        if w == 0.0:
            return 0.0
        share = spec.area * w / wsum
        sig = gaussian_sigma_t(w)
        return share ** 2 / (2.0 * sig * math.sqrt(math.pi))

    return gauss_i(spec.w_red), gauss_i(spec.w_blue)


def contrast(pulse: DichromaticPulse) -> float:
    """Pulse contrast C = (I_B - I_R)/(I_B + I_R) from component intensities."""
    i_r, i_b = component_intensities(pulse)
    tot = i_r + i_b
    if tot == 0.0:
        raise ConfigError("contrast undefined: both components carry zero intensity")
    return (i_b - i_r) / tot


def widths_for_contrast(c: float, w_ref: float) -> tuple[float, float]:
    """Widths (w_red, w_blue) realizing contrast c with the wider component
    at w_ref. For equal-height rectangles I scales with W, so the narrow
    width is w_ref (1-|c|)/(1+|c|)."""
    if not -1.0 <= c <= 1.0:
        raise ConfigError("contrast must lie in [-1, 1]")
    if w_ref <= 0:
        raise ConfigError("w_ref must be > 0")
    w_narrow = w_ref * (1.0 - abs(c)) / (1.0 + abs(c))
    if c >= 0:
        return w_narrow, w_ref
    return w_ref, w_narrow


def sample_field(pulse: DichromaticPulse, t_grid) -> np.ndarray:
    """Evaluate f on a monotone time grid."""
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size < 1:
        raise ConfigError("t_grid must be a 1-D array")
    if t.size > 1 and not (np.all(np.diff(t) > 0) or np.all(np.diff(t) < 0)):
        raise ConfigError("t_grid must be strictly monotone")
    return pulse.f(t)


def resonant_overlap(pulse: DichromaticPulse) -> float:
    """Accumulated phase of the truncated field at the transition frequency,
    int (eps_R + eps_B) cos(Delta tau / hbar) dtau over the window.

    Vanishes on the full line for spectrally separated components
    (W/2 < Delta); the windowed value quantifies how much resonant drive
    the truncation leaves behind. Closed form via the sine integral for
    rectangular spectra, erf-free Gaussian transform otherwise.
    """
    spec = pulse.spec
    b = spec.delta / HBAR
    total = 0.0
    if spec.shape is PulseShape.RECT_SPECTRUM:
        for w in (spec.w_red, spec.w_blue):
            if w == 0.0 or spec.area == 0.0:
                continue
            a = w / (2.0 * HBAR)
            si_p, _ = sici((a + b) * spec.window)
            si_m, _ = sici((a - b) * spec.window)
            total += spec.area / np.pi * (si_p + si_m)
        return total
    wsum = spec.w_red + spec.w_blue
    for w in (spec.w_red, spec.w_blue):
        if w == 0.0:
            continue
        share = spec.area * w / wsum
        sig = gaussian_sigma_t(w)
        total += share * math.exp(-0.5 * (b * sig) ** 2)
    return total


def field_spectrum(pulse: DichromaticPulse, n: int = 2 ** 14,
                   span: float | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Fourier transform F(E) = int f(t) e^{+i E (t-t0)/hbar} dt of the drive.

    Returns (energy grid in meV, complex spectrum). For a rectangular-
    spectrum pulse the result is a pair of rectangles of height ~A at
    -Delta and +Delta. Trapezoid-rule FFT on a uniform grid.
    """
    spec = pulse.spec
    if span is None:
        span = spec.window if spec.shape is PulseShape.RECT_SPECTRUM else \
            10.0 * gaussian_sigma_t(max(spec.w_red, spec.w_blue))
    dt = 2.0 * span / n
    tau = -span + dt * np.arange(n)
    ft = pulse.f(spec.t0 + tau)
    omega = 2.0 * np.pi * np.fft.fftshift(np.fft.fftfreq(n, d=dt))
    # F(w_k) = dt sum_n f(tau_n) e^{+i w_k tau_n}; tau_n = -span + n dt
    spec_vals = dt * np.exp(-1j * omega * span) * n * np.fft.fftshift(np.fft.ifft(ft))
    return omega * HBAR, spec_vals
