"""Pulse spectra, band planning, and effective interference factors.

The uplink and downlink occupy adjacent bands that overlap by a fraction
controlled by the duplex parameter alpha: each direction's accessible band
grows from B_a at alpha=0 (half duplex) to B_a + B at alpha=1 (full overlap),
B = min(B_u, B_d), while the carrier spacing shrinks to match.  Cross-mode
interference is then scaled by the frequency-domain correlation between the
aggressor's transmit spectrum and the victim's matched filter, the effective
interference factor

    I_b->a(alpha) = integral over victim band of S_b(f - offset) S_a*(f) df.

Both spectra are normalized to unit energy inside their own allocated band,
which pins the co-channel factors I_u->u and I_d->d at exactly 1.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .model import Direction
from .specfun import DEFAULT_QUADRATURE, QuadratureSpec, adaptive_quad


class PulseKind(enum.Enum):
    RECTANGULAR = "rectangular"   # sinc spectrum
    TRIANGULAR = "triangular"     # sinc^2 spectrum


@dataclass(frozen=True)
class PulsePair:
    """Pulse kinds for the two directions (the bands come from a BandPlan)."""

    uplink: PulseKind
    downlink: PulseKind


@dataclass(frozen=True)
class PulseShape:
    """A transmit pulse described in the frequency domain.

    ``allocated_band`` is the null-to-null main-lobe width the pulse is
    scaled to occupy; the spectrum is normalized so its energy inside
    [-allocated_band/2, +allocated_band/2] is exactly 1.
    """

    kind: PulseKind
    allocated_band: float  # Hz

    def __post_init__(self) -> None:
        if not self.allocated_band > 0.0:
            raise ValueError(
                f"allocated_band must be positive, got {self.allocated_band}")


@dataclass(frozen=True)
class BandPlan:
    """Spectrum layout for one value of the duplex parameter."""

    b_u: float      # Hz, uplink null-to-null band
    b_d: float      # Hz, downlink band
    alpha: float    # overlap fraction in [0, 1]
    b: float = field(init=False)               # min(b_u, b_d)
    carrier_offset: float = field(init=False)  # f_d - f_u, Hz

    def __post_init__(self) -> None:
        object.__setattr__(self, "b", min(self.b_u, self.b_d))
        object.__setattr__(
            self, "carrier_offset", carrier_offset(self.b_u, self.b_d, self.alpha))

    def accessible_bandwidth(self, direction: Direction) -> float:
        if direction is Direction.UPLINK:
            return self.b_u + self.alpha * self.b
        return self.b_d + self.alpha * self.b


@dataclass(frozen=True)
class InterferenceFactors:
    """The squared effective interference factors at one alpha.

    ``i_du_sq`` scales BS-on-uplink interference (|I_d->u|^2), ``i_ud_sq``
    UE-on-downlink (|I_u->d|^2).  Residual self-interference is cross-mode
    interference from the receiver's own transmitter, so the SI factors
    coincide with the corresponding cross factors; the co-channel factors
    are unity by the in-band energy normalization.
    """

    i_du_sq: float
    i_ud_sq: float
    i_su_sq: float
    i_sd_sq: float
    i_uu_sq: float = 1.0
    i_dd_sq: float = 1.0

    def __post_init__(self) -> None:
        for name in ("i_du_sq", "i_ud_sq", "i_su_sq", "i_sd_sq",
                     "i_uu_sq", "i_dd_sq"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.i_su_sq != self.i_du_sq:
            raise ValueError("i_su_sq must equal i_du_sq (SI is cross-mode)")
        if self.i_sd_sq != self.i_ud_sq:
            raise ValueError("i_sd_sq must equal i_ud_sq (SI is cross-mode)")
        if self.i_uu_sq != 1.0 or self.i_dd_sq != 1.0:
            raise ValueError("co-channel factors are fixed at 1")

    @classmethod
    def from_cross(cls, i_du_sq: float, i_ud_sq: float) -> "InterferenceFactors":
        return cls(i_du_sq=i_du_sq, i_ud_sq=i_ud_sq,
                   i_su_sq=i_du_sq, i_sd_sq=i_ud_sq)


def carrier_offset(b_u: float, b_d: float, alpha: float) -> float:
    """Carrier spacing f_d - f_u for overlap fraction alpha (Hz)."""
    if b_u <= 0.0 or b_d <= 0.0:
        raise ValueError("bandwidths must be positive")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    return 0.5 * (b_u + b_d) - alpha * min(b_u, b_d)


@lru_cache(maxsize=None)
def _lobe_energy(kind: PulseKind) -> float:
    # integral over the main lobe, in units of the half-width: for a pulse
    # with nulls at +-1, int_{-1}^{1} sinc^2 or sinc^4.
    power = 2 if kind is PulseKind.RECTANGULAR else 4
    return adaptive_quad(lambda x: np.sinc(x) ** power, -1.0, 1.0,
                         QuadratureSpec(rel_tol=1e-13, abs_tol=1e-15))


def _peak(pulse: PulseShape) -> float:
    # normalization constant c with S(f) = c * sinc^m(2 f / W):
    # 1 = c^2 (W/2) int_{-1}^{1} sinc^(2m)  =>  c = sqrt(2 / (W * J))
    return math.sqrt(2.0 / (pulse.allocated_band * _lobe_energy(pulse.kind)))


def spectrum(pulse: PulseShape, f):
    """Pulse spectrum S(f), real-valued and even; scalar or ndarray ``f``.

    Rectangular time pulses give a sinc, triangular give a sinc^2, both
    scaled so the first nulls sit at +-allocated_band/2 and the in-band
    energy is 1.
    """
    f_arr = np.asarray(f, dtype=float)
    if not np.all(np.isfinite(f_arr)):
        raise ValueError("f must be finite")
    x = 2.0 * f_arr / pulse.allocated_band
    base = np.sinc(x)
    if pulse.kind is PulseKind.TRIANGULAR:
        base = base * base
    out = _peak(pulse) * base
    return float(out) if out.ndim == 0 else out


def make_pulses(pair: PulsePair, plan: BandPlan) -> tuple[PulseShape, PulseShape]:
    """(uplink, downlink) pulses scaled to their alpha-dependent bands."""
    return (
        PulseShape(pair.uplink, plan.accessible_bandwidth(Direction.UPLINK)),
        PulseShape(pair.downlink, plan.accessible_bandwidth(Direction.DOWNLINK)),
    )


def effective_interference_factor(
        victim: Direction, aggressor: Direction, plan: BandPlan,
        pulse_u: PulseShape, pulse_d: PulseShape,
        spec: QuadratureSpec = DEFAULT_QUADRATURE) -> tuple[complex, float]:
    """Correlation I_aggressor->victim and its squared magnitude.

    Integrates the aggressor spectrum, shifted by the carrier offset, against
    the victim matched filter across the victim's accessible band.  The
    integrand is subdivided at the shifted spectrum's nulls: between nulls a
    sinc product is a single smooth lobe, whereas one adaptive pass over the
    whole band can stall on the oscillation.

    Returns (I, |I|^2).  I is real for these real even spectra but typed
    complex, since the correlation is complex for general pulses.
    """
    for pulse, direction in ((pulse_u, Direction.UPLINK),
                             (pulse_d, Direction.DOWNLINK)):
        expected = plan.accessible_bandwidth(direction)
        if not math.isclose(pulse.allocated_band, expected, rel_tol=1e-9):
            raise ValueError(
                f"{direction.value} pulse allocated_band {pulse.allocated_band} "
                f"does not match plan bandwidth {expected}")

    if victim is aggressor:
        return complex(1.0), 1.0

    s_victim = pulse_u if victim is Direction.UPLINK else pulse_d
    s_aggr = pulse_d if victim is Direction.UPLINK else pulse_u
    # shift of the aggressor spectrum as seen in victim baseband: f_b - f_a
    offset = plan.carrier_offset
    if victim is Direction.DOWNLINK:
        offset = -offset

    half = 0.5 * s_victim.allocated_band
    edges = {-half, half}
    # nulls of the shifted aggressor spectrum: offset + k * W_b/2, k != 0
    half_b = 0.5 * s_aggr.allocated_band
    k_lo = math.ceil((-half - offset) / half_b)
    k_hi = math.floor((half - offset) / half_b)
    for k in range(k_lo, k_hi + 1):
        if k == 0:
            continue  # the spectrum peaks at the carrier, no null there
        null = offset + k * half_b
        if -half < null < half:
            edges.add(null)
    breakpoints = sorted(edges)

    def integrand(f):
        return spectrum(s_aggr, f - offset) * spectrum(s_victim, f)

    panel_spec = QuadratureSpec(
        rel_tol=spec.rel_tol,
        abs_tol=spec.abs_tol / max(1, len(breakpoints) - 1),
        max_subdivisions=spec.max_subdivisions)
    total = 0.0
    for lo, hi in zip(breakpoints[:-1], breakpoints[1:]):
        total += adaptive_quad(integrand, lo, hi, panel_spec)
    squared = min(max(total * total, 0.0), 1.0)
    return complex(total), squared


def interference_factors(plan: BandPlan, pulse_u: PulseShape,
                         pulse_d: PulseShape,
                         spec: QuadratureSpec = DEFAULT_QUADRATURE
                         ) -> InterferenceFactors:
    """All squared factors at the plan's alpha (SI tied to the cross factors)."""
    _, i_du_sq = effective_interference_factor(
        Direction.UPLINK, Direction.DOWNLINK, plan, pulse_u, pulse_d, spec)
    _, i_ud_sq = effective_interference_factor(
        Direction.DOWNLINK, Direction.UPLINK, plan, pulse_u, pulse_d, spec)
    return InterferenceFactors.from_cross(i_du_sq, i_ud_sq)
