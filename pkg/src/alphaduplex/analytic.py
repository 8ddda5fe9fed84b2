"""Closed-form spatially averaged BER and throughput for both link directions.

The chain has three layers:

1. Laplace transforms of the normalized aggregate interference seen by an
   uplink receiver (its own BS) and a downlink receiver (a UE at serving
   distance r_o), one transform per interference source (BSs or UEs).  All
   four come from the PPP probability generating functional; the UE-driven
   ones carry exclusion regions induced by power control and association,
   which is where the 2F1(1, 1-2/eta; 2-2/eta; -x) kernel enters.
2. An averaging identity: for x ~ Exp(1), a nonnegative y independent of x,
   and a constant b,
       E[w1 erfc(sqrt(w2 x / (y + b)))]
         = w1 - (w1/sqrt(pi)) int_0^inf L_y(z/w2) e^(-z(1+b/w2)) / sqrt(z) dz,
   which turns the conditional-BER average into a single semi-infinite
   integral of the interference LT.
3. Assembly per direction: the uplink SINR is normalized by rho (power
   control pins the mean received power), the downlink by P_b r_o^(-eta),
   and the downlink result is additionally averaged over the serving
   distance; its inner r_o integral is evaluated by batched adaptive
   quadrature across all outer z nodes at once.

eta = 4 admits arctan closed forms for the 2F1 factors; the *_eta4 variants
implement those and must agree with the general path to high accuracy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import (
    Direction,
    SystemParams,
    max_inversion_radius_m,
    noise_variance,
    uplink_power_moment,
)
from .pulse import BandPlan, InterferenceFactors
from .specfun import (
    DEFAULT_QUADRATURE,
    QuadratureSpec,
    adaptive_quad_batch,
    hyp2f1_special,
    integrate_semi_infinite,
)

__all__ = [
    "LinkMetrics",
    "lt_bs_on_uplink",
    "lt_ue_on_uplink",
    "lt_bs_on_downlink",
    "lt_ue_on_downlink",
    "hamdi_average",
    "ber_uplink",
    "ber_uplink_eta4",
    "ber_downlink",
    "ber_downlink_eta4",
]


@dataclass(frozen=True)
class LinkMetrics:
    """BER and throughput of one direction at one overlap fraction."""

    direction: Direction
    alpha: float
    ber: float
    bandwidth: float   # Hz, accessible band B_a + alpha B
    throughput: float  # bits/s, log2(M) * bandwidth * (1 - ber)

    def __post_init__(self) -> None:
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must lie in [0, 1], got {self.alpha}")
        if not 0.0 <= self.ber <= 1.0:
            raise ValueError(f"ber must lie in [0, 1], got {self.ber}")
        if not self.bandwidth > 0.0:
            raise ValueError("bandwidth must be positive")


def _metrics(direction: Direction, alpha: float, ber: float,
             p: SystemParams) -> LinkMetrics:
    bandwidth = BandPlan(p.b_u, p.b_d, alpha).accessible_bandwidth(direction)
    throughput = math.log2(p.m_symbols) * bandwidth * (1.0 - ber)
    return LinkMetrics(direction=direction, alpha=alpha, ber=ber,
                       bandwidth=bandwidth, throughput=throughput)


def _as_float_array(s, name: str = "s"):
    arr = np.asarray(s, dtype=float)
    if np.any(arr < 0.0):
        raise ValueError(f"{name} must be nonnegative")
    return arr


def lt_bs_on_uplink(s, factors: InterferenceFactors, p: SystemParams):
    """LT of the BS-driven interference at the tagged BS, normalized by rho.

    Interfering BSs form an unthinned PPP with no exclusion around the
    receiver, which integrates to the csc(2 pi / eta) form.  Scalar or
    ndarray ``s``.
    """
    s_arr = _as_float_array(s)
    c = s_arr * (p.p_b * factors.i_du_sq / p.rho)
    exponent = ((2.0 / p.eta) * math.pi ** 2 * p.lambda_per_m2
                / math.sin(2.0 * math.pi / p.eta)) * c ** (2.0 / p.eta)
    out = np.exp(-exponent)
    return float(out) if out.ndim == 0 else out


def lt_ue_on_uplink(s, p: SystemParams):
    """LT of the UE-driven interference at the tagged BS, normalized by rho.

    Power control keeps any interfering UE's received power below rho
    (otherwise it would be served closer), an exclusion that shows up as
    the 2F1 factor together with the fractional power moment E[P_u^(2/eta)].
    """
    s_arr = _as_float_array(s)
    b = 1.0 - 2.0 / p.eta
    moment = uplink_power_moment(2.0 / p.eta, p)
    pref = (2.0 * math.pi * p.lambda_per_m2 / (p.eta - 2.0)
            * p.rho ** (-2.0 / p.eta) * moment)
    out = np.exp(-pref * s_arr * hyp2f1_special(b, s_arr))
    return float(out) if out.ndim == 0 else out


def lt_bs_on_downlink(s, r_o, p: SystemParams):
    """LT of other-BS interference at a UE served at r_o meters, normalized
    by the serving power P_b r_o^(-eta).

    Nearest-BS association excludes interferers inside r_o.  ``s`` and
    ``r_o`` broadcast against each other.
    """
    s_arr = _as_float_array(s)
    r_arr = _as_float_array(r_o, "r_o")
    if np.any(r_arr <= 0.0):
        raise ValueError("r_o must be positive")
    b = 1.0 - 2.0 / p.eta
    pref = 2.0 * math.pi * p.lambda_per_m2 / (p.eta - 2.0)
    out = np.exp(-pref * r_arr ** 2 * s_arr * hyp2f1_special(b, s_arr))
    return float(out) if out.ndim == 0 else out


def lt_ue_on_downlink(s, r_o, factors: InterferenceFactors, p: SystemParams):
    """LT of UE-driven interference at a UE served at r_o meters, normalized
    by P_b r_o^(-eta).

    Interfering UEs are approximated as collocated with their BSs, each
    excluded inside its own inversion radius (P_u/rho)^(1/eta); averaging
    over P_u leaves E[P_u^(2/eta)] in front and a P_u-free 2F1 argument.
    """
    s_arr = _as_float_array(s)
    r_arr = _as_float_array(r_o, "r_o")
    if np.any(r_arr <= 0.0):
        raise ValueError("r_o must be positive")
    b = 1.0 - 2.0 / p.eta
    isq = factors.i_ud_sq
    moment = uplink_power_moment(2.0 / p.eta, p)
    pref = (2.0 * math.pi * p.lambda_per_m2 * moment
            * p.rho ** (1.0 - 2.0 / p.eta) / ((p.eta - 2.0) * p.p_b))
    scale = isq * r_arr ** p.eta
    arg = s_arr * scale * (p.rho / p.p_b)
    out = np.exp(-pref * s_arr * scale * hyp2f1_special(b, arg))
    return float(out) if out.ndim == 0 else out


def hamdi_average(lt_y, omega1: float, omega2: float, b_const: float,
                  spec: QuadratureSpec = DEFAULT_QUADRATURE) -> float:
    """E[omega1 erfc(sqrt(omega2 x/(y+b)))] for x ~ Exp(1) via the LT of y.

    ``lt_y`` must accept ndarray arguments and return values in (0, 1].
    The result is clipped to [0, omega1] against quadrature roundoff.
    """
    if omega1 <= 0.0 or omega2 <= 0.0:
        raise ValueError("omega1 and omega2 must be positive")
    if b_const < 0.0:
        raise ValueError("b_const must be nonnegative")
    decay = 1.0 + b_const / omega2

    def integrand(z):
        return lt_y(z / omega2) * np.exp(-decay * z) / np.sqrt(z)

    integral = integrate_semi_infinite(integrand, spec, decay_rate=decay)
    ber = omega1 - (omega1 / math.sqrt(math.pi)) * integral
    return float(min(max(ber, 0.0), omega1))


def ber_uplink(alpha: float, factors: InterferenceFactors, p: SystemParams,
               spec: QuadratureSpec = DEFAULT_QUADRATURE) -> LinkMetrics:
    """Spatially averaged uplink BER and throughput at overlap ``alpha``."""
    _check_alpha(alpha)
    omega1, omega2 = p.omega(Direction.UPLINK)
    sigma_sq = noise_variance(p).sigma_n_sq
    b_const = (p.beta * p.p_b * factors.i_su_sq + sigma_sq) / p.rho

    def lt(s):
        return lt_bs_on_uplink(s, factors, p) * lt_ue_on_uplink(s, p)

    ber = hamdi_average(lt, omega1, omega2, b_const, spec)
    return _metrics(Direction.UPLINK, alpha, ber, p)


def ber_uplink_eta4(alpha: float, factors: InterferenceFactors,
                    p: SystemParams,
                    spec: QuadratureSpec = DEFAULT_QUADRATURE) -> LinkMetrics:
    """eta = 4 closed form of the uplink BER (arctan in place of 2F1)."""
    _require_eta4(p)
    _check_alpha(alpha)
    omega1, omega2 = p.omega(Direction.UPLINK)
    sigma_sq = noise_variance(p).sigma_n_sq
    b_const = (p.beta * p.p_b * factors.i_su_sq + sigma_sq) / p.rho
    e_sqrt_pu = uplink_power_moment(0.5, p)
    cross = 0.5 * math.pi * math.sqrt(p.p_b * factors.i_du_sq)
    pi_lam = math.pi * p.lambda_per_m2

    def lt(s):
        s = np.asarray(s, dtype=float)
        term = e_sqrt_pu * np.arctan(np.sqrt(s)) + cross
        return np.exp(-pi_lam * np.sqrt(s / p.rho) * term)

    ber = hamdi_average(lt, omega1, omega2, b_const, spec)
    return _metrics(Direction.UPLINK, alpha, ber, p)


def ber_downlink(alpha: float, factors: InterferenceFactors, p: SystemParams,
                 spec: QuadratureSpec = DEFAULT_QUADRATURE) -> LinkMetrics:
    """Spatially averaged downlink BER and throughput at overlap ``alpha``.

    Double integral: the averaging identity's z integral outside, the
    serving-distance average inside, with the interference LT conditioned
    on r_o.
    """
    _check_alpha(alpha)

    def lt_d(s_col, r_row):
        return (lt_bs_on_downlink(s_col, r_row, p)
                * lt_ue_on_downlink(s_col, r_row, factors, p))

    ber = _ber_downlink_core(factors, p, spec, lt_d)
    return _metrics(Direction.DOWNLINK, alpha, ber, p)


def ber_downlink_eta4(alpha: float, factors: InterferenceFactors,
                      p: SystemParams,
                      spec: QuadratureSpec = DEFAULT_QUADRATURE) -> LinkMetrics:
    """eta = 4 closed form of the downlink BER."""
    _require_eta4(p)
    _check_alpha(alpha)
    e_sqrt_pu = uplink_power_moment(0.5, p)
    pi_lam = math.pi * p.lambda_per_m2
    ud_scale = math.sqrt(factors.i_ud_sq / p.p_b)

    def lt_d(s_col, r_row):
        rt_s = np.sqrt(s_col)
        ue_term = ud_scale * e_sqrt_pu * np.arctan(
            r_row ** 2 * rt_s * math.sqrt(p.rho * factors.i_ud_sq / p.p_b))
        bs_term = np.arctan(rt_s)
        return np.exp(-pi_lam * rt_s * r_row ** 2 * (ue_term + bs_term))

    ber = _ber_downlink_core(factors, p, spec, lt_d)
    return _metrics(Direction.DOWNLINK, alpha, ber, p)


def _ber_downlink_core(factors: InterferenceFactors, p: SystemParams,
                       spec: QuadratureSpec, lt_d) -> float:
    """Shared double-integral driver for the downlink BER.

    ``lt_d(s, r)`` is the conditional interference LT, broadcasting a
    column of s values against a row of serving distances in meters.
    """
    omega1, omega2 = p.omega(Direction.DOWNLINK)
    sigma_sq = noise_variance(p).sigma_n_sq
    r_max = max_inversion_radius_m(p)
    pi_lam = math.pi * p.lambda_per_m2
    norm = -math.expm1(-pi_lam * r_max * r_max)
    inner_spec = QuadratureSpec(
        rel_tol=max(0.01 * spec.rel_tol, 1e-13),
        abs_tol=max(0.01 * spec.abs_tol, 1e-15),
        max_subdivisions=spec.max_subdivisions)

    def averaged_lt(z):
        # E over the serving distance of L(z/w2 | r) e^(-z b(r)/w2), where
        # b(r) = (beta rho |I_sd|^2 r^(2 eta) + sigma^2 r^eta) / P_b
        z_col = np.atleast_1d(np.asarray(z, dtype=float))[:, None]

        def g(r):
            density = 2.0 * pi_lam * r * np.exp(-pi_lam * r * r) / norm
            b_r = (p.beta * p.rho * factors.i_sd_sq * r ** (2.0 * p.eta)
                   + sigma_sq * r ** p.eta) / p.p_b
            return density * lt_d(z_col / omega2, r) * np.exp(
                -z_col * b_r / omega2)

        return adaptive_quad_batch(g, 0.0, r_max, inner_spec)

    def outer(z):
        z = np.asarray(z, dtype=float)
        return averaged_lt(z) * np.exp(-z) / np.sqrt(z)

    integral = integrate_semi_infinite(outer, spec, decay_rate=1.0)
    ber = omega1 - (omega1 / math.sqrt(math.pi)) * integral
    return float(min(max(ber, 0.0), omega1))


def _check_alpha(alpha: float) -> None:
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")


def _require_eta4(p: SystemParams) -> None:
    if p.eta != 4.0:
        raise ValueError(f"eta = 4 specialization called with eta = {p.eta}")
