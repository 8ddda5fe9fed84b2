"""Independent oracles for the closed-form interference and BER layer.

Two oracle families, both deliberately avoiding the package's own
quadrature and hypergeometric kernels:

* Monte Carlo estimators that realize the marked point processes the
  Laplace transforms summarize: Poisson patterns on a finite disk,
  unit-mean exponential fading per point, power control with its
  exclusion thinning, and an exact multiplicative correction for the
  aggregate beyond the disk.  Beyond-disk points are independent of
  in-disk ones and their aggregate LT is a deterministic integral, so
  the truncation introduces no bias at any disk radius.

* Brute-force scipy quadrature of the defining integrals (the PGFL
  exponent written directly as a distance integral, with the transmit
  power averaged over the serving-distance law), giving deterministic
  near-machine references for the same quantities.
"""

import math

import numpy as np
from scipy import integrate, special

from alphaduplex.model import (
    Direction,
    SystemParams,
    max_inversion_radius_m,
    noise_variance,
)
from alphaduplex.pulse import InterferenceFactors

DISK_RADIUS_M = 10_000.0
_CHUNK_POINTS = 2_000_000


def serving_distance_inverse_cdf(u, p: SystemParams):
    """Map uniforms in [0, 1) to serving distances in meters.

    Inverts the truncated-Rayleigh law of the nearest-BS distance
    conditioned on lying within the inversion radius.
    """
    lam = p.lambda_per_m2
    c = math.pi * lam * max_inversion_radius_m(p) ** 2
    u = np.asarray(u, dtype=float)
    return np.sqrt(-np.log1p(u * np.expm1(-c)) / (math.pi * lam))


def _power_nodes(p: SystemParams, order: int = 64):
    """Gauss-Legendre nodes and weights for expectations over P_u."""
    nodes, weights = np.polynomial.legendre.leggauss(order)
    u = 0.5 * (nodes + 1.0)
    w = 0.5 * weights
    powers = p.rho * serving_distance_inverse_cdf(u, p) ** p.eta
    return powers, w


def _tail_exponent(s: float, coeff_of_power, p: SystemParams,
                   r_min: float = DISK_RADIUS_M) -> float:
    """PGFL exponent of the aggregate beyond r_min.

    2 pi lam int_{r_min}^inf E_P[ s c(P) x^-eta / (1 + s c(P) x^-eta) ] x dx
    where c(P) = coeff_of_power(P) is the per-point LT coefficient.
    """
    lam = p.lambda_per_m2
    powers, w = _power_nodes(p)
    coeffs = np.broadcast_to(
        np.asarray(coeff_of_power(powers), dtype=float), powers.shape)

    def integrand(x):
        t = s * coeffs * x ** (-p.eta)
        return float(np.sum(w * (t / (1.0 + t)))) * x

    val, _ = integrate.quad(integrand, r_min, np.inf,
                            epsabs=1e-14, epsrel=1e-10, limit=200)
    return 2.0 * math.pi * lam * val


def _mc_exp_mean(rng, n_patterns: int, mean_count: float, draw_contrib, s):
    """Mean and standard error of exp(-s Y) over Poisson patterns.

    Y sums h_i * contrib_i over the points of one pattern, h_i unit-mean
    exponential.  draw_contrib(rng, total) returns the per-point factors
    (zero meaning the point is thinned out).
    """
    acc = 0.0
    acc_sq = 0.0
    done = 0
    per_chunk = max(1, int(_CHUNK_POINTS / max(mean_count, 1.0)))
    while done < n_patterns:
        nb = min(per_chunk, n_patterns - done)
        counts = rng.poisson(mean_count, size=nb)
        total = int(counts.sum())
        owner = np.repeat(np.arange(nb), counts)
        contrib = draw_contrib(rng, total)
        h = rng.exponential(1.0, size=total)
        y = np.bincount(owner, weights=h * contrib, minlength=nb)
        vals = np.exp(-s * y)
        acc += float(vals.sum())
        acc_sq += float(vals @ vals)
        done += nb
    mean = acc / n_patterns
    var = max(acc_sq / n_patterns - mean * mean, 0.0)
    var *= n_patterns / max(n_patterns - 1, 1)
    return mean, math.sqrt(var / n_patterns)


def _disk_positions(rng, total: int):
    # floor keeps a point landing exactly at the origin from producing nan
    x = DISK_RADIUS_M * np.sqrt(rng.random(total))
    return np.maximum(x, 1e-9)


def lt_oracle_bs_on_uplink(s: float, factors: InterferenceFactors,
                           p: SystemParams, n_patterns: int, seed: int):
    """MC estimate of the BS-driven uplink interference LT: (value, se)."""
    rng = np.random.default_rng(seed)
    a = p.p_b * factors.i_du_sq / p.rho
    mean_count = p.lambda_per_m2 * math.pi * DISK_RADIUS_M ** 2

    def draw(rng, total):
        return a * _disk_positions(rng, total) ** (-p.eta)

    mean, se = _mc_exp_mean(rng, n_patterns, mean_count, draw, s)
    corr = math.exp(-_tail_exponent(s, lambda powers: a, p))
    return mean * corr, se * corr


def lt_oracle_ue_on_uplink(s: float, p: SystemParams,
                           n_patterns: int, seed: int):
    """MC estimate of the UE-driven uplink interference LT: (value, se).

    Each interferer carries its own serving distance; it contributes only
    if it lies beyond its inversion radius, else power control would have
    handed it to the tagged BS.
    """
    rng = np.random.default_rng(seed)
    mean_count = p.lambda_per_m2 * math.pi * DISK_RADIUS_M ** 2

    def draw(rng, total):
        x = _disk_positions(rng, total)
        r_serv = serving_distance_inverse_cdf(rng.random(total), p)
        return np.where(x > r_serv, r_serv ** p.eta * x ** (-p.eta), 0.0)

    mean, se = _mc_exp_mean(rng, n_patterns, mean_count, draw, s)
    corr = math.exp(-_tail_exponent(s, lambda powers: powers / p.rho, p))
    return mean * corr, se * corr


def lt_oracle_bs_on_downlink(s: float, r_o: float, p: SystemParams,
                             n_patterns: int, seed: int):
    """MC estimate of the other-BS downlink LT at serving distance r_o."""
    rng = np.random.default_rng(seed)
    area = math.pi * (DISK_RADIUS_M ** 2 - r_o ** 2)
    mean_count = p.lambda_per_m2 * area

    def draw(rng, total):
        u = rng.random(total)
        x = np.sqrt(r_o ** 2 + u * (DISK_RADIUS_M ** 2 - r_o ** 2))
        return (x / r_o) ** (-p.eta)

    mean, se = _mc_exp_mean(rng, n_patterns, mean_count, draw, s)
    corr = math.exp(-_tail_exponent(s, lambda powers: r_o ** p.eta, p))
    return mean * corr, se * corr


def lt_oracle_ue_on_downlink(s: float, r_o: float,
                             factors: InterferenceFactors, p: SystemParams,
                             n_patterns: int, seed: int):
    """MC estimate of the UE-driven downlink LT at serving distance r_o.

    Interfering UEs sit at their BSs' positions and are excluded inside
    their own inversion radius.
    """
    rng = np.random.default_rng(seed)
    mean_count = p.lambda_per_m2 * math.pi * DISK_RADIUS_M ** 2
    scale = factors.i_ud_sq * r_o ** p.eta / p.p_b

    def draw(rng, total):
        x = _disk_positions(rng, total)
        r_serv = serving_distance_inverse_cdf(rng.random(total), p)
        power = p.rho * r_serv ** p.eta
        return np.where(x > r_serv, scale * power * x ** (-p.eta), 0.0)

    mean, se = _mc_exp_mean(rng, n_patterns, mean_count, draw, s)
    corr = math.exp(-_tail_exponent(s, lambda powers: scale * powers, p))
    return mean * corr, se * corr


def hamdi_oracle_exp(omega1: float, omega2: float, b_const: float,
                     mean_y: float, n_samples: int, seed: int,
                     chunk: int = 5_000_000):
    """MC estimate of E[w1 erfc(sqrt(w2 x/(y+b)))]: (value, se).

    x is unit-mean exponential; y is exponential with the given mean, so
    its LT is 1/(1 + mean_y z).
    """
    rng = np.random.default_rng(seed)
    acc = 0.0
    acc_sq = 0.0
    done = 0
    while done < n_samples:
        nb = min(chunk, n_samples - done)
        x = rng.exponential(1.0, nb)
        y = rng.exponential(mean_y, nb)
        vals = omega1 * special.erfc(np.sqrt(omega2 * x / (y + b_const)))
        acc += float(vals.sum())
        acc_sq += float(vals @ vals)
        done += nb
    mean = acc / n_samples
    var = max(acc_sq / n_samples - mean * mean, 0.0)
    var *= n_samples / max(n_samples - 1, 1)
    return mean, math.sqrt(var / n_samples)


# ---------------------------------------------------------------------------
# Deterministic brute-force quadrature of the defining PGFL integrals.
# ---------------------------------------------------------------------------

def _serving_density_m(r, p: SystemParams):
    lam = p.lambda_per_m2
    c = math.pi * lam * max_inversion_radius_m(p) ** 2
    return (2.0 * math.pi * lam * r * np.exp(-math.pi * lam * r * r)
            / (-math.expm1(-c)))


def lt_brute_bs_on_uplink(s: float, factors: InterferenceFactors,
                          p: SystemParams) -> float:
    a = s * p.p_b * factors.i_du_sq / p.rho
    if a == 0.0:
        return 1.0

    def g(x):
        t = a * x ** (-p.eta)
        return (t / (1.0 + t)) * x

    val, _ = integrate.quad(g, 0.0, np.inf,
                            epsabs=1e-14, epsrel=1e-11, limit=200)
    return math.exp(-2.0 * math.pi * p.lambda_per_m2 * val)


def lt_brute_ue_on_uplink(s: float, p: SystemParams) -> float:
    r_max = max_inversion_radius_m(p)

    def inner(r_serv):
        c = s * r_serv ** p.eta

        def g(x):
            t = c * x ** (-p.eta)
            return (t / (1.0 + t)) * x

        val, _ = integrate.quad(g, r_serv, np.inf,
                                epsabs=1e-14, epsrel=1e-11, limit=200)
        return val * float(_serving_density_m(r_serv, p))

    outer, _ = integrate.quad(inner, 0.0, r_max,
                              epsabs=1e-14, epsrel=1e-10, limit=200)
    return math.exp(-2.0 * math.pi * p.lambda_per_m2 * outer)


def lt_brute_bs_on_downlink(s: float, r_o: float, p: SystemParams) -> float:
    def g(x):
        t = s * (x / r_o) ** (-p.eta)
        return (t / (1.0 + t)) * x

    val, _ = integrate.quad(g, r_o, np.inf,
                            epsabs=1e-14, epsrel=1e-11, limit=200)
    return math.exp(-2.0 * math.pi * p.lambda_per_m2 * val)


def lt_brute_ue_on_downlink(s: float, r_o: float,
                            factors: InterferenceFactors,
                            p: SystemParams) -> float:
    r_max = max_inversion_radius_m(p)
    base = s * factors.i_ud_sq * r_o ** p.eta / p.p_b
    if base == 0.0:
        return 1.0

    def inner(r_serv):
        c = base * p.rho * r_serv ** p.eta

        def g(x):
            t = c * x ** (-p.eta)
            return (t / (1.0 + t)) * x

        val, _ = integrate.quad(g, r_serv, np.inf,
                                epsabs=1e-14, epsrel=1e-11, limit=200)
        return val * float(_serving_density_m(r_serv, p))

    outer, _ = integrate.quad(inner, 0.0, r_max,
                              epsabs=1e-14, epsrel=1e-10, limit=200)
    return math.exp(-2.0 * math.pi * p.lambda_per_m2 * outer)


# ---------------------------------------------------------------------------
# Independent scipy evaluation of the assembled BER integrals.  Reuses the
# package's LT closed forms (validated separately above) but none of its
# quadrature machinery.
# ---------------------------------------------------------------------------

def ber_uplink_scipy_reference(factors: InterferenceFactors,
                               p: SystemParams) -> float:
    from alphaduplex.analytic import lt_bs_on_uplink, lt_ue_on_uplink

    w1, w2 = p.omega(Direction.UPLINK)
    sigma_sq = noise_variance(p).sigma_n_sq
    b_const = (p.beta * p.p_b * factors.i_su_sq + sigma_sq) / p.rho
    decay = 1.0 + b_const / w2

    def g(t):            # z = t^2 removes the 1/sqrt(z) endpoint
        z = t * t
        lt = lt_bs_on_uplink(z / w2, factors, p) * lt_ue_on_uplink(z / w2, p)
        return 2.0 * lt * math.exp(-decay * z)

    val, _ = integrate.quad(g, 0.0, np.inf,
                            epsabs=1e-13, epsrel=1e-11, limit=200)
    return w1 - (w1 / math.sqrt(math.pi)) * val


def ber_downlink_scipy_reference(factors: InterferenceFactors,
                                 p: SystemParams) -> float:
    from alphaduplex.analytic import lt_bs_on_downlink, lt_ue_on_downlink

    w1, w2 = p.omega(Direction.DOWNLINK)
    sigma_sq = noise_variance(p).sigma_n_sq
    r_max = max_inversion_radius_m(p)

    def averaged_lt(z):
        def g(r):
            b_r = (p.beta * p.rho * factors.i_sd_sq * r ** (2.0 * p.eta)
                   + sigma_sq * r ** p.eta) / p.p_b
            return (float(_serving_density_m(r, p))
                    * lt_bs_on_downlink(z / w2, r, p)
                    * lt_ue_on_downlink(z / w2, r, factors, p)
                    * math.exp(-z * b_r / w2))

        val, _ = integrate.quad(g, 0.0, r_max,
                                epsabs=1e-13, epsrel=1e-9, limit=200)
        return val

    def outer(t):        # z = t^2
        z = t * t
        return 2.0 * averaged_lt(z) * math.exp(-z)

    val, _ = integrate.quad(outer, 0.0, 10.0,
                            epsabs=1e-12, epsrel=1e-9, limit=200)
    return w1 - (w1 / math.sqrt(math.pi)) * val
