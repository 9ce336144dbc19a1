"""Entropy, stochastic distances, and their product.

shannon_entropy returns the differential entropy -int f ln f in nats on
the raw intensity scale.  hellinger_distance is 1 minus the integral of
the geometric mean of two densities, computed in log space because the
working intensity scales (means near 0.03) underflow direct products.
complexity is the plain product of an entropy and a distance.

Note on orientation: at those intensity scales differential entropies
are negative, and they increase with texture.  The feature pipeline
(features, cli) therefore reports the negated value, which is positive
for the laws of interest and decreases with texture; see
pipeline_entropy.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import distributions
from ._kernels import impl, pykernels
from .distributions import G0Params, GammaParams
from .errors import NumericalError, QuadratureError
from .specfun import QuadratureConfig

__all__ = [
    "InformationMeasures",
    "shannon_entropy",
    "pipeline_entropy",
    "hellinger_distance",
    "hphi_divergence",
    "complexity",
]


@dataclass(frozen=True)
class InformationMeasures:
    """An entropy, a distance in [0, 1], and their product."""

    entropy: float
    distance: float
    complexity: float

    def __post_init__(self):
        if not 0.0 <= self.distance <= 1.0:
            raise ValueError("distance must lie in [0, 1]")
        if self.complexity != self.entropy * self.distance:
            raise ValueError("complexity must equal entropy * distance")

    @classmethod
    def from_pair(cls, entropy: float, distance: float) -> "InformationMeasures":
        return cls(entropy=entropy, distance=distance, complexity=entropy * distance)


def _default_hint(p) -> float:
    """A point near the density's mass, used to scale the quadrature map."""
    if isinstance(p, GammaParams):
        return p.sigma2
    if isinstance(p, G0Params):
        if p.alpha < -1.0:
            return p.mean()
        if p.looks > 1.0:
            return (p.looks - 1.0) * p.gamma / (p.looks * (1.0 - p.alpha))
        return p.gamma / p.looks
    return 1.0


def _log_density_fn(p) -> Callable[[np.ndarray], np.ndarray]:
    if isinstance(p, GammaParams):
        return lambda z: distributions.gamma_log_density(z, p)
    if isinstance(p, G0Params):
        return lambda z: distributions.g0_log_density(z, p)
    if callable(p):
        return p
    raise TypeError("expected GammaParams, G0Params, or a log-density callable")


def _integrate_unit(fvec, cfg: QuadratureConfig, what: str):
    value, error, ok = pykernels.adaptive_unit(
        fvec, cfg.rel_tol, cfg.abs_tol, cfg.max_subdivisions
    )
    if not ok:
        raise QuadratureError(
            f"{what} did not converge within {cfg.max_subdivisions} subdivisions "
            f"(estimate {value!r}, error bound {error!r})",
            value=value,
            error=error,
        )
    return value, error


def _check_normalized(logf, hint: float, cfg: QuadratureConfig):
    def fvec(t):
        om = 1.0 - t
        z = hint * t / om
        return np.exp(logf(z)) * (hint / (om * om))

    total, _ = _integrate_unit(fvec, cfg, "normalization check")
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"density integrates to {total!r}, expected 1 within 1e-6")


def shannon_entropy(density, cfg: QuadratureConfig | None = None, scale_hint=None):
    """Differential entropy -int f ln f dz in nats over (0, inf).

    density is GammaParams, G0Params, or a callable returning the log
    density on arrays of positive points.  Callables must be normalized;
    this is the caller's responsibility and is checked within 1e-6.
    The integrand is taken as 0 wherever f underflows to 0.
    """
    cfg = cfg if cfg is not None else QuadratureConfig()
    hint = float(scale_hint) if scale_hint is not None else _default_hint(density)
    if not (math.isfinite(hint) and hint > 0.0):
        raise ValueError("scale hint must be finite and positive")
    if isinstance(density, G0Params):
        value, error, ok = impl.g0_entropy(
            density.alpha,
            density.gamma,
            density.looks,
            hint,
            cfg.rel_tol,
            cfg.abs_tol,
            cfg.max_subdivisions,
        )
        if not ok:
            raise QuadratureError(
                f"entropy quadrature did not converge (estimate {value!r})",
                value=value,
                error=error,
            )
        return value
    logf = _log_density_fn(density)
    if not isinstance(density, GammaParams):
        _check_normalized(logf, hint, cfg)

    def fvec(t):
        om = 1.0 - t
        z = hint * t / om
        lf = logf(z)
        w = hint / (om * om)
        return np.where(lf > -740.0, -np.exp(lf) * lf, 0.0) * w

    value, _ = _integrate_unit(fvec, cfg, "entropy quadrature")
    return value


def pipeline_entropy(p: G0Params, cfg=None, scale_hint=None) -> float:
    """Entropy with the feature-pipeline orientation: the negated
    differential entropy, positive at working intensity scales and
    decreasing as texture grows."""
    return -shannon_entropy(p, cfg, scale_hint)


def _clamp_or_raise(d: float, err: float) -> float:
    clamped, ok = pykernels.clamp_unit(d, err)
    if not ok:
        raise NumericalError(
            f"distance {d!r} outside [0, 1] beyond quadrature slack {err!r}"
        )
    return clamped


def hellinger_distance(p, q, cfg: QuadratureConfig | None = None, scale_hint=None):
    """Hellinger distance 1 - int sqrt(f_p f_q) dz in [0, 1].

    The geometric-mean integrand is evaluated in log space.  The pair
    (heavy-tailed, Gamma) at equal looks takes the specialized kernel;
    any other combination of parameter sets or log-density callables
    goes through the generic route.  Results are clamped to [0, 1] only
    when they overshoot by no more than the quadrature slack.
    """
    cfg = cfg if cfg is not None else QuadratureConfig()
    pair = None
    if isinstance(p, G0Params) and isinstance(q, GammaParams):
        pair = (p, q)
    elif isinstance(q, G0Params) and isinstance(p, GammaParams):
        pair = (q, p)
    if pair is not None and pair[0].looks == pair[1].looks:
        g0p, gap = pair
        hint = float(scale_hint) if scale_hint is not None else gap.sigma2
        if not (math.isfinite(hint) and hint > 0.0):
            raise ValueError("scale hint must be finite and positive")
        d, err, ok = impl.hellinger_g0_gamma(
            g0p.alpha,
            g0p.gamma,
            g0p.looks,
            gap.sigma2,
            hint,
            cfg.rel_tol,
            cfg.abs_tol,
            cfg.max_subdivisions,
        )
        if not ok:
            raise QuadratureError(
                f"distance quadrature did not converge (estimate {d!r})",
                value=d,
                error=err,
            )
        return _clamp_or_raise(d, err)

    lp = _log_density_fn(p)
    lq = _log_density_fn(q)
    if scale_hint is not None:
        hint = float(scale_hint)
    else:
        hint = 0.5 * (_default_hint(p) + _default_hint(q))
    if not (math.isfinite(hint) and hint > 0.0):
        raise ValueError("scale hint must be finite and positive")

    def fvec(t):
        om = 1.0 - t
        z = hint * t / om
        return np.exp(0.5 * (lp(z) + lq(z))) * (hint / (om * om))

    affinity, err = _integrate_unit(fvec, cfg, "distance quadrature")
    return _clamp_or_raise(1.0 - affinity, err)


def hphi_divergence(
    fp,
    fq,
    h: Callable[[float], float],
    phi: Callable[[np.ndarray], np.ndarray],
    cfg: QuadratureConfig | None = None,
    scale_hint=None,
):
    """General divergence h( int phi(f_p/f_q) f_q dz ).

    phi must be convex with phi(1) = 0 and act elementwise on arrays;
    h is a scalar monotone map.  Conventions: 0*phi(0/0) = 0 where both
    densities underflow, and where only f_q underflows the integrand is
    f_p * lim phi(x)/x (evaluated at the largest representable ratio).
    A diverging limit makes the integrand overflow and raises.
    """
    cfg = cfg if cfg is not None else QuadratureConfig()
    lpf = _log_density_fn(fp)
    lqf = _log_density_fn(fq)
    if scale_hint is not None:
        hint = float(scale_hint)
    else:
        hint = 0.5 * (_default_hint(fp) + _default_hint(fq))
    if not (math.isfinite(hint) and hint > 0.0):
        raise ValueError("scale hint must be finite and positive")

    def fvec(t):
        om = 1.0 - t
        z = hint * t / om
        lp = lpf(z)
        lq = lqf(z)
        w = hint / (om * om)
        log_ratio = lp - lq
        with np.errstate(over="ignore", invalid="ignore"):
            # the lower clip keeps exp above the denormal floor so phi
            # never sees an exact zero ratio
            ratio = np.exp(np.clip(log_ratio, -700.0, 700.0))
            vals = np.asarray(phi(ratio), dtype=np.float64) * np.exp(lq)
        dead_q = lq <= -740.0
        both_dead = dead_q & (lp <= -740.0)
        # where the reference vanished, or the ratio outgrew the clip,
        # phi(x) f_q = (phi(x)/x) f_p with the slope frozen at the
        # largest representable ratio
        limit_zone = (dead_q | (log_ratio > 700.0)) & ~both_dead
        if np.any(limit_zone):
            x_big = math.exp(700.0)
            with np.errstate(over="ignore", invalid="ignore"):
                slope = float(phi(np.asarray([x_big]))[0]) / x_big
                vals = np.where(limit_zone, slope * np.exp(lp), vals)
        vals = np.where(both_dead, 0.0, vals)
        if not np.all(np.isfinite(vals)):
            raise NumericalError(
                "divergence integrand overflowed; phi grows faster than "
                "linearly where the reference density vanishes"
            )
        return vals * w

    value, _ = _integrate_unit(fvec, cfg, "divergence quadrature")
    return h(value)


def complexity(entropy: float, distance: float) -> float:
    """Product of an entropy and a distance."""
    if not (math.isfinite(entropy) and math.isfinite(distance)):
        raise ValueError("entropy and distance must be finite")
    return entropy * distance
