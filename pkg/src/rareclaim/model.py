"""Probability model underlying the posterior for a rare-event claim.

Two latent rates drive everything: ``v``, the per-event probability that
the rare outcome actually occurs, and ``d``, the per-testimony error
probability (symmetric: a witness misreports rare as common exactly as
often as common as rare). Both get rectangular uniform hyperpriors. The
observed data are one testimony asserting the rare event, ``n``
testimonies asserting the common event, and optionally ``l`` further
rare-event testimonies whose underlying events are known to have been
common (known-false testimonies).

Marginalizing the unknown true outcomes behind the ``n`` common-event
testimonies yields the kernel

    s_n(v, d) = (1 - v - d + 2 v d)^n

and the two unnormalized evidence integrands over (v, d)

    rare branch:    v * (1 - v)^l * (1 - d) * d^l * s_n
    common branch:  (1 - v)^(l+1) * d^(l+1) * s_n

whose integrals over the prior box form the posterior odds for the
assessed event. Everything here is evaluated in the log domain because
for n ~ 10^6 the integrands underflow double precision by hundreds of
orders of magnitude.

All functions are pure, accept scalars or equal-shape numpy arrays for
``v`` and ``d``, and are safe to call concurrently.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "PriorSpec",
    "Evidence",
    "LogIntegrandPoint",
    "s_n",
    "log_s_n",
    "log_integrand_w",
    "log_integrand_b",
    "log_weight_marginal",
    "weight_point",
]


@dataclass(frozen=True)
class PriorSpec:
    """Rectangular uniform hyperprior box for (v, d).

    The uniform densities are constant over the box and cancel in every
    posterior ratio, so they are never materialized; the box enters the
    computation only as integration bounds.
    """

    v_lo: float = 0.0
    v_hi: float = 1.0
    d_lo: float = 0.0
    d_hi: float = 0.2

    def __post_init__(self) -> None:
        if not (0.0 <= self.v_lo < self.v_hi <= 1.0):
            raise ValueError(
                f"rare-event rate bounds must satisfy 0 <= v_lo < v_hi <= 1, "
                f"got [{self.v_lo}, {self.v_hi}]"
            )
        if not (0.0 <= self.d_lo < self.d_hi <= 1.0):
            raise ValueError(
                f"error rate bounds must satisfy 0 <= d_lo < d_hi <= 1, "
                f"got [{self.d_lo}, {self.d_hi}]"
            )


@dataclass(frozen=True)
class Evidence:
    """Testimony counts: ``n`` for the common event, ``l`` known-false
    rare-event testimonies. The single live testimony for the rare event
    under assessment is implicit and always present."""

    n: int
    l: int = 0

    def __post_init__(self) -> None:
        for name in ("n", "l"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or isinstance(value, bool):
                raise ValueError(f"{name} must be an integer, got {value!r}")
            if value < 0:
                raise ValueError(f"{name} must be nonnegative, got {value}")


@dataclass(frozen=True)
class LogIntegrandPoint:
    """One stable log-domain integrand evaluation: ``log_value`` is -inf
    exactly where the plain-domain integrand is zero."""

    log_value: float
    at: tuple[float, float]

    def __post_init__(self) -> None:
        if math.isnan(self.log_value):
            raise ValueError(f"integrand log-value is NaN at {self.at}")


def _ret(out):
    """Return python floats for scalar inputs, arrays otherwise."""
    return float(out) if np.ndim(out) == 0 else out


def log_s_n(v, d, n: int):
    """n * ln(1 - v - d + 2vd), the log of the marginal kernel.

    The base is evaluated as log1p(-(v + d - 2vd)) so that near the
    (0, 0) mass concentration the log is accurate to relative rounding
    error even when multiplied by n ~ 10^6. Returns 0 for n = 0 at every
    point (empty product) and -inf where the base vanishes, i.e. at
    (v, d) = (1, 0) or (0, 1).
    """
    v = np.asarray(v, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    if n == 0:
        return _ret(np.zeros(np.broadcast_shapes(v.shape, d.shape)))
    x = np.clip(v + d - 2.0 * v * d, 0.0, 1.0)
    with np.errstate(divide="ignore"):
        out = n * np.log1p(-x)
    return _ret(out)


def s_n(v, d, n: int):
    """(1 - v - d + 2vd)^n, the probability that one slot's testimony
    reports the common event, to the n-th power. Underflows to 0.0 for
    large n; use log_s_n where that matters."""
    return _ret(np.exp(log_s_n(v, d, n)))


def log_integrand_w(v, d, evidence: Evidence):
    """Log of the rare-branch evidence integrand
    v * (1-v)^l * (1-d) * d^l * s_n.

    The l-powered factors are dropped entirely when l = 0 (empty
    product), so d = 0 does not produce 0*log(0) artifacts.
    """
    v = np.asarray(v, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    with np.errstate(divide="ignore"):
        out = np.log(v) + np.log1p(-d) + log_s_n(v, d, evidence.n)
        if evidence.l:
            out = out + evidence.l * (np.log1p(-v) + np.log(d))
    return _ret(out)


def log_integrand_b(v, d, evidence: Evidence):
    """Log of the common-branch evidence integrand
    (1-v)^(l+1) * d^(l+1) * s_n."""
    v = np.asarray(v, dtype=np.float64)
    d = np.asarray(d, dtype=np.float64)
    with np.errstate(divide="ignore"):
        out = (evidence.l + 1) * (np.log1p(-v) + np.log(d)) + log_s_n(
            v, d, evidence.n
        )
    return _ret(out)


def log_weight_marginal(v, d, evidence: Evidence):
    """Log of the posterior density over (v, d) with the assessed
    outcome marginalized out, up to normalization:

        [v(1-d) + (1-v)d] * (1-v)^l * d^l * s_n

    computed as a stable log-sum-exp of the two branch integrands.
    """
    return _ret(
        np.logaddexp(
            log_integrand_w(v, d, evidence), log_integrand_b(v, d, evidence)
        )
    )


def weight_point(v: float, d: float, evidence: Evidence) -> LogIntegrandPoint:
    """Evaluate the marginal weight at a single point, as a record."""
    return LogIntegrandPoint(
        log_value=float(log_weight_marginal(v, d, evidence)),
        at=(float(v), float(d)),
    )
