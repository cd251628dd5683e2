"""Headline quantities: the assessed-event posterior, posterior means
of the two latent rates, and the large-n reference value."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import Evidence, PriorSpec, log_integrand_b, log_integrand_w, log_weight_marginal
from .quadrature import LogIntegral, NonConvergence, QuadratureSpec, log_integrate_2d, log_ratio

__all__ = [
    "PosteriorResult",
    "MeansResult",
    "posterior",
    "posterior_means",
    "asymptote",
]


@dataclass(frozen=True)
class PosteriorResult:
    """Posterior probability of the rare event with its log-evidence
    terms. ``converged`` is False when the quadrature had to stop at
    its refinement limit and ``p`` is best-effort."""

    p: float
    log_jw: float
    log_jb: float
    abs_err: float
    converged: bool = True


@dataclass(frozen=True)
class MeansResult:
    """Posterior means of the rare-event rate and the testimony error
    rate under the full evidence."""

    mean_v: float
    mean_d: float
    abs_err_v: float
    abs_err_d: float
    converged: bool = True


def _integrate(f, prior, spec) -> tuple[LogIntegral, bool]:
    try:
        return log_integrate_2d(f, prior, spec), True
    except NonConvergence as exc:
        return exc.best, False


def posterior(
    evidence: Evidence,
    prior: PriorSpec | None = None,
    spec: QuadratureSpec | None = None,
) -> PosteriorResult:
    """p(rare | all testimonies) as the ratio of the rare-branch
    evidence integral to the total."""
    if prior is None:
        prior = PriorSpec()
    if spec is None:
        spec = QuadratureSpec()
    jw, ok_w = _integrate(
        lambda v, d: log_integrand_w(v, d, evidence), prior, spec
    )
    jb, ok_b = _integrate(
        lambda v, d: log_integrand_b(v, d, evidence), prior, spec
    )
    ratio = log_ratio(jw, jb)
    return PosteriorResult(
        p=ratio.p,
        log_jw=jw.log_value,
        log_jb=jb.log_value,
        abs_err=ratio.abs_err,
        converged=ok_w and ok_b,
    )


def posterior_means(
    evidence: Evidence,
    prior: PriorSpec | None = None,
    spec: QuadratureSpec | None = None,
) -> MeansResult:
    """E[v] and E[d] under the (v, d) posterior given the full evidence
    (the assessed rare-event testimony, the n common testimonies, and
    any known-false testimonies), i.e. weighted by
    exp(log_weight_marginal) over the prior box."""
    if prior is None:
        prior = PriorSpec()
    if spec is None:
        spec = QuadratureSpec()

    def weight(v, d):
        return log_weight_marginal(v, d, evidence)

    # Panel nodes are strictly interior to the box, so log(v) and
    # log(d) below never see an exact zero.
    den, ok0 = _integrate(weight, prior, spec)
    num_v, ok1 = _integrate(lambda v, d: weight(v, d) + np.log(v), prior, spec)
    num_d, ok2 = _integrate(lambda v, d: weight(v, d) + np.log(d), prior, spec)

    rel_den = math.exp(den.log_abs_err - den.log_value)
    mean_v = math.exp(num_v.log_value - den.log_value)
    mean_d = math.exp(num_d.log_value - den.log_value)
    err_v = mean_v * (math.exp(num_v.log_abs_err - num_v.log_value) + rel_den)
    err_d = mean_d * (math.exp(num_d.log_abs_err - num_d.log_value) + rel_den)
    return MeansResult(
        mean_v=mean_v,
        mean_d=mean_d,
        abs_err_v=err_v,
        abs_err_d=err_d,
        converged=ok0 and ok1 and ok2,
    )


def asymptote(l: int) -> float:
    """1/(l+2): the large-n limit of the posterior with l known-false
    testimonies. A reference value confirmed numerically by the
    acceptance suite, not assumed by the computation itself."""
    if l < 0:
        raise ValueError(f"l must be nonnegative, got {l}")
    return 1.0 / (l + 2)
