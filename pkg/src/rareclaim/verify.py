"""Self-check suite wiring the oracles against the analytic pipeline.

Each check returns a CheckResult; the CLI prints one PASS/FAIL line per
check and exits nonzero if any fail.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import oracle, stats
from .model import Evidence, PriorSpec, log_integrand_b, log_integrand_w, log_s_n
from .output import RunRecord, metadata_dict, render_csv
from .quadrature import QuadratureSpec, log_integrate_2d

__all__ = ["CheckResult", "run_checks", "DEFAULT_SEED"]

DEFAULT_SEED = 20260811

_N_GRID = (0, 1, 2, 5, 10, 100, 1_000, 10_000, 100_000, 1_000_000)
_L_FAMILY = (0, 1, 3, 10, 50)


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def check_s_n_enumeration() -> CheckResult:
    fracs = (np.arange(5) + 0.5) / 5  # interior grid over [0,1]^2
    worst = 0.0
    for n in range(13):
        for v in fracs:
            for d in fracs:
                expected = oracle.enumerate_s_n(v, d, n)
                got = math.exp(log_s_n(v, d, n))
                worst = max(worst, abs(got - expected) / expected)
    return CheckResult(
        "s_n-enumeration",
        worst <= 1e-12,
        f"max relative error {worst:.3e} over n<=12 on a 5x5 grid of the "
        f"(v, d) unit square (tol 1e-12)",
    )


def check_closed_form(rel_tol: float) -> CheckResult:
    exact = oracle.closed_form_small(Evidence(n=0, l=0))
    got = stats.posterior(Evidence(n=0, l=0), spec=QuadratureSpec(rel_tol=rel_tol)).p
    dev = abs(got - exact)
    return CheckResult(
        "closed-form",
        dev <= 1e-8,
        f"|posterior(0,0) - {exact}| = {dev:.3e} (tol 1e-8)",
    )


def check_asymptote(rel_tol: float) -> CheckResult:
    worst_name, worst = "", 0.0
    ok = True
    for l in _L_FAMILY:
        target = stats.asymptote(l)
        tol = 0.02 if l == 3 else 0.01
        for rt in (1e-6, rel_tol):
            p = stats.posterior(Evidence(n=10**6, l=l), spec=QuadratureSpec(rel_tol=rt)).p
            dev = abs(p - target)
            if dev > worst:
                worst, worst_name = dev, f"l={l}@rel_tol={rt:g}"
            ok = ok and dev <= tol
    return CheckResult(
        "asymptote",
        ok,
        f"max |p(n=1e6,l) - 1/(l+2)| = {worst:.2e} at {worst_name} "
        f"(tol 0.01, l=3: 0.02; both tolerances)",
    )


def check_tolerance_convergence() -> CheckResult:
    prior = PriorSpec()
    worst = 0.0
    for n in (0, 1, 10, 1_000, 1_000_000):
        for l in _L_FAMILY:
            ev = Evidence(n=n, l=l)
            for integrand in (log_integrand_w, log_integrand_b):
                fine = log_integrate_2d(
                    lambda v, d: integrand(v, d, ev), prior, QuadratureSpec(rel_tol=1e-10)
                )
                coarse = log_integrate_2d(
                    lambda v, d: integrand(v, d, ev), prior, QuadratureSpec(rel_tol=1e-6)
                )
                worst = max(worst, abs(fine.log_value - coarse.log_value))
    return CheckResult(
        "tolerance-convergence",
        worst <= 1e-6,
        f"max log-integral drift between rel_tol 1e-6 and 1e-10 runs: "
        f"{worst:.3e} (tol 1e-6)",
    )


def check_induction_dominance(rel_tol: float) -> CheckResult:
    spec = QuadratureSpec(rel_tol=rel_tol)
    ps = [stats.posterior(Evidence(n=n, l=0), spec=spec).p for n in _N_GRID]
    dominated = all(p >= oracle.simple_induction(n) for p, n in zip(ps, _N_GRID))
    monotone = all(b <= a + 1e-10 for a, b in zip(ps, ps[1:]))
    return CheckResult(
        "induction-dominance",
        dominated and monotone,
        f"posterior(n) from {ps[0]:.6f} to {ps[-1]:.6f}, >= 1/(n+2): {dominated}, "
        f"non-increasing: {monotone}",
    )


def check_prior_robustness(rel_tol: float) -> CheckResult:
    spec = QuadratureSpec(rel_tol=rel_tol)
    ev = Evidence(n=10_000, l=0)
    p_default = stats.posterior(ev, PriorSpec(), spec).p
    p_wide = stats.posterior(ev, PriorSpec(d_hi=0.3), spec).p
    dev = abs(p_wide - p_default)
    return CheckResult(
        "prior-robustness",
        dev < 0.01,
        f"|p(d_hi=0.3) - p(d_hi=0.2)| at n=1e4: {dev:.2e} (tol 0.01)",
    )


def check_mc_cross(seed: int, mc_samples: int, rel_tol: float) -> CheckResult:
    spec = QuadratureSpec(rel_tol=rel_tol)
    worst_sigma, worst_name = 0.0, ""
    ok = True
    for n in range(7):
        for l in range(4):
            ev = Evidence(n=n, l=l)
            quad = stats.posterior(ev, spec=spec)
            mc = oracle.mc_posterior(
                ev, cfg=oracle.McConfig(seed=seed, samples=mc_samples)
            )
            sigma = abs(quad.p - mc.p_hat) / mc.std_err
            if sigma > worst_sigma:
                worst_sigma, worst_name = sigma, f"n={n},l={l}"
            ok = ok and sigma <= 3.0
    return CheckResult(
        "mc-cross",
        ok,
        f"max |p_quad - p_mc| = {worst_sigma:.2f} sigma at {worst_name} "
        f"({mc_samples} samples/combo, seed {seed}, gate 3 sigma)",
    )


def check_csv_determinism(rel_tol: float) -> CheckResult:
    spec = QuadratureSpec(rel_tol=rel_tol)
    from . import __version__

    def render() -> str:
        records = []
        for n in (0, 3, 47, 1000):
            res = stats.posterior(Evidence(n=n, l=0), spec=spec)
            records.append(RunRecord(n=n, l=0, p=res.p, p_err=res.abs_err))
        return render_csv(records, metadata_dict(PriorSpec(), spec, __version__))

    same = render() == render()
    return CheckResult(
        "csv-determinism",
        same,
        "two independently recomputed renders are byte-identical"
        if same
        else "renders differ between runs",
    )


def run_checks(
    quick: bool = False,
    seed: int = DEFAULT_SEED,
    mc_samples: int = 20_000,
    rel_tol: float = 1e-9,
) -> list[CheckResult]:
    """Run the verification suite; --quick drops the Monte Carlo gate."""
    results = [
        check_s_n_enumeration(),
        check_closed_form(rel_tol),
        check_asymptote(rel_tol),
        check_tolerance_convergence(),
        check_induction_dominance(rel_tol),
        check_prior_robustness(rel_tol),
        check_csv_determinism(rel_tol),
    ]
    if not quick:
        results.append(check_mc_cross(seed, mc_samples, rel_tol))
    return results
