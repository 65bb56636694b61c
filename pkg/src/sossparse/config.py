"""Named constants behind every hidden Õ(·) factor, echoed into results."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace


@dataclass(frozen=True)
class Constants:
    # prefilter: R = prefilter_c * M^{1/t} * sqrt(d/eps); removed points shrink
    # ("subtract") or grow ("add") the downstream corruption budget
    prefilter_c: float = 10.0
    prefilter_accounting: str = "subtract"

    # slack multipliers: degree-2 slacks use slack_c2 * eps * log(1/eps),
    # degree-4 slacks use slack_c4 * eps^2 * log^2(1/eps); slack_floor_c
    # multiplies the measured sampling standard error added on top
    slack_c2: float = 10.0
    slack_c4: float = 100.0
    slack_floor_c: float = 4.0
    trim_frac_se: float = 0.25      # fraction trimmed when estimating entry se
    se_trim_correction: float = 1.5

    # Gaussian program item 4: (v' Sigma' v)^2 <= b4_bound, optionally replaced
    # by (b4_adaptive_c * robust-lambda-max * (1+sqrt(d/m))^2)^2 when larger
    b4_bound: float = 9.0
    b4_adaptive: bool = True
    b4_adaptive_c: float = 2.0

    # rough scale bounds A = D/(c2 d), B = d D / c1
    rough_c1: float = 0.05
    rough_c2: float = 10.0

    # Lepskii rate r(s) = s * (rate_c * eps * log(1/eps) + noise_c * sqrt(d/m))
    lepskii_rate_c: float = 5.0
    lepskii_noise_c: float = 2.0
    lepskii_gamma_c: float = 2.0    # gamma' = gamma / (c * log d) echo

    # trimmed-mean baseline: tau = trim_mult * eps + log(1/gamma)/m
    trim_mult: float = 8.0
    baseline_gamma: float = 0.05
    baseline_subgrad_iters: int = 500

    # caps
    moment_order_cap: int = 8
    hard_cap: int = 5000
    symbolic_terms_cap: int = 2_000_000

    def as_dict(self) -> dict:
        return asdict(self)

    def with_overrides(self, **kw) -> "Constants":
        return replace(self, **kw)


DEFAULTS = Constants()
