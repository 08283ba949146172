"""Construction constants derived from the stretch target ``t``."""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import asdict, dataclass, fields

T_MAX = 3.0
# slack for inequalities that the closed form meets with equality
REL_TOL = 1e-12


@dataclass(frozen=True)
class SpannerParams:
    t: float
    d: int
    alpha: float
    theta: float
    rho1: float
    rho2: float
    wsep: float
    mu1: float
    mu2: float
    beta: float
    k: int = 0
    t_effective: float | None = None
    clamped: bool = False

    @property
    def theta1(self) -> float:
        """Cone-selection window around a pair's center direction."""
        return 2 * math.sqrt(self.d) / self.rho1 + self.alpha

    def to_dict(self) -> dict:
        return asdict(self)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data: dict) -> "SpannerParams":
        names = {f.name for f in fields(cls)}
        return cls(**{k: v for k, v in data.items() if k in names})


def choose_parameters(t: float, d: int, k: int = 0) -> SpannerParams:
    """Closed-form parameter choice with ``x = (t-1)/(25t+1)``.

    For ``t > 3`` the constants for ``t = 3`` are used (a 3-spanner is a
    t-spanner) and ``clamped`` is set.
    """
    if not t > 1:
        raise ValueError(f"stretch t must exceed 1, got {t}")
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if k < 0:
        raise ValueError(f"fault parameter k must be >= 0, got {k}")
    te = float(t)
    clamped = False
    if te > T_MAX:
        warnings.warn(f"t={t} exceeds {T_MAX}; using the t={T_MAX} constants", stacklevel=2)
        te, clamped = T_MAX, True
    x = (te - 1) / (25 * te + 1)
    sd = math.sqrt(d)
    rho1 = sd / x
    return SpannerParams(
        t=float(t), d=int(d), alpha=x, theta=19 * x, rho1=rho1,
        rho2=2 * rho1 + 6 * sd, wsep=rho1 + sd, mu1=0.5, mu2=2.0, beta=2.0,
        k=int(k), t_effective=te, clamped=clamped)


def stretch_lhs(p: SpannerParams, t: float | None = None) -> float:
    """Left-hand side of the composite stretch inequality."""
    t = p.t_effective if t is None else t
    if t is None:
        t = p.t
    q = math.sqrt(p.d) / p.rho1
    denom = 1 - 2 * math.sin(p.theta / 2) - 2 * q
    if denom <= 0:
        return math.inf
    return 2 * t * q + (1 + 2 * t * q) * (1 + q) / denom


def inequality_report(p: SpannerParams) -> dict[str, bool]:
    """Each required inequality by name, evaluated on ``p``."""
    sd = math.sqrt(p.d)
    t = p.t_effective if p.t_effective is not None else p.t

    def ge(a: float, b: float) -> bool:
        return a >= b - REL_TOL * max(1.0, abs(a), abs(b))

    return {
        "t_gt_1": t > 1,
        "rho2_ge_2rho1_6sqrtd": ge(p.rho2, 2 * p.rho1 + 6 * sd),
        "rho1_le_wsep_minus_sqrtd": ge(p.wsep - sd, p.rho1),
        "rho2_ge_2wsep_4sqrtd": ge(p.rho2, 2 * p.wsep + 4 * sd),
        "rho1_ge_4sqrtd": ge(p.rho1, 4 * sd),
        "rho1_gt_t_sqrtd": p.rho1 > t * sd,
        "rho1_ge_stretch_bound": ge(p.rho1, 2 * sd * (t + 1) / (t - 1)) if t > 1 else False,
        "theta_ge_3alpha_16sqrtd_rho1": ge(p.theta, 3 * p.alpha + 16 * sd / p.rho1),
        "theta_lt_pi_3": p.theta < math.pi / 3,
        "alpha_positive": p.alpha > 0,
        "mu_consistent": math.isclose(p.mu1 * p.mu2, 1.0) and p.mu2 >= 1,
        "beta_le_2": 1 <= p.beta <= 2,
        "stretch_composite": stretch_lhs(p, t) <= t * (1 + REL_TOL),
    }


def verify_inequalities(p: SpannerParams) -> bool:
    return all(inequality_report(p).values())
