"""Ideal trajectories, error schedules and empirical-vs-ideal comparison.

Three curve families, selected by ``kind``:

``thm1``  color-class size s(x) = (1 - gx)^2 and degree factor g(x) = 1 - gx,
          with g = 1/(1+eps) the slope.
``thm3``  same shapes; s tracks side-A degrees, g tracks B-degrees and
          class sizes.
``thmq``  s = b(x)^(M/(M-1)), g = b(x)^(1/(M-1)) with
          b(x) = 1 - 2(1+eps)(1-theta+theta*gamma) x.

All functions take a params object with attributes ``eps``, ``q``,
``delta``, ``eta`` and optionally ``dmax`` and ``error_scale``.
"""

from __future__ import annotations

import math
import random
from dataclasses import asdict, dataclass, field

from .errors import IdentityViolated, OutOfDomain

KINDS = ("thm1", "thm3", "thmq")
IDENTITY_TOL = 1e-9


def gamma_of(kind: str, eps: float) -> float:
    if kind == "thmq":
        theta = eps / 2
        return (1 + theta) / (1 + eps)
    return 1 / (1 + eps)


def exponent_m(eps: float) -> float:
    """M = ((1-theta) + (1+theta)gamma)/gamma for the color-target curves."""
    theta = eps / 2
    gam = gamma_of("thmq", eps)
    return ((1 - theta) + (1 + theta) * gam) / gam


def slope(kind: str, eps: float) -> float:
    """Rate at which the base of the curves falls: s, g are powers of 1 - slope*x."""
    if kind == "thmq":
        theta = eps / 2
        gam = gamma_of(kind, eps)
        return 2 * (1 + eps) * (1 - theta + theta * gam)
    return gamma_of(kind, eps)


def curve_values(kind: str, eps: float, x: float) -> tuple[float, float]:
    """(s(x), g(x)) without domain checks."""
    base = 1 - slope(kind, eps) * x
    if kind == "thmq":
        m = exponent_m(eps)
        if base <= 0:
            return 0.0, 0.0
        return base ** (m / (m - 1)), base ** (1 / (m - 1))
    return base * base, base


def ideal(kind: str, params, x: float) -> tuple[float, float]:
    if kind not in KINDS:
        raise ValueError(f"unknown curve kind {kind!r}")
    if x < -1e-12 or x > params.eta + 1e-12:
        raise OutOfDomain(f"x={x} outside [0, eta={params.eta}]")
    return curve_values(kind, params.eps, x)


def num_iterations(params) -> int:
    return int(math.floor(params.eta / params.delta + 1e-9))


# ----------------------------------------------------------------------
# ideal sequences (no error terms)


def ideal_size(kind: str, params, t: int) -> float:
    s, _ = curve_values(kind, params.eps, t * params.delta)
    if kind == "thmq":
        return s * params.q
    return s * (1 + params.eps) * params.q


def ideal_degree(kind: str, params, t: int, other: bool = False) -> float:
    """Ideal degree cap; ``other`` selects the non-heavy cap for thmq."""
    x = t * params.delta
    _, g = curve_values(kind, params.eps, x)
    if kind == "thmq":
        mult = 1 + params.eps / 2 if other else 1 + params.eps
        return 2 * (1 - x) * g * mult * params.q
    return (1 - x) * g * params.q


def ideal_deletion(kind: str, params, t: int, other: bool = False) -> float:
    """ã_t (or b̃_t when ``other`` for thmq): deletion probability without error terms."""
    s, g = curve_values(kind, params.eps, t * params.delta)
    if s <= 0:
        return math.inf
    if kind == "thmq":
        mult = 1 + params.eps / 2 if other else 1 + params.eps
        return 2 * mult * params.delta * g / s
    return gamma_of(kind, params.eps) * params.delta * g / s


# ----------------------------------------------------------------------
# error schedules


@dataclass
class ErrorSchedule:
    y: list[float]
    z: list[float]
    alpha: list[float]
    beta: list[float]


def thm3_alpha(t: int, delta: float, gam: float, eta: float, growth: float = 10.0) -> float:
    return math.sqrt(delta) * ((1 + growth * delta / (1 - gam * eta) ** 2) ** t - 1)


def error_sequences(kind: str, params, T: int | None = None) -> ErrorSchedule:
    """y_t, z_t, alpha_t, beta_t for t = 0..T (T defaults to floor(eta/delta)).

    ``params.error_scale`` (default 1) multiplies every error term;
    ``params.error_growth`` (default 10) is the growth constant of the
    saturating schedule.
    """
    if T is None:
        T = num_iterations(params)
    scale = getattr(params, "error_scale", 1.0)
    q, d, eps = params.q, params.delta, params.eps
    y = [0.0] * (T + 1)
    z = [0.0] * (T + 1)
    if kind == "thm1":
        gam = gamma_of(kind, eps)
        dmax = getattr(params, "dmax", 1)
        lq = math.log(q)
        conc = math.sqrt(d * q) * lq
        for t in range(T):
            y[t + 1] = y[t] + 2 * d * d * q * lq * lq * (1 - gam * t * d) / (1 - t * d) + 4 * dmax * conc
            z[t + 1] = z[t] + d * d * q + 2 * dmax * conc + 2 * d / (1 - t * d) * y[t]
        y = [scale * v for v in y]
        z = [scale * v for v in z]
        alpha = [_ratio(z[t], ideal_size(kind, params, t)) for t in range(T + 1)]
        beta = [_ratio(y[t], ideal_degree(kind, params, t)) for t in range(T + 1)]
    elif kind == "thm3":
        gam = gamma_of(kind, eps)
        growth = getattr(params, "error_growth", 10.0)
        alpha = [scale * thm3_alpha(t, d, gam, params.eta, growth) for t in range(T + 1)]
        beta = list(alpha)
        z = [alpha[t] * ideal_size(kind, params, t) for t in range(T + 1)]
        y = [alpha[t] * ideal_degree(kind, params, t) for t in range(T + 1)]
    elif kind == "thmq":
        y = [scale * t * d**1.5 * q for t in range(T + 1)]
        z = [scale * t * d**1.25 * q for t in range(T + 1)]
        alpha = [_ratio(z[t], ideal_size(kind, params, t)) for t in range(T + 1)]
        beta = [_ratio(y[t], ideal_degree(kind, params, t)) for t in range(T + 1)]
    else:
        raise ValueError(f"unknown curve kind {kind!r}")
    return ErrorSchedule(y, z, alpha, beta)


def _ratio(num: float, den: float) -> float:
    if num == 0:
        return 0.0
    return num / den if den > 0 else math.inf


# ----------------------------------------------------------------------
# identity checks


@dataclass
class _GridPoint:
    eps: float
    delta: float
    t: int
    q: float
    eta: float = 0.0


@dataclass
class IdentityReport:
    points: int
    max_size_residual: float
    max_degree_residual: float
    max_power_residual: float
    k_size: float
    k_degree: float
    worst: dict = field(default_factory=dict)

    def as_dict(self) -> dict:
        return asdict(self)


def random_grid(n: int, seed: int = 0, eps_range=(0.0, 0.5), delta_range=(0.0, 0.05),
                q_exp=(3, 6)) -> list[_GridPoint]:
    """``n`` points with eps, delta uniform in the open ranges, q = 10^k, t <= eta/delta."""
    rng = random.Random(seed)
    pts = []
    while len(pts) < n:
        eps = rng.uniform(*eps_range)
        delta = rng.uniform(*delta_range)
        if eps <= 0 or delta <= 0:
            continue
        eta = rng.uniform(0.05, 0.95)
        t = rng.randint(0, int(eta / delta))
        q = 10.0 ** rng.randint(*q_exp)
        pts.append(_GridPoint(eps, delta, t, q, eta))
    return pts


def size_identity_residual(eps: float, delta: float, t: int, q: float) -> float:
    """(1-2ã_t)s̃_t vs s̃_{t+1} - γ²δ²(1+ε)q, scaled by (1+ε)q."""
    p = _GridPoint(eps, delta, t, q, eta=1.0)
    gam = gamma_of("thm1", eps)
    a = ideal_deletion("thm1", p, t)
    lhs = (1 - 2 * a) * ideal_size("thm1", p, t)
    rhs = ideal_size("thm1", p, t + 1) - gam * gam * delta * delta * (1 + eps) * q
    return abs(lhs - rhs) / ((1 + eps) * q)


def degree_identity_residual(eps: float, delta: float, t: int, q: float) -> float:
    """(1-ã_t)(1-δ/(1-tδ))d̃_t vs d̃_{t+1}, scaled by q."""
    p = _GridPoint(eps, delta, t, q, eta=1.0)
    a = ideal_deletion("thm1", p, t)
    lhs = (1 - a) * (1 - delta / (1 - t * delta)) * ideal_degree("thm1", p, t)
    rhs = ideal_degree("thm1", p, t + 1)
    return abs(lhs - rhs) / q


def power_residual(kind: str, eps: float, x: float) -> float:
    s, g = curve_values(kind, eps, x)
    power = exponent_m(eps) if kind == "thmq" else 2.0
    return abs(s - g**power)


def color_target_constants(eps: float, delta: float, q: float, eta: float | None = None) -> tuple[float, float]:
    """Smallest K, K' making the two color-target ideal-value inequalities hold for t <= eta/delta.

    K:  (1 - (1-θ)ã_t - (1+θ)b̃_t) s̃_t >= s̃_{t+1} - K δ² q
    K': (1 - b̃_t)(1 - δ/(1-tδ)) d̃ >= ... <= d̃_{t+1} + K' δ² q, for both degree caps.
    """
    theta = eps / 2
    if eta is None:
        gam = gamma_of("thmq", eps)
        eta = (1 / (2 * (1 + eps))) * (1 - theta / 2 + theta * gam / 2) / (1 - theta + theta * gam)
    p = _GridPoint(eps, delta, 0, q, eta)
    unit = delta * delta * q
    k_size = 0.0
    k_deg = 0.0
    T = int(math.floor(eta / delta + 1e-9))
    for t in range(T + 1):
        a = ideal_deletion("thmq", p, t)
        b = ideal_deletion("thmq", p, t, other=True)
        s_now, s_next = ideal_size("thmq", p, t), ideal_size("thmq", p, t + 1)
        gap = s_next - (1 - (1 - theta) * a - (1 + theta) * b) * s_now
        k_size = max(k_size, gap / unit)
        shrink = (1 - b) * (1 - delta / (1 - t * delta))
        for other in (False, True):
            gap = shrink * ideal_degree("thmq", p, t, other) - ideal_degree("thmq", p, t + 1, other)
            k_deg = max(k_deg, gap / unit)
    return k_size, k_deg


def check_identities(grid, kind_power_samples: int = 64, raise_on_fail: bool = True) -> IdentityReport:
    """Evaluate the exact ideal-value identities over ``grid`` and fit the thmq constants."""
    worst: dict = {}
    max_size = max_deg = max_pow = 0.0
    k_size = k_deg = 0.0
    seen_q = {}
    for p in grid:
        r = size_identity_residual(p.eps, p.delta, p.t, p.q)
        if r > max_size:
            max_size = r
            worst["size"] = asdict(p)
        r = degree_identity_residual(p.eps, p.delta, p.t, p.q)
        if r > max_deg:
            max_deg = r
            worst["degree"] = asdict(p)
        eta = p.eta if p.eta else 0.9
        for kind in KINDS:
            limit = eta if kind != "thmq" else min(eta, 0.999 / slope(kind, p.eps))
            for i in range(kind_power_samples // 16 + 1):
                x = limit * i / (kind_power_samples // 16)
                r = power_residual(kind, p.eps, x)
                if r > max_pow:
                    max_pow = r
                    worst["power"] = {"kind": kind, "eps": p.eps, "x": x}
        key = (round(p.eps, 12), round(p.delta, 12), p.q)
        if key not in seen_q and len(seen_q) < 50:
            seen_q[key] = True
            ks, kd = color_target_constants(p.eps, p.delta, p.q)
            k_size = max(k_size, ks)
            k_deg = max(k_deg, kd)
    report = IdentityReport(len(grid), max_size, max_deg, max_pow, k_size, k_deg, worst)
    if raise_on_fail and (max_size > IDENTITY_TOL or max_deg > IDENTITY_TOL or max_pow > 1e-12):
        raise IdentityViolated("ideal-value identity residual above tolerance", worst=worst)
    return report


# ----------------------------------------------------------------------
# trajectory records


@dataclass
class TrajectoryRecord:
    """One iteration boundary of a run.

    ``empirical_size`` is the tracked size quantity (smallest color class,
    or smallest side-A degree for the saturating nibble); ``empirical_degree``
    the largest degree that the cap ``(1+beta)d_ideal`` bounds.
    """

    t: int
    empirical_size: float
    empirical_degree: float
    matched: int
    s_ideal: float
    d_ideal: float
    alpha: float
    beta: float
    a_t: float | None = None
    b_t: float | None = None
    theta_t: float | None = None
    max_class: float | None = None
    max_other_degree: float | None = None
    d2_ideal: float | None = None
    discards: int = 0
    clamps: int = 0
    attempts: int = 1
    degraded: bool = False
    violations: int = 0
    max_a_fraction: float | None = None
    alive_edges: int = 0

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class DeviationSummary:
    size_deviation: list[float]
    degree_deviation: list[float]
    max_abs_size: float
    mean_abs_size: float
    final_size: float
    max_abs_degree: float
    mean_abs_degree: float
    final_degree: float
    flags: list[int]

    @property
    def flag_count(self) -> int:
        return len(self.flags)

    def as_dict(self) -> dict:
        d = asdict(self)
        d["flag_count"] = self.flag_count
        return d


def compare(records: list[TrajectoryRecord]) -> DeviationSummary:
    """Relative deviations of empirical values from the scheduled targets.

    Size deviation at ``t``: (empirical - (1-alpha)s̃)/((1-alpha)s̃); degree
    deviation: (empirical - (1+beta)d̃)/((1+beta)d̃).  Iterations where the
    size falls below or the degree rises above its target are flagged.
    """
    if not records:
        raise ValueError("compare needs at least one record")
    sizes, degs, flags = [], [], []
    for r in records:
        s_target = (1 - r.alpha) * r.s_ideal
        d_target = (1 + r.beta) * r.d_ideal
        ds = (r.empirical_size - s_target) / s_target if s_target > 0 else 0.0
        dd = (r.empirical_degree - d_target) / d_target if d_target > 0 else 0.0
        sizes.append(ds)
        degs.append(dd)
        if r.empirical_size < s_target - 1e-9 or r.empirical_degree > d_target + 1e-9:
            flags.append(r.t)
    return DeviationSummary(
        size_deviation=sizes,
        degree_deviation=degs,
        max_abs_size=max(abs(v) for v in sizes),
        mean_abs_size=sum(abs(v) for v in sizes) / len(sizes),
        final_size=sizes[-1],
        max_abs_degree=max(abs(v) for v in degs),
        mean_abs_degree=sum(abs(v) for v in degs) / len(degs),
        final_degree=degs[-1],
        flags=flags,
    )
