"""Annular obstruction sets: membership, exact 1-D measures, densities,
binomial reduction of dilated line copies to polynomial sequences mod 1,
and end-to-end no-copy checks.

The even-exponent set keeps dist(|x|_p^p, Z) away from 1/2 by a margin
(1-eps)/2; the odd-exponent set intersects the analogous conditions over
all sign vectors. Points of a dilated collinear copy inside the set force
the associated polynomial values mod 1 into one interval of length 1-eps,
which a verified hitting pattern forbids.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from typing import Optional, Sequence

import numpy as np

from .torus import BudgetError, Real, TorusInterval
from .patterns import Pattern, PolySeqSpec

MEASURE_PIECE_BUDGET = 60_000_000


@dataclass(frozen=True)
class AnnulusSpec:
    """Obstruction set parameters: dimension, exponent, and band width.

    Even p: x is a member iff dist(|x|_p^p, Z) < (1-eps)/2.
    Odd p: membership requires the same for every signed power sum
    sum_i sigma_i x_i^p over sigma in {-1,1}^d.
    """

    dimension: int
    exponent: int
    epsilon: float

    def __post_init__(self):
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        if self.exponent < 2:
            raise ValueError("exponent must be >= 2")
        if not 0 <= self.epsilon < 1:
            raise ValueError("epsilon must be in [0, 1)")

    @property
    def parity(self) -> str:
        return "even" if self.exponent % 2 == 0 else "odd"

    @property
    def band_halfwidth(self) -> float:
        return (1.0 - self.epsilon) / 2.0

    def to_dict(self) -> dict:
        return {"dimension": self.dimension, "exponent": self.exponent,
                "epsilon": self.epsilon, "parity": self.parity}


def _dist_to_z(values: np.ndarray) -> np.ndarray:
    frac = values % 1.0
    return np.minimum(frac, 1.0 - frac)


def member(spec: AnnulusSpec, x: Sequence[float]) -> bool:
    """Membership predicate; float ties resolve toward non-membership."""
    return bool(members(spec, np.asarray(x, dtype=float)[None, :])[0])


def members(spec: AnnulusSpec, points: np.ndarray) -> np.ndarray:
    """Vectorized membership for a (count, d) array of points."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != spec.dimension:
        raise ValueError(f"expected shape (count, {spec.dimension})")
    w = spec.band_halfwidth
    p = spec.exponent
    if spec.parity == "even":
        f = (np.abs(pts) ** p).sum(axis=1)
        return _dist_to_z(f) < w
    powers = pts ** p
    ok = np.ones(len(pts), dtype=bool)
    for sigma in product((1.0, -1.0), repeat=spec.dimension):
        if not ok.any():
            break
        f = powers @ np.asarray(sigma)
        ok &= _dist_to_z(f) < w
    return ok


def _reflected(start: float, length: float) -> tuple:
    """Image of the arc [start, start+length) under t -> -t on the circle."""
    return ((1.0 - start - length) % 1.0, length)


def _root_inplace(arr: np.ndarray, p: int) -> np.ndarray:
    """arr ** (1/p) in place; sqrt/cbrt chains beat np.power by a lot."""
    q = p
    while q % 2 == 0 and q > 1:
        np.sqrt(arr, out=arr)
        q //= 2
    while q % 3 == 0 and q > 1:
        np.cbrt(arr, out=arr)
        q //= 3
    if q > 1:
        np.power(arr, 1.0 / q, out=arr)
    return arr


def _halfline_measure(p: int, start: float, length: float, T: float,
                      piece_budget: int) -> float:
    """Measure of {t in [0, T] : t^p mod 1 in [start, start+length)}.

    The set is the union over integers m of [ (m+a)^{1/p}, (m+b)^{1/p} )
    clipped to [0, T]; at most T^p + 2 pieces, summed vectorized.
    """
    if length >= 1.0:
        return T
    m_top = int(math.floor(T ** p)) + 1
    if m_top + 1 > piece_budget:
        raise BudgetError(
            f"exact measure needs {m_top + 1} pieces for R/2={T}, p={p} "
            f"(budget {piece_budget}); use the Monte Carlo estimator"
        )
    pieces = [(start, min(start + length, 1.0))]
    if start + length > 1.0:
        pieces.append((0.0, start + length - 1.0))
    total = 0.0
    chunk = 1 << 22
    for alpha, beta in pieces:
        for lo_m in range(0, m_top + 1, chunk):
            m = np.arange(lo_m, min(lo_m + chunk, m_top + 1), dtype=float)
            lo = _root_inplace(m + alpha, p)
            hi = _root_inplace(m + beta, p)
            np.minimum(lo, T, out=lo)
            np.minimum(hi, T, out=hi)
            total += float((hi - lo).sum())
    return total


def one_variable_measure(p: int, sigma: int, R: float, interval,
                         piece_budget: int = MEASURE_PIECE_BUDGET) -> float:
    """Exact measure of {t in [-R/2, R/2] : sigma*t^p mod 1 in I}.

    Enumerates the constituent root intervals per sign of t; deviates from
    |I|*R by a bounded amount independent of R.
    """
    if R < 1:
        raise ValueError("R must be >= 1")
    if sigma not in (1, -1):
        raise ValueError("sigma must be +1 or -1")
    if isinstance(interval, TorusInterval):
        start, length = float(interval.start), float(interval.length)
    else:
        start, length = float(interval[0]) % 1.0, float(interval[1])
    if not 0 < length <= 1:
        raise ValueError("interval length must be in (0, 1]")
    T = R / 2.0

    # positive t: condition is sigma * t^p mod 1 in I
    pos = (start, length) if sigma == 1 else _reflected(start, length)
    # negative t = -s: sigma * (-s)^p = sigma * (-1)^p * s^p
    neg_sigma = sigma * (-1) ** p
    neg = (start, length) if neg_sigma == 1 else _reflected(start, length)
    if pos == neg:  # even p: both halves coincide
        return 2.0 * _halfline_measure(p, pos[0], pos[1], T, piece_budget)
    return (_halfline_measure(p, pos[0], pos[1], T, piece_budget)
            + _halfline_measure(p, neg[0], neg[1], T, piece_budget))


@dataclass(frozen=True)
class DensityReport:
    """Measured volume fraction of a set in the centered cube of side R."""

    R: float
    fraction: float
    target: float
    target_kind: str           # "limit" (exact density) or "lower-bound"
    method: str                # "exact-slice" or "monte-carlo"
    detail: dict
    seed: Optional[int] = None
    std_error: Optional[float] = None
    error_bound: Optional[float] = None

    def __post_init__(self):
        if not 0.0 <= self.fraction <= 1.0:
            raise ValueError("fraction must be in [0, 1]")

    def merge(self, other: "DensityReport") -> "DensityReport":
        """Pool two Monte Carlo runs of the same configuration."""
        if self.method != "monte-carlo" or other.method != "monte-carlo":
            raise ValueError("only Monte Carlo reports merge")
        if (self.R, self.target) != (other.R, other.target):
            raise ValueError("cannot merge different configurations")
        n1, n2 = self.detail["samples"], other.detail["samples"]
        hits = self.detail["hits"] + other.detail["hits"]
        frac = hits / (n1 + n2)
        return DensityReport(
            R=self.R, fraction=frac, target=self.target,
            target_kind=self.target_kind, method="monte-carlo",
            detail={"samples": n1 + n2, "hits": hits},
            seed=self.seed,
            std_error=math.sqrt(max(frac * (1 - frac), 1e-300) / (n1 + n2)),
        )

    def to_dict(self) -> dict:
        d = {
            "R": self.R, "fraction": self.fraction, "target": self.target,
            "target_kind": self.target_kind, "method": self.method,
            "detail": dict(self.detail),
        }
        for key in ("seed", "std_error", "error_bound"):
            v = getattr(self, key)
            if v is not None:
                d[key] = v
        return d


def density(spec: AnnulusSpec, R: float, method: str = "monte-carlo",
            seed: int = 0, samples: int = 1_000_000, grid_step: float = 0.1,
            node_budget: int = 200_000) -> DensityReport:
    """Volume fraction of the obstruction set in [-R/2, R/2]^d.

    exact-slice (even p, d <= 2): integrates the exact one-variable measure
    over a midpoint grid in the remaining coordinates. monte-carlo: uniform
    samples with per-block child seeds, so block order never matters.
    """
    if R < 1:
        raise ValueError("R must be >= 1")
    if spec.parity == "even":
        target, kind = 1.0 - spec.epsilon, "limit"
    else:
        target, kind = 1.0 - 2 ** spec.dimension * spec.epsilon, "lower-bound"
    band_start = (1.0 + spec.epsilon) / 2.0
    band_length = 1.0 - spec.epsilon

    if method == "exact-slice":
        if spec.parity != "even":
            raise ValueError("exact-slice supports even exponents only; "
                             "use monte-carlo for odd exponents")
        d = spec.dimension
        if d == 1:
            frac = one_variable_measure(spec.exponent, 1, R,
                                        (band_start, band_length)) / R
            return DensityReport(R=R, fraction=min(frac, 1.0), target=target,
                                 target_kind=kind, method="exact-slice",
                                 detail={"nodes": 1}, error_bound=3.0 / R)
        if d > 2:
            raise BudgetError("exact-slice is limited to d <= 2; use monte-carlo")
        half = R / 2.0
        count = max(1, math.ceil(half / grid_step))
        if count > node_budget:
            raise BudgetError(f"{count} quadrature nodes over budget {node_budget}")
        h = half / count
        # midpoint nodes on [0, R/2]; the slice measure is even in x_2
        xs = (np.arange(count) + 0.5) * h
        acc = 0.0
        for x2 in xs:
            shift = abs(x2) ** spec.exponent
            frac = one_variable_measure(
                spec.exponent, 1, R, ((band_start - shift) % 1.0, band_length)) / R
            acc += frac
        frac = acc / count
        return DensityReport(R=R, fraction=min(frac, 1.0), target=target,
                             target_kind=kind, method="exact-slice",
                             detail={"nodes": int(count), "grid_step": h},
                             error_bound=3.0 / R + h)

    if method != "monte-carlo":
        raise ValueError(f"unknown method {method!r}")
    ss = np.random.SeedSequence(seed)
    block = 1 << 18
    n_blocks = -(-samples // block)
    children = ss.spawn(n_blocks)
    hits, drawn = 0, 0
    for child in children:
        take = min(block, samples - drawn)
        rng = np.random.default_rng(child)
        pts = (rng.random((take, spec.dimension)) - 0.5) * R
        hits += int(members(spec, pts).sum())
        drawn += take
    frac = hits / samples
    return DensityReport(
        R=R, fraction=frac, target=target, target_kind=kind,
        method="monte-carlo", detail={"samples": samples, "hits": hits},
        seed=seed, std_error=math.sqrt(max(frac * (1 - frac), 1e-300) / samples),
    )


# ---------------------------------------------------------------------------
# Placements and the binomial reduction


def sample_lp_sphere(rng: np.random.Generator, count: int, d: int, p: float) -> np.ndarray:
    """Uniform points on the unit l^p sphere (cone measure).

    Coordinates are drawn with density proportional to exp(-|t|^p)
    (|t| = G^{1/p} with G Gamma-distributed of shape 1/p), then the vector
    is l^p-normalized.
    """
    g = rng.gamma(1.0 / p, 1.0, size=(count, d))
    mags = g ** (1.0 / p)
    signs = rng.integers(0, 2, size=(count, d)) * 2 - 1
    w = mags * signs
    norms = (np.abs(w) ** p).sum(axis=1) ** (1.0 / p)
    norms[norms == 0] = 1.0
    return w / norms[:, None]


@dataclass(frozen=True)
class Placement:
    """A candidate dilated copy: base point, unit direction, scale index."""

    x: tuple
    v: tuple
    scale_index: int
    scale: float

    def __post_init__(self):
        if self.scale_index < 1:
            raise ValueError("scale index must be >= 1")
        if self.scale <= 0:
            raise ValueError("scale must be positive")
        object.__setattr__(self, "x", tuple(float(c) for c in self.x))
        object.__setattr__(self, "v", tuple(float(c) for c in self.v))

    @classmethod
    def at(cls, x, v, j: int, leading: float, exponent: int) -> "Placement":
        """Placement at scale r_j = (leading + j)^(1/p), with v renormalized."""
        if float(leading) + j <= 0:
            raise ValueError("need leading + j > 0")
        v = np.asarray(v, dtype=float)
        norm = float((np.abs(v) ** exponent).sum() ** (1.0 / exponent))
        if abs(norm - 1.0) > 1e-6:
            raise ValueError(f"direction norm {norm} too far from 1")
        v = v / norm
        r = (float(leading) + j) ** (1.0 / exponent)
        return cls(tuple(np.asarray(x, dtype=float)), tuple(v), j, r)


@dataclass(frozen=True)
class ReductionCertificate:
    """Residuals certifying the binomial expansion of |x + r k v|_p^p."""

    constant_term: float
    leading_value: float
    leading_target: float
    leading_residual: float
    norm_residual: float
    identity_residual: float
    signs: tuple

    def to_dict(self) -> dict:
        return {
            "constant_term": self.constant_term,
            "leading_value": self.leading_value,
            "leading_target": self.leading_target,
            "leading_residual": self.leading_residual,
            "norm_residual": self.norm_residual,
            "identity_residual": self.identity_residual,
            "signs": list(self.signs),
        }


def reduction_coefficients(x: np.ndarray, v: np.ndarray, r: float,
                           p: int) -> tuple:
    """Coefficients (B_0..B_{p-1}, leading) of the expanded signed power sum.

    With sigma_i = sign(v_i) for odd p (all ones for even p),

        F_sigma(x + r k v) = sum_l B_l k^l + (r^p |v|_p^p) k^p,
        B_l = C(p, l) r^l sum_i sigma_i x_i^{p-l} v_i^l.
    """
    x = np.asarray(x, dtype=float)
    v = np.asarray(v, dtype=float)
    if p % 2 == 0:
        signs = np.ones_like(v)
    else:
        signs = np.where(v >= 0, 1.0, -1.0)
    coeffs = []
    for l in range(p):
        coeffs.append(math.comb(p, l) * r ** l *
                      float((signs * x ** (p - l) * v ** l).sum()))
    leading = r ** p * float((signs * v ** p).sum())
    return tuple(coeffs), leading, tuple(int(s) for s in signs)


def reduce_to_polynomial(spec: AnnulusSpec, pattern: Pattern,
                         placement: Placement, leading: Real):
    """Polynomial whose values mod 1 reproduce the set's defining function
    along the copy {x + r k v : k in pattern}, after dropping the constant
    term and the integer multiple of k^p.

    Returns (PolySeqSpec, ReductionCertificate); the certificate records the
    leading-coefficient identity r^p |v|_p^p = leading + j and a direct
    evaluation residual over sample indices.
    """
    p = spec.exponent
    x = np.asarray(placement.x, dtype=float)
    v = np.asarray(placement.v, dtype=float)
    norm = float((np.abs(v) ** p).sum() ** (1.0 / p))
    if abs(norm - 1.0) > 1e-9:
        raise ValueError(f"direction is not l^p-unit: norm residual {norm - 1.0}")
    coeffs, lead_val, signs = reduction_coefficients(x, v, placement.scale, p)
    target = float(leading) + placement.scale_index

    ks = list(pattern.indices)
    if len(ks) > 64:
        step = max(1, len(ks) // 64)
        ks = ks[::step] + [pattern.indices[-1]]
    worst = 0.0
    sgn = np.asarray(signs, dtype=float)
    for k in ks:
        y = x + placement.scale * k * v
        direct = float((sgn * y ** p).sum())
        horner = lead_val
        for l in range(p - 1, -1, -1):
            horner = horner * k + coeffs[l]
        worst = max(worst, abs(direct - horner) / (1.0 + abs(horner)))

    cert = ReductionCertificate(
        constant_term=coeffs[0],
        leading_value=lead_val,
        leading_target=target,
        leading_residual=abs(lead_val - target),
        norm_residual=abs(norm - 1.0),
        identity_residual=worst,
        signs=signs,
    )
    poly = PolySeqSpec(p, leading, tuple(coeffs[1:]))
    return poly, cert


# ---------------------------------------------------------------------------
# No-copy checks


@dataclass(frozen=True)
class NoCopyReport:
    """Per-scale counts of sampled copies that landed entirely inside the set."""

    epsilon: float
    placements_total: int
    violations_total: int
    per_scale: tuple
    worst_margin: float
    route_mismatches: int

    @property
    def passed(self) -> bool:
        return self.violations_total == 0

    def merge(self, other: "NoCopyReport") -> "NoCopyReport":
        if self.epsilon != other.epsilon:
            raise ValueError("cannot merge reports with different epsilon")
        return NoCopyReport(
            epsilon=self.epsilon,
            placements_total=self.placements_total + other.placements_total,
            violations_total=self.violations_total + other.violations_total,
            per_scale=self.per_scale + other.per_scale,
            worst_margin=min(self.worst_margin, other.worst_margin),
            route_mismatches=self.route_mismatches + other.route_mismatches,
        )

    def to_dict(self) -> dict:
        return {
            "epsilon": self.epsilon,
            "placements_total": self.placements_total,
            "violations_total": self.violations_total,
            "pass": self.passed,
            "worst_margin": self.worst_margin,
            "route_mismatches": self.route_mismatches,
            "per_scale": [dict(s) for s in self.per_scale],
        }


def no_copy_check(spec: AnnulusSpec, pattern: Pattern, leading: Real,
                  j_list: Sequence[int], placements_per_scale: int,
                  seed: int = 0, pattern_epsilon: Optional[float] = None,
                  box_scale: float = 10.0) -> NoCopyReport:
    """Sample dilated line copies and confirm each has a point outside the set.

    A copy inside the set would put all its defining-function values mod 1
    into one interval of length 1-eps; a pattern whose gap stays below eps
    for every coefficient vector forbids that. Membership of every copy
    point is evaluated directly (extended precision), and the polynomial
    route is cross-checked; ``pattern_epsilon`` is the length the pattern
    was verified to hit and must not exceed the set's epsilon.
    """
    if pattern_epsilon is not None and pattern_epsilon > spec.epsilon + 1e-12:
        raise ValueError(
            f"inconsistent epsilon: pattern verified at {pattern_epsilon}, "
            f"set built with {spec.epsilon}"
        )
    p, d = spec.exponent, spec.dimension
    w = spec.band_halfwidth
    ks = np.asarray(pattern.indices, dtype=float)
    lead = leading if isinstance(leading, Fraction) else float(leading)
    if isinstance(lead, Fraction):
        a, b = lead.numerator, lead.denominator
        lead_vals = np.array([(a * pow(k, p, b)) % b for k in pattern.indices],
                             dtype=float) / b
    else:
        lead_vals = np.array([(lead * k ** p) % 1.0 for k in pattern.indices])

    children = np.random.SeedSequence(seed).spawn(len(j_list))
    per_scale = []
    total_violations = 0
    mismatches = 0
    worst_margin = math.inf
    for j, child in zip(j_list, children):
        if float(lead) + j <= 0:
            raise ValueError(f"scale index {j} leaves leading + j <= 0")
        r = (float(lead) + j) ** (1.0 / p)
        rng = np.random.default_rng(child)
        L = box_scale * r
        xs = (rng.random((placements_per_scale, d)) - 0.5) * 2 * L
        vs = sample_lp_sphere(rng, placements_per_scale, d, p)

        # polynomial route: j*k^p is an integer and drops mod 1, the leading
        # rational term comes from the exact table, the rest from the
        # binomial coefficients of each placement (constant term included,
        # it aligns the values with the membership band)
        if p % 2 == 0:
            sgn = np.ones_like(vs)
        else:
            sgn = np.where(vs >= 0, 1.0, -1.0)
        vals = np.broadcast_to(lead_vals, (placements_per_scale, len(ks))).copy()
        for l in range(p):
            B_l = math.comb(p, l) * r ** l * (sgn * xs ** (p - l) * vs ** l).sum(axis=1)
            vals = (vals + (B_l[:, None] * ks[None, :] ** l) % 1.0) % 1.0
        poly_dist = np.minimum(vals % 1.0, 1.0 - vals % 1.0)
        poly_inside_all = (poly_dist < w).all(axis=1)

        # direct route in extended precision
        direct_inside_all = np.empty(placements_per_scale, dtype=bool)
        margins = np.empty(placements_per_scale)
        chunk = 2048
        for lo in range(0, placements_per_scale, chunk):
            hi = min(lo + chunk, placements_per_scale)
            X = xs[lo:hi].astype(np.longdouble)
            V = vs[lo:hi].astype(np.longdouble)
            Y = X[:, None, :] + np.longdouble(r) * ks[None, :, None] * V[:, None, :]
            S = sgn[lo:hi].astype(np.longdouble)
            F = (S[:, None, :] * Y ** p).sum(axis=2)
            frac = F % np.longdouble(1.0)
            dist = np.minimum(frac, np.longdouble(1.0) - frac).astype(float)
            direct_inside_all[lo:hi] = (dist < w).all(axis=1)
            margins[lo:hi] = (dist - w).max(axis=1)

        v_count = int(direct_inside_all.sum())
        total_violations += v_count
        mismatches += int((direct_inside_all != poly_inside_all).sum())
        worst_margin = min(worst_margin, float(margins.min()))
        per_scale.append({
            "j": int(j),
            "scale": r,
            "placements": placements_per_scale,
            "violations": v_count,
            "worst_margin": float(margins.min()),
        })

    return NoCopyReport(
        epsilon=spec.epsilon,
        placements_total=placements_per_scale * len(j_list),
        violations_total=total_violations,
        per_scale=tuple(per_scale),
        worst_margin=worst_margin,
        route_mismatches=mismatches,
    )
