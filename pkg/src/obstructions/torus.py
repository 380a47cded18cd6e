"""Arithmetic on the circle R/Z: gaps, exact interval discrepancy, Weyl sums.

Points live in [0, 1). A point is "exact" when its value is a Fraction
(fixed-point dyadics u/2^s are the common case); exact arithmetic is closed
and bit-exact, float arithmetic is ordinary IEEE double. Every operation in
this module is a pure function of its inputs.
"""

from __future__ import annotations

import cmath
import dataclasses
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

import numpy as np

Real = Union[float, Fraction]

DISCREPANCY_CAP = 100_000


class BudgetError(ValueError):
    """An exact computation would exceed its configured enumeration budget."""


def _mod1(value: Real) -> Real:
    if isinstance(value, Fraction):
        return value % 1
    return float(value) % 1.0


@dataclass(frozen=True)
class TorusPoint:
    """A point on R/Z; Fraction value means exact mode, float means float mode."""

    value: Real

    def __post_init__(self):
        object.__setattr__(self, "value", _mod1(self.value))

    @classmethod
    def from_fixed(cls, numerator: int, scale_bits: int = 64) -> "TorusPoint":
        """Exact fixed-point u/2^s, reduced mod 1."""
        return cls(Fraction(numerator % (1 << scale_bits), 1 << scale_bits))

    @classmethod
    def from_float(cls, x: float) -> "TorusPoint":
        return cls(float(x) % 1.0)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.value, Fraction)

    def to_float(self) -> float:
        return float(self.value)

    def __add__(self, other: "TorusPoint") -> "TorusPoint":
        return TorusPoint(_mod1(self.value + other.value))

    def __neg__(self) -> "TorusPoint":
        return TorusPoint(_mod1(-self.value))

    def times(self, k: int) -> "TorusPoint":
        """Integer multiple k*x mod 1, exact in exact mode."""
        return TorusPoint(_mod1(self.value * k))

    def distance_to_integers(self) -> Real:
        """Arclength distance to 0, i.e. min(x, 1-x), in [0, 1/2]."""
        v = self.value
        return min(v, 1 - v)


@dataclass(frozen=True)
class TorusInterval:
    """Arc [start, start+length) or [start, start+length] on R/Z.

    Membership wraps around: x is inside iff (x - start) mod 1 < length
    (half-open) or <= length (closed). Length 0 is allowed only for the
    closed degenerate interval {start}, which shows up as a discrepancy
    witness.
    """

    start: Real
    length: Real
    closure: str = "half-open"  # or "closed"

    def __post_init__(self):
        if self.closure not in ("half-open", "closed"):
            raise ValueError(f"unknown closure {self.closure!r}")
        if not 0 <= self.length <= 1:
            raise ValueError(f"interval length {self.length} outside [0, 1]")
        if self.length == 0 and self.closure != "closed":
            raise ValueError("zero-length interval must be closed")
        object.__setattr__(self, "start", _mod1(self.start))

    def contains(self, x: Real) -> bool:
        t = _mod1(x - self.start) if isinstance(x, Fraction) and isinstance(self.start, Fraction) \
            else (float(x) - float(self.start)) % 1.0
        if self.closure == "closed":
            return t <= self.length or t == 0
        return t < self.length

    def to_dict(self) -> dict:
        return {
            "start": _number_json(self.start),
            "length": _number_json(self.length),
            "closure": self.closure,
        }


def _number_json(v: Real):
    if isinstance(v, Fraction):
        return {"num": v.numerator, "den": v.denominator}
    return float(v)


def _as_value(point) -> Real:
    if isinstance(point, TorusPoint):
        return point.value
    if isinstance(point, Fraction):
        return point % 1
    return float(point) % 1.0


def _coerce(points) -> tuple[list, bool]:
    """Normalize a point sequence; exact iff every entry is a Fraction."""
    values = [_as_value(pt) for pt in points]
    exact = all(isinstance(v, Fraction) for v in values)
    if not exact:
        values = [float(v) for v in values]
    return values, exact


def max_circular_gap(points) -> Real:
    """Largest arc between consecutive points (with wrap-around).

    A point set meets every closed interval of length eps iff its max
    circular gap is <= eps. A single point (or fully coincident set) has
    gap 1. Exact (Fraction) output when all inputs are exact.
    """
    values, exact = _coerce(points)
    if not values:
        raise ValueError("empty point set")
    if exact:
        vs = sorted(values)
        gap = max(
            max((b - a) for a, b in zip(vs, vs[1:])) if len(vs) > 1 else Fraction(0),
            1 - vs[-1] + vs[0],
        )
        return gap
    vs = np.sort(np.asarray(values, dtype=float))
    if len(vs) == 1:
        return 1.0
    return float(max(np.diff(vs).max(), 1.0 - vs[-1] + vs[0]))


def _interval_count(sorted_values, start, length, lo_closed: bool, hi_closed: bool) -> int:
    """Exact point count in a wrapped interval with explicit endpoint closures."""
    cnt = 0
    for x in sorted_values:
        t = _mod1(x - start)
        if t == 0:
            inside = lo_closed
        elif t < length:
            inside = True
        elif t == length:
            inside = hi_closed
        else:
            inside = False
        if length == 0:
            inside = (t == 0) and lo_closed and hi_closed
        cnt += inside
    return cnt


@dataclass(frozen=True)
class DiscrepancyReport:
    """Exact sup over all circle intervals of |count/N - length|."""

    n_points: int
    exact_discrepancy: float
    witness_interval: TorusInterval
    witness_flag: str = "attained"  # or "limit"
    exact_value: Optional[Fraction] = None
    et_bound: Optional[float] = None
    et_cutoff: Optional[int] = None

    def __post_init__(self):
        n = self.n_points
        if not (1.0 / (2 * n) - 1e-12 <= self.exact_discrepancy <= 1.0 + 1e-12):
            raise ValueError(
                f"discrepancy {self.exact_discrepancy} outside [1/(2N), 1] for N={n}"
            )

    def to_dict(self) -> dict:
        d = {
            "n_points": self.n_points,
            "exact_discrepancy": self.exact_discrepancy,
            "witness_interval": self.witness_interval.to_dict(),
            "witness_flag": self.witness_flag,
        }
        if self.exact_value is not None:
            d["exact_value"] = _number_json(self.exact_value)
        if self.et_bound is not None:
            d["et_bound"] = self.et_bound
            d["et_cutoff"] = self.et_cutoff
        return d


def exact_discrepancy(points, et_cutoff: Optional[int] = None,
                      cap: int = DISCREPANCY_CAP) -> DiscrepancyReport:
    """Exact interval discrepancy of points on the circle.

    The sup over all intervals is attained among intervals whose endpoints
    sit at point positions: closed intervals maximize count-minus-length,
    open intervals maximize length-minus-count. Over sorted points y_0..y_{N-1}
    both families separate,

        excess  = max_i (y_i - i/N) + max_j ((j+1)/N - y_j)
        deficit = max_i (i/N - y_i) + max_j (y_j - (j-1)/N)

    because both pair objectives are N-periodic in the wrapped index, so the
    scan is O(N log N) instead of enumerating the O(N^2) candidate pairs.
    The witness interval attains the reported value (degenerate and
    full-circle-minus-a-point witnesses included).
    """
    values, exact = _coerce(points)
    if not values:
        raise ValueError("empty point set")
    if len(values) > cap:
        raise ValueError(f"N={len(values)} exceeds exact-discrepancy cap {cap}")

    n = len(values)
    ys = sorted(values)
    one = Fraction(1) if exact else 1.0

    g_excess = [ys[i] - Fraction(i, n) if exact else ys[i] - i / n for i in range(n)]
    f_excess = [Fraction(j + 1, n) - ys[j] if exact else (j + 1) / n - ys[j] for j in range(n)]
    g_deficit = [Fraction(i, n) - ys[i] if exact else i / n - ys[i] for i in range(n)]
    f_deficit = [ys[j] - Fraction(j - 1, n) if exact else ys[j] - (j - 1) / n for j in range(n)]

    i1 = max(range(n), key=g_excess.__getitem__)
    j1 = max(range(n), key=f_excess.__getitem__)
    i2 = max(range(n), key=g_deficit.__getitem__)
    j2 = max(range(n), key=f_deficit.__getitem__)
    excess = g_excess[i1] + f_excess[j1]
    deficit = g_deficit[i2] + f_deficit[j2]

    if excess >= deficit:
        # Closed interval [y_i, y_j]; a zero length means the degenerate
        # one-point interval (it attains multiplicity/N exactly).
        value = excess
        length = _mod1(ys[j1] - ys[i1])
        witness = TorusInterval(ys[i1], length, "closed")
        flag = "attained"
        rec = Fraction(_interval_count(ys, ys[i1], length, True, True), n) - length
    else:
        # Open interval (y_i, y_j); reported as the half-open interval with
        # the same endpoints and flagged "limit" since the sup is approached
        # by nudging the left endpoint into the gap.
        value = deficit
        length = _mod1(ys[j2] - ys[i2])
        if length == 0:
            length = one  # circle minus the start point
        witness = TorusInterval(ys[i2], length, "half-open")
        flag = "limit"
        rec = length - Fraction(_interval_count(ys, ys[i2], length, False, False), n)

    # The recount can only confirm or beat the separable bound; keep the max.
    if rec > value:
        value = rec

    report = DiscrepancyReport(
        n_points=n,
        exact_discrepancy=float(value),
        witness_interval=witness,
        witness_flag=flag,
        exact_value=value if exact else None,
    )
    if et_cutoff is not None:
        report = dataclasses.replace(
            report, et_bound=erdos_turan_bound(values, et_cutoff),
            et_cutoff=et_cutoff,
        )
    return report


def grid_discrepancy(points, grid: int = 100) -> float:
    """Lower-bound discrepancy estimate over grid^2 candidate intervals.

    Scans half-open intervals with endpoints on a uniform grid; the true
    discrepancy exceeds this value by at most 2/grid. Intended for point
    sets beyond the exact routine's cap (no cap here, O(N*grid) memory per
    sweep).
    """
    if grid < 2:
        raise ValueError("grid must be >= 2")
    values, _ = _coerce(points)
    if not values:
        raise ValueError("empty point set")
    pts = np.asarray([float(v) for v in values])
    n = len(pts)
    starts = np.arange(grid) / grid
    lengths = (np.arange(grid) + 1.0) / grid
    rel = (pts[None, :] - starts[:, None]) % 1.0
    rel.sort(axis=1)
    best = 0.0
    for row in rel:
        counts = np.searchsorted(row, lengths, side="left")
        best = max(best, float(np.abs(counts / n - lengths).max()))
    return best


def unit_phase(t: Real) -> complex:
    """e(t) = exp(2*pi*i*t) with phases folded into [0, 1/2] first.

    Folding makes negation of an exact phase conjugate the result bit for
    bit: e((1-t) mod 1) == conj(e(t)) exactly, not just approximately.
    """
    if isinstance(t, Fraction):
        t = t % 1
        if 2 * t > 1:
            return unit_phase(1 - t).conjugate()
        if 2 * t == 1:
            return complex(-1.0, 0.0)
        return cmath.exp(2j * cmath.pi * float(t))
    tf = float(t) % 1.0
    if tf == 0.5:
        return complex(-1.0, 0.0)
    if tf > 0.5:
        return cmath.exp(2j * cmath.pi * (tf - 1.0))
    return cmath.exp(2j * cmath.pi * tf)


def weyl_sum(poly, n_terms: int, multiplier: int = 1) -> complex:
    """Sum of e(m*f(k)) for k = 0..n_terms-1.

    ``poly`` is anything with a ``phase(k, multiplier)`` method returning
    f(k)*m mod 1 (exact Fraction or float), or a plain coefficient sequence
    (c_0, c_1, ..., c_p) in increasing degree. In exact mode the phase is
    reduced mod 1 in rational arithmetic before exponentiation, so the
    magnitude carries no precision loss from large k^p.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    if hasattr(poly, "phase"):
        phase = lambda k: poly.phase(k, multiplier)
    else:
        coeffs = list(poly)
        exact = all(isinstance(c, Fraction) for c in coeffs)

        def phase(k, _coeffs=coeffs, _exact=exact):
            if _exact:
                acc = Fraction(0)
                for i, c in enumerate(_coeffs):
                    acc += multiplier * c * k ** i
                return acc % 1
            acc = 0.0
            for i, c in enumerate(_coeffs):
                acc = (acc + (multiplier * float(c) * k ** i) % 1.0) % 1.0
            return acc

    total = 0j
    for k in range(n_terms):
        total += unit_phase(phase(k))
    return total


def erdos_turan_bound(points, cutoff: int) -> float:
    """Explicit Erdos-Turan discrepancy bound with constants (1, 3):

        D_N <= 1/(M+1) + 3 * sum_{m=1..M} |S_m| / (m*N),

    where S_m = sum_k e(m*x_k). Exact points are reduced mod 1 exactly
    before the float exponentials are taken.
    """
    if cutoff < 1:
        raise ValueError("cutoff must be >= 1")
    values, _ = _coerce(points)
    if not values:
        raise ValueError("empty point set")
    x = np.asarray([float(v) for v in values], dtype=float)
    n = len(x)
    total = 0.0
    block = max(1, (1 << 21) // max(n, 1))
    for lo in range(1, cutoff + 1, block):
        ms = np.arange(lo, min(lo + block, cutoff + 1), dtype=float)
        phases = np.outer(ms, x) % 1.0
        s = np.exp(2j * np.pi * phases).sum(axis=1)
        total += float((np.abs(s) / (ms * n)).sum())
    return 1.0 / (cutoff + 1) + 3.0 * total
