"""Hitting patterns for polynomial sequences mod 1.

Constructs index patterns P (random thinning of {0..Q-1}, or the elementary
block pattern {0..n-1}) and verifies the hitting property: for coefficient
vectors B, the points (A k^p + B_{p-1} k^{p-1} + ... + B_1 k) mod 1 with
k in P must meet every interval of a prescribed length, equivalently their
max circular gap must stay below it.

Verification is exact. With A = a/b rational and each lower coefficient a
dyadic u_i/2^s, every point is an integer over the common denominator
D = b * 2^s; choosing s = 62 - bitlen(b) keeps D and all intermediates
inside uint64, so the whole scan (nets of 10^7 cells and beyond) runs as
vectorized integer arithmetic with no rounding anywhere.
"""

from __future__ import annotations

import itertools
import math
import random
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional, Sequence

import numpy as np

from .torus import BudgetError, Real, TorusInterval, max_circular_gap

NET_CELL_BUDGET = 20_000_000
FISHER_YATES_CUTOFF = 1 << 20
_KERNEL_CHUNK = 1 << 15

_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def is_prime_64(n: int) -> bool:
    """Deterministic Miller-Rabin, valid for all n < 2^64."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, r = n - 1, 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def bertrand_prime(n: int, p: int) -> int:
    """Smallest prime above n^(2^p); Bertrand guarantees one below 2*n^(2^p)."""
    if n < 2 or p < 1:
        raise ValueError("need n >= 2 and p >= 1")
    lower = n ** (2 ** p)
    if lower >= 1 << 62:
        raise ValueError(f"parameter range: n^(2^p) = {lower} exceeds 2^62")
    q = lower + 1
    while not is_prime_64(q):
        q += 1
    assert q < 2 * lower, "Bertrand interval exhausted (impossible)"
    return q


@dataclass(frozen=True)
class Pattern:
    """A sorted set of integer indices, optionally confined to {0..universe-1}."""

    indices: tuple
    universe: int = 0
    provenance: str = "explicit"

    def __post_init__(self):
        idx = tuple(sorted(int(k) for k in self.indices))
        if len(set(idx)) != len(idx):
            raise ValueError("pattern indices must be distinct")
        if self.universe and idx and not (0 <= idx[0] and idx[-1] < self.universe):
            raise ValueError("pattern index outside universe")
        object.__setattr__(self, "indices", idx)

    @property
    def n(self) -> int:
        return len(self.indices)

    def to_dict(self) -> dict:
        return {
            "indices": list(self.indices),
            "n": self.n,
            "universe": self.universe,
            "provenance": self.provenance,
        }


def thin_pattern(n: int, universe: int, seed: int) -> Pattern:
    """Uniform random n-subset of {0..universe-1}, deterministic given seed.

    Fisher-Yates prefix below the cutoff, Floyd's subset sampling above it
    (both draw from random.Random(seed), so reruns reproduce exactly).
    """
    if n > universe:
        raise ValueError(f"cannot thin to {n} indices out of {universe}")
    if n < 1:
        raise ValueError("need n >= 1")
    rng = random.Random(seed)
    if universe <= FISHER_YATES_CUTOFF:
        pool = list(range(universe))
        for i in range(n):
            j = rng.randrange(i, universe)
            pool[i], pool[j] = pool[j], pool[i]
        chosen = pool[:n]
    else:
        chosen_set = set()
        for j in range(universe - n, universe):
            t = rng.randrange(j + 1)
            chosen_set.add(t if t not in chosen_set else j)
        chosen = list(chosen_set)
    return Pattern(tuple(chosen), universe, f"thinned(seed={seed})")


def elementary_pattern(n: int):
    """Arithmetic progression {0..n-1} with leading coefficient 1/m^2, m = floor(sqrt(n)).

    The m full blocks {i*m + l} inside the pattern guarantee, for every real
    B, a walk around the circle with steps below 5/m, so the value set meets
    every interval of length 5/m <= 10/sqrt(n).
    """
    if n < 4:
        raise ValueError("elementary pattern needs n >= 4")
    m = math.isqrt(n)
    return Pattern(tuple(range(n)), 0, "elementary"), Fraction(1, m * m)


@dataclass(frozen=True)
class PolySeqSpec:
    """Polynomial A k^p + c_{p-1} k^{p-1} + ... + c_1 k evaluated mod 1.

    ``leading`` is the degree-p coefficient; ``lower`` holds the coefficients
    of k^1..k^{p-1} in increasing degree. Exact mode (all Fractions) reduces
    mod 1 in rational arithmetic, bit-exactly for any k.
    """

    degree: int
    leading: Real
    lower: tuple = ()

    def __post_init__(self):
        if self.degree < 1:
            raise ValueError("degree must be >= 1")
        lower = tuple(self.lower)
        if not lower and self.degree > 1:
            zero = Fraction(0) if isinstance(self.leading, Fraction) else 0.0
            lower = (zero,) * (self.degree - 1)
        if len(lower) != self.degree - 1:
            raise ValueError(f"expected {self.degree - 1} lower coefficients")
        if self.leading == 0:
            raise ValueError("leading coefficient must be nonzero")
        object.__setattr__(self, "lower", lower)

    @property
    def is_exact(self) -> bool:
        return isinstance(self.leading, Fraction) and all(
            isinstance(c, Fraction) for c in self.lower
        )

    def value_at(self, k: int) -> Real:
        """x_k mod 1; Fraction in exact mode."""
        if self.is_exact:
            acc = self.leading * k ** self.degree
            for i, c in enumerate(self.lower, start=1):
                acc += c * k ** i
            return acc % 1
        acc = (float(self.leading) * k ** self.degree) % 1.0
        for i, c in enumerate(self.lower, start=1):
            acc = (acc + (float(c) * k ** i) % 1.0) % 1.0
        return acc

    def phase(self, k: int, multiplier: int = 1) -> Real:
        """m * x_k mod 1, reduced exactly in exact mode."""
        if self.is_exact:
            acc = multiplier * self.leading * k ** self.degree
            for i, c in enumerate(self.lower, start=1):
                acc += multiplier * c * k ** i
            return acc % 1
        return (multiplier * self.value_at(k)) % 1.0

    def values(self, ks: Iterable[int]) -> np.ndarray:
        """Float values with the leading rational term reduced exactly first.

        For a rational leading a/b the k^p contribution is (a*k^p mod b)/b,
        computed in integer arithmetic, so large k^p costs no precision.
        """
        ks = list(int(k) for k in ks)
        if isinstance(self.leading, Fraction):
            a, b = self.leading.numerator, self.leading.denominator
            lead = np.array(
                [(a * pow(k, self.degree, b)) % b for k in ks], dtype=float
            ) / b
        else:
            lead = np.array(
                [(float(self.leading) * k ** self.degree) % 1.0 for k in ks], dtype=float
            )
        acc = lead
        for i, c in enumerate(self.lower, start=1):
            term = np.array([(float(c) * k ** i) % 1.0 for k in ks], dtype=float)
            acc = (acc + term) % 1.0
        return acc

    def negated(self) -> "PolySeqSpec":
        return PolySeqSpec(self.degree, -self.leading, tuple(-c for c in self.lower))


def pattern_gap(pattern: Pattern, leading: Real, degree: int, coeffs: Sequence[Real]) -> Real:
    """Max circular gap of {x_k : k in pattern} for one coefficient vector."""
    spec = PolySeqSpec(degree, leading, tuple(coeffs))
    return max_circular_gap([spec.value_at(k) for k in pattern.indices])


# ---------------------------------------------------------------------------
# Nets


@dataclass(frozen=True)
class NetSpec:
    """Coefficient grids and the reference interval family for net verification.

    mesh_i = epsilon / (100 * p * Q^i * resolution_scale); resolution_scale 1
    is the recipe value (then sum_i mesh_i * Q^i <= epsilon/100), smaller
    scales coarsen the grids for desk-scale budgets and are flagged.
    """

    degree: int
    universe: int
    epsilon: float
    resolution_scale: float
    meshes: tuple
    sizes: tuple
    interval_stride: float
    interval_length: float
    interval_count: int
    total_cells: int

    @property
    def full_resolution(self) -> bool:
        return self.resolution_scale == 1.0

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "universe": self.universe,
            "epsilon": self.epsilon,
            "resolution_scale": self.resolution_scale,
            "meshes": list(self.meshes),
            "sizes": list(self.sizes),
            "interval_stride": self.interval_stride,
            "interval_length": self.interval_length,
            "interval_count": self.interval_count,
            "total_cells": self.total_cells,
            "full_resolution": self.full_resolution,
        }


def build_nets(degree: int, universe: int, epsilon: float,
               resolution_scale: float = 1.0,
               max_cells: int = NET_CELL_BUDGET) -> NetSpec:
    """Mesh sizes and grid cardinalities for the coefficient nets."""
    if not 0 < epsilon < 1:
        raise ValueError("epsilon must be in (0, 1)")
    if universe < 2:
        raise ValueError("universe must be >= 2")
    if not 0 < resolution_scale <= 1:
        raise ValueError("resolution_scale must be in (0, 1]")
    meshes, sizes = [], []
    total = 1
    for i in range(1, degree):
        mesh = epsilon / (100 * degree * universe ** i) / resolution_scale
        size = math.ceil(1.0 / mesh)
        if size > max_cells:
            raise BudgetError(
                f"B-net for the k^{i} coefficient needs {size} points "
                f"(Q^{i}/epsilon = {universe ** i / epsilon:.3g}); "
                f"budget {max_cells}. Lower resolution_scale or the budget."
            )
        meshes.append(mesh)
        sizes.append(size)
        total *= size
    if total > max_cells:
        raise BudgetError(
            f"net has {total} cells total, over budget {max_cells} "
            f"(sizes {sizes}); lower resolution_scale."
        )
    return NetSpec(
        degree=degree,
        universe=universe,
        epsilon=epsilon,
        resolution_scale=resolution_scale,
        meshes=tuple(meshes),
        sizes=tuple(sizes),
        interval_stride=epsilon / 100,
        interval_length=0.9 * epsilon,
        interval_count=math.ceil(100 / epsilon),
        total_cells=total,
    )


def scale_for_budget(degree: int, universe: int, epsilon: float, max_cells: int) -> float:
    """Largest resolution_scale (capped at 1) whose net fits in max_cells."""
    total = 1.0
    for i in range(1, degree):
        total *= 100 * degree * universe ** i / epsilon
    if total <= max_cells:
        return 1.0
    dims = degree - 1
    return float((max_cells / total) ** (1.0 / dims)) * 0.999


# ---------------------------------------------------------------------------
# Exact evaluation kernel


def _scale_bits(denominator: int) -> int:
    s = 62 - denominator.bit_length()
    if s < 8:
        raise BudgetError(
            f"denominator {denominator} leaves only {s} fixed-point bits; "
            "exact uint64 kernel needs at least 8"
        )
    return s


class _ExactKernel:
    """Per-pattern tables for exact gap evaluation over uint64 coefficients."""

    def __init__(self, pattern: Pattern, leading: Fraction, degree: int):
        a, b = leading.numerator % leading.denominator, leading.denominator
        self.s = _scale_bits(b)
        self.denominator = b << self.s
        ks = pattern.indices
        self.n = len(ks)
        self.lead = np.array(
            [((a * pow(k, degree, b)) % b) << self.s for k in ks], dtype=np.uint64
        )
        self.kpows = [
            np.array([pow(k, i, 1 << self.s) for k in ks], dtype=np.uint64)
            for i in range(1, degree)
        ]
        self.mask = np.uint64((1 << self.s) - 1)
        self.b = np.uint64(b)
        self.big = np.uint64(self.denominator)

    def gaps(self, u: np.ndarray) -> np.ndarray:
        """Exact gap numerators for rows of coefficient numerators u/2^s.

        u has shape (rows, degree-1), dtype uint64. uint64 products wrap mod
        2^64, and masking keeps the low s bits, which is exactly the product
        mod 2^s; everything stays below 2^63 so no overflow occurs.
        """
        rows = u.shape[0]
        acc = np.zeros((rows, self.n), dtype=np.uint64)
        for d, kp in enumerate(self.kpows):
            acc += (u[:, d][:, None] * kp[None, :]) & self.mask
        acc &= self.mask
        vals = self.lead[None, :] + self.b * acc
        vals -= self.big * (vals >= self.big).astype(np.uint64)
        vals.sort(axis=1)
        if self.n == 1:
            return np.full(rows, int(self.denominator), dtype=np.uint64)
        inner = np.diff(vals, axis=1).max(axis=1)
        wrap = self.big - vals[:, -1] + vals[:, 0]
        return np.maximum(inner, wrap)


def _scan_chunks(kernel: _ExactKernel, chunks, threads: int):
    """Max-gap reduction over coefficient chunks; deterministic merge.

    Each chunk yields (gap, coefficient tuple); the global best is the max
    gap with ties broken by the smallest coefficient tuple, so threaded and
    serial scans return identical results.
    """
    def work(chunk):
        u = chunk
        g = kernel.gaps(u)
        j = int(g.argmax())
        return int(g[j]), tuple(int(x) for x in u[j]), u.shape[0]

    results = []
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, chunks))
    else:
        results = [work(c) for c in chunks]
    tested = sum(r[2] for r in results)
    best_gap, best_u, _ = max(results, key=lambda r: (r[0], tuple(-x for x in r[1])))
    return best_gap, best_u, tested


@dataclass(frozen=True)
class HittingReport:
    """Outcome of a hitting verification run; pass iff worst gap <= epsilon
    (sampled mode) or <= 9/10 epsilon - 2*slack (net mode)."""

    mode: str                       # "net" or "sampled"
    epsilon: float
    passed: bool
    worst_gap: float
    tested: int
    worst_coeffs: tuple = ()
    worst_gap_exact: Optional[tuple] = None      # (num, den)
    worst_coeffs_exact: Optional[tuple] = None   # ((num, scale_bits), ...)
    slack: float = 0.0
    epsilon_guaranteed: Optional[float] = None
    resolution_scale: Optional[float] = None
    full_resolution: Optional[bool] = None
    seed: Optional[int] = None
    pattern_n: Optional[int] = None
    universe: Optional[int] = None
    degree: Optional[int] = None

    def merge(self, other: "HittingReport") -> "HittingReport":
        """Combine two runs of the same configuration: worst case wins."""
        if (self.mode, self.epsilon) != (other.mode, other.epsilon):
            raise ValueError("cannot merge reports with different configurations")
        worse = self if self.worst_gap >= other.worst_gap else other
        return HittingReport(
            mode=self.mode,
            epsilon=self.epsilon,
            passed=self.passed and other.passed,
            worst_gap=worse.worst_gap,
            tested=self.tested + other.tested,
            worst_coeffs=worse.worst_coeffs,
            worst_gap_exact=worse.worst_gap_exact,
            worst_coeffs_exact=worse.worst_coeffs_exact,
            slack=self.slack,
            epsilon_guaranteed=worse.epsilon_guaranteed,
            resolution_scale=self.resolution_scale,
            full_resolution=self.full_resolution,
            seed=self.seed,
            pattern_n=self.pattern_n,
            universe=self.universe,
            degree=self.degree,
        )

    def to_dict(self) -> dict:
        d = {
            "mode": self.mode,
            "epsilon": self.epsilon,
            "pass": self.passed,
            "worst_gap": self.worst_gap,
            "tested": self.tested,
            "worst_coeffs": list(self.worst_coeffs),
        }
        if self.worst_gap_exact is not None:
            d["worst_gap_exact"] = {"num": self.worst_gap_exact[0],
                                    "den": self.worst_gap_exact[1]}
        if self.worst_coeffs_exact is not None:
            d["worst_coeffs_exact"] = [
                {"num": num, "scale_bits": s} for num, s in self.worst_coeffs_exact
            ]
        for key in ("slack", "epsilon_guaranteed", "resolution_scale",
                    "full_resolution", "seed", "pattern_n", "universe", "degree"):
            v = getattr(self, key)
            if v is not None:
                d[key] = v
        return d


def _require_exact_leading(leading) -> Fraction:
    if not isinstance(leading, Fraction):
        raise ValueError("net verification demands exact coefficients; "
                         "pass the leading coefficient as a Fraction")
    return leading


def verify_hitting_net(pattern: Pattern, leading: Fraction, degree: int,
                       epsilon, nets: NetSpec,
                       threads: int = 1, chunk: int = _KERNEL_CHUNK) -> HittingReport:
    """Exhaustive exact scan over the coefficient net, with transfer margin.

    The net grids are realized as dyadic multiples of w_i/2^s with
    w_i = floor(mesh_i * 2^s), so the realized mesh never exceeds the
    requested one and every point value is exact. Any real coefficient
    vector lies within the realized mesh of a net point, shifting each value
    by at most slack/2 = sum_i mesh_i * Q^i, hence:

      * every interval of length worst_gap + slack is hit for EVERY real
        coefficient vector (recorded as epsilon_guaranteed), and
      * the run passes iff worst_gap <= (9/10) * epsilon - slack.

    epsilon="auto" picks the smallest epsilon that passes.
    """
    leading = _require_exact_leading(leading)
    if pattern.universe == 0 or leading != Fraction(1, pattern.universe):
        raise ValueError("net verification expects leading = 1/universe "
                         "with the pattern confined to {0..universe-1}")
    if nets.degree != degree or nets.universe != pattern.universe:
        raise ValueError("net spec does not match the pattern")

    kernel = _ExactKernel(pattern, leading, degree)
    s = kernel.s
    dims = degree - 1
    ws, counts = [], []
    for mesh in nets.meshes:
        w = int(mesh * (1 << s))
        if w < 1:
            raise BudgetError(
                f"mesh {mesh} below fixed-point resolution 2^-{s}; coarsen the net"
            )
        ws.append(w)
        counts.append(-(-(1 << s) // w))

    slack = 2 * sum(Fraction(w, 1 << s) * pattern.universe ** (i + 1)
                    for i, w in enumerate(ws))

    def chunks():
        if dims == 0:
            yield np.zeros((1, 0), dtype=np.uint64)
            return
        inner = int(np.argmax(counts))
        outer_dims = [d for d in range(dims) if d != inner]
        inner_vals = np.arange(counts[inner], dtype=np.uint64) * np.uint64(ws[inner])

        def emit(prefix):
            for lo in range(0, counts[inner], chunk):
                block = inner_vals[lo:lo + chunk]
                u = np.zeros((len(block), dims), dtype=np.uint64)
                u[:, inner] = block
                for d, t in zip(outer_dims, prefix):
                    u[:, d] = np.uint64(t * ws[d])
                yield u

        if not outer_dims:
            yield from emit(())
        else:
            for prefix in itertools.product(*(range(counts[d]) for d in outer_dims)):
                yield from emit(prefix)

    best_gap, best_u, tested = _scan_chunks(kernel, chunks(), threads)
    gap_frac = Fraction(best_gap, kernel.denominator)
    # lengths above 1 are meaningless on the circle; a clamped guarantee of
    # 1 means the net was too coarse to certify anything
    guaranteed = min(gap_frac + slack, Fraction(1))

    if epsilon == "auto":
        eps_frac = min((gap_frac + slack) * Fraction(10, 9), Fraction(1))
        epsilon_val = float(eps_frac)
    else:
        epsilon_val = float(epsilon)
        eps_frac = Fraction(epsilon_val)
    passed = gap_frac <= Fraction(9, 10) * eps_frac - slack

    return HittingReport(
        mode="net",
        epsilon=epsilon_val,
        passed=bool(passed),
        worst_gap=float(gap_frac),
        tested=tested,
        worst_coeffs=tuple(u / (1 << s) for u in best_u),
        worst_gap_exact=(best_gap, kernel.denominator),
        worst_coeffs_exact=tuple((u, s) for u in best_u),
        slack=float(slack),
        epsilon_guaranteed=float(guaranteed),
        resolution_scale=nets.resolution_scale,
        full_resolution=nets.full_resolution,
        pattern_n=pattern.n,
        universe=pattern.universe,
        degree=degree,
    )


def verify_hitting_sampled(pattern: Pattern, leading, degree: int, epsilon: float,
                           n_samples: int, seed: int,
                           threads: int = 1, chunk: int = _KERNEL_CHUNK) -> HittingReport:
    """Monte Carlo surrogate: worst gap over random coefficient vectors.

    Coefficients are drawn as exact dyadics u/2^s (uniform on the fixed-point
    grid) when the leading coefficient is rational, so each sampled gap is
    exact; no universal guarantee is implied either way.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be >= 1")
    dims = degree - 1
    rng = np.random.default_rng(seed)

    if isinstance(leading, Fraction):
        kernel = _ExactKernel(pattern, leading, degree)
        s = kernel.s

        def chunks():
            remaining = n_samples
            while remaining > 0:
                take = min(chunk, remaining)
                yield rng.integers(0, 1 << s, size=(take, dims), dtype=np.uint64)
                remaining -= take

        best_gap, best_u, tested = _scan_chunks(kernel, chunks(), threads)
        gap_frac = Fraction(best_gap, kernel.denominator)
        return HittingReport(
            mode="sampled",
            epsilon=float(epsilon),
            passed=bool(gap_frac <= Fraction(float(epsilon))),
            worst_gap=float(gap_frac),
            tested=tested,
            worst_coeffs=tuple(u / (1 << s) for u in best_u),
            worst_gap_exact=(best_gap, kernel.denominator),
            worst_coeffs_exact=tuple((u, s) for u in best_u),
            seed=seed,
            pattern_n=pattern.n,
            universe=pattern.universe,
            degree=degree,
        )

    # Float leading coefficient: plain float evaluation.
    ks = np.asarray(pattern.indices, dtype=float)
    lead_vals = np.array([(float(leading) * k ** degree) % 1.0
                          for k in pattern.indices])
    worst, worst_b = 0.0, ()
    remaining = n_samples
    while remaining > 0:
        take = min(chunk, remaining)
        B = rng.random((take, dims))
        vals = np.broadcast_to(lead_vals, (take, len(ks))).copy()
        for d in range(dims):
            vals = (vals + B[:, d][:, None] * ks[None, :] ** (d + 1)) % 1.0
        vals.sort(axis=1)
        if len(ks) == 1:
            g = np.ones(take)
        else:
            g = np.maximum(np.diff(vals, axis=1).max(axis=1),
                           1.0 - vals[:, -1] + vals[:, 0])
        j = int(g.argmax())
        if g[j] > worst:
            worst, worst_b = float(g[j]), tuple(float(x) for x in B[j])
        remaining -= take
    return HittingReport(
        mode="sampled",
        epsilon=float(epsilon),
        passed=worst <= float(epsilon),
        worst_gap=worst,
        tested=n_samples,
        worst_coeffs=worst_b,
        seed=seed,
        pattern_n=pattern.n,
        universe=pattern.universe,
        degree=degree,
    )


# ---------------------------------------------------------------------------
# Elementary construction


def find_hitter(n: int, B: float, target: TorusInterval) -> int:
    """Index k in {0..n-1} with (k^2/m^2 + B k) mod 1 inside the target.

    Two-step constructive search, not an exhaustive scan: pick the smallest
    block index i with (B + 2i/m) mod 1 in [1/m, 3/m), then walk l = 0..m-1
    through positions stepping by theta + (2l+1)/m^2 < 5/m until the target
    (any interval of length >= min(1, 10/sqrt(n))) is entered. Membership of
    the returned index is confirmed by direct evaluation; exhausting the walk
    would falsify the construction and raises.
    """
    if n < 16:
        raise ValueError("find_hitter needs n >= 16")
    m = math.isqrt(n)
    needed = min(1.0, 10.0 / math.sqrt(n))
    if float(target.length) < needed - 1e-12:
        raise ValueError(f"target length {target.length} below {needed}")
    m2 = m * m

    def value(k: int) -> float:
        return ((k * k % m2) / m2 + B * k) % 1.0

    admissible = [i for i in range(m)
                  if 1.0 / m <= (B + 2.0 * i / m) % 1.0 < 3.0 / m]
    for i in admissible:
        for l in range(m):
            k = i * m + l
            if target.contains(value(k)):
                return k
    raise RuntimeError(
        "block walk found no hitter; this contradicts the construction "
        f"(n={n}, B={B}, target start={target.start}, length={target.length})"
    )


# ---------------------------------------------------------------------------
# Calibration


def _sample_seed(pattern_seed: int) -> int:
    """Verification stream for a pattern seed (documented, reproducible)."""
    return (pattern_seed * 0x9E3779B97F4A7C15 + 0x5EED) % (1 << 63)


@dataclass(frozen=True)
class CalibrationResult:
    """Smallest epsilon passing sampled verification, with the retry log."""

    achieved: bool
    target: Optional[float]
    epsilon_min: float
    pattern: Pattern
    pattern_seed: int
    n_samples: int
    attempts: tuple  # of (seed, worst_gap)
    report: HittingReport

    def to_dict(self) -> dict:
        return {
            "achieved": self.achieved,
            "target": self.target,
            "epsilon_min": self.epsilon_min,
            "pattern_seed": self.pattern_seed,
            "n_samples": self.n_samples,
            "attempts": [{"seed": s, "worst_gap": w} for s, w in self.attempts],
        }


def calibrate_sampled(n: int, degree: int, universe: int, seed: int = 0,
                      n_samples: int = 10_000, retries: int = 1,
                      epsilon_target: Optional[float] = None,
                      threads: int = 1) -> CalibrationResult:
    """Measure the smallest epsilon passing sampled verification.

    Draws a fresh pattern per attempt (seeds seed, seed+1, ...), each checked
    against its own derived sample stream; stops early when an attempt's
    worst gap reaches epsilon_target. The result reports the best attempt and
    the full log. This measures the constant achievable at this scale; it
    proves nothing about other coefficient vectors.
    """
    leading = Fraction(1, universe)
    attempts = []
    best = None
    for t in range(max(1, retries)):
        pattern_seed = seed + t
        pattern = thin_pattern(n, universe, pattern_seed)
        report = verify_hitting_sampled(
            pattern, leading, degree, epsilon=1.0, n_samples=n_samples,
            seed=_sample_seed(pattern_seed), threads=threads,
        )
        attempts.append((pattern_seed, report.worst_gap))
        if best is None or report.worst_gap < best[1].worst_gap:
            best = (pattern, report, pattern_seed)
        if epsilon_target is not None and report.worst_gap <= epsilon_target:
            break
    pattern, report, pattern_seed = best
    achieved = epsilon_target is None or report.worst_gap <= epsilon_target
    return CalibrationResult(
        achieved=achieved,
        target=epsilon_target,
        epsilon_min=report.worst_gap,
        pattern=pattern,
        pattern_seed=pattern_seed,
        n_samples=n_samples,
        attempts=tuple(attempts),
        report=report,
    )
