"""Monte Carlo and quadrature engine.

All stochastic operations in the library draw from counter-based Philox
streams keyed by ``(seed, substream_index)``, so results are bit-identical
across runs and across worker counts. Substream means are combined by a
fixed-order pairwise sum; the WAVETRACE_THREADS environment variable caps
the number of worker threads without affecting any result.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from numpy.polynomial.legendre import leggauss
from scipy import integrate as _sciint

from .errors import DomainError, QuadratureError, SamplingError

_CHUNK = 1 << 17  # samples per vectorized batch inside one substream


def substream(seed: int, index: int) -> np.random.Generator:
    """Philox4x64 generator for one substream of a seeded run."""
    key = np.array([np.uint64(seed & 0xFFFFFFFFFFFFFFFF), np.uint64(index)], dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _max_workers() -> int:
    raw = os.environ.get("WAVETRACE_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"WAVETRACE_THREADS must be an integer, got {raw!r}")
    return max(1, n)


def pairwise_sum(values: np.ndarray) -> np.ndarray:
    """Fixed-order pairwise reduction along axis 0 (deterministic)."""
    arr = np.asarray(values, dtype=float)
    while arr.shape[0] > 1:
        m = arr.shape[0] // 2
        head = arr[: 2 * m : 2] + arr[1 : 2 * m : 2]
        arr = np.concatenate([head, arr[2 * m :]], axis=0) if arr.shape[0] % 2 else head
    return arr[0]


@dataclass(frozen=True)
class MCEstimate:
    """A Monte Carlo result with its statistical error.

    ``stderr`` is purely statistical (sample standard deviation over the
    effective sample count, or between-substream spread when strata >= 8);
    deterministic quadrature errors are never mixed into it.
    """

    value: float
    stderr: float
    n: int
    seed: int
    strata: int
    flagged: int = 0

    def agrees_with(self, other: float, sigmas: float = 3.0, floor: float = 0.0) -> bool:
        return abs(self.value - other) <= max(sigmas * self.stderr, floor)


@dataclass
class StreamResult:
    """Vector-valued MC result, keeping per-substream means for reuse.

    Linear functionals of the output (e.g. quadrature in an auxiliary
    variable) can be applied to ``substream_means`` row by row, which
    yields the exact statistical error of the functional even when sample
    values are correlated across output components.
    """

    values: np.ndarray
    stderr: np.ndarray
    substream_means: np.ndarray  # (strata, *out_shape)
    n: int
    seed: int
    strata: int
    flagged: int = 0

    def linear_functional(self, weights: np.ndarray) -> MCEstimate:
        w = np.asarray(weights, dtype=float)
        per = self.substream_means @ w if self.substream_means.ndim == 2 else self.substream_means * w
        val = float(pairwise_sum(per) / self.strata)
        if self.strata >= 8:
            se = float(np.std(per, ddof=1) / math.sqrt(self.strata))
        else:
            se = float("nan")
        return MCEstimate(val, se, self.n, self.seed, self.strata, self.flagged)


def mc_stream(sample_fn, n: int, seed: int, strata: int = 16) -> StreamResult:
    """Average ``sample_fn(rng, m) -> (m, *out)`` over deterministic substreams.

    ``n`` is rounded down to a multiple of ``strata`` so every substream
    carries the same weight. Non-finite samples are zeroed and counted;
    more than 0.1% of them aborts the run.
    """
    if strata < 1:
        raise DomainError("strata must be >= 1")
    if n < strata:
        raise DomainError(f"need n >= strata, got n={n}, strata={strata}")
    m_per = n // strata
    n_eff = m_per * strata

    def run_one(idx: int):
        rng = substream(seed, idx)
        total = None
        total_sq = 0.0
        flagged = 0
        done = 0
        while done < m_per:
            m = min(_CHUNK, m_per - done)
            vals = np.asarray(sample_fn(rng, m), dtype=float)
            if vals.shape[0] != m:
                raise SamplingError("sample_fn returned a wrong batch size")
            bad = ~np.isfinite(vals)
            if bad.any():
                flagged += int(np.count_nonzero(bad.reshape(m, -1).any(axis=1)))
                vals = np.where(bad, 0.0, vals)
            total = vals.sum(axis=0) if total is None else total + vals.sum(axis=0)
            total_sq += float(np.sum(vals.reshape(m, -1)[:, 0] ** 2))
            done += m
        return total / m_per, total_sq, flagged

    workers = _max_workers()
    if workers == 1:
        results = [run_one(i) for i in range(strata)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_one, range(strata)))

    means = np.stack([r[0] for r in results], axis=0)
    flagged = sum(r[2] for r in results)
    if flagged > 0.001 * n_eff:
        raise SamplingError(f"{flagged}/{n_eff} non-finite samples; weights blew up")
    values = pairwise_sum(means) / strata
    if strata >= 8:
        stderr = np.std(means, axis=0, ddof=1) / math.sqrt(strata)
    else:
        # plain sample standard error from the leading output component
        sumsq = sum(r[1] for r in results)
        first = values.reshape(-1)[0] if means.ndim > 1 else float(values)
        var = max(sumsq / n_eff - first**2, 0.0)
        stderr = np.full_like(np.asarray(values, dtype=float), math.sqrt(var / max(n_eff - 1, 1)))
    return StreamResult(
        values=np.asarray(values, dtype=float),
        stderr=np.asarray(stderr, dtype=float),
        substream_means=means,
        n=n_eff,
        seed=seed,
        strata=strata,
        flagged=flagged,
    )


def mc_integrate(integrand, sampler, n: int, seed: int, strata: int = 16) -> MCEstimate:
    """Scalar MC integral of ``integrand(points)`` over ``sampler(rng, m)`` draws.

    The sampler returns points whose density is accounted for inside the
    integrand (weighted-sample convention).
    """

    def sample_fn(rng, m):
        return np.asarray(integrand(sampler(rng, m)), dtype=float)

    res = mc_stream(sample_fn, n, seed, strata)
    return MCEstimate(
        float(res.values), float(res.stderr), res.n, seed, strata, res.flagged
    )


def adaptive_quad(f, a: float, b: float, tol: float = 1e-10, limit: int = 400) -> float:
    """Adaptive Gauss-Kronrod integration of ``f`` on [a, b] to absolute ``tol``.

    Semi-infinite limits are allowed (``numpy.inf``). Raises QuadratureError
    when the refinement budget cannot reach the tolerance.
    """
    if not (a < b):
        raise DomainError(f"need a < b, got [{a}, {b}]")
    val, err = _sciint.quad(f, a, b, epsabs=tol, epsrel=50 * np.finfo(float).eps, limit=limit)
    if err > 10 * max(tol, abs(val) * 1e-12):
        raise QuadratureError(
            f"refinement budget exceeded: estimated error {err:.3e} > tol {tol:.3e}"
        )
    return val


@lru_cache(maxsize=256)
def _leggauss_cached(n: int):
    x, w = leggauss(n)
    return x, w


def gauss_legendre(a: float, b: float, n: int):
    """Gauss-Legendre nodes and weights mapped to [a, b]."""
    x, w = _leggauss_cached(int(n))
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def oscillatory_tail_quad(f, a: float, period: float, n_chunks: int = 96,
                          nodes: int = 24) -> float:
    """int_a^inf f(r) dr for f eventually oscillating with the given period.

    Chunked Gauss-Legendre over half-periods followed by repeated averaging
    of the cumulative sums (Euler acceleration of the alternating tail).
    """
    half = 0.5 * period
    sums = np.empty(n_chunks)
    acc = 0.0
    for i in range(n_chunks):
        t, w = gauss_legendre(a + i * half, a + (i + 1) * half, nodes)
        acc += float(w @ np.asarray(f(t), dtype=float))
        sums[i] = acc
    levels = min(12, n_chunks - 1)
    cur = sums
    for _ in range(levels):
        cur = 0.5 * (cur[:-1] + cur[1:])
    return float(cur[-1])


# ---------------------------------------------------------------------------
# Grundmann-Moller cubature on the standard simplex
# ---------------------------------------------------------------------------


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


@lru_cache(maxsize=64)
def grundmann_moller(dim: int, s: int = 4):
    """Degree-(2s+1) cubature for the unit simplex {x >= 0, sum x <= 1}.

    Returns barycentric points of shape (M, dim+1) and weights that include
    the simplex volume 1/dim!, i.e. ``sum w_i f(p_i)`` approximates the
    integral with respect to Lebesgue measure on the simplex.
    """
    if dim < 1:
        raise DomainError("dim must be >= 1")
    n = dim
    d = 2 * s + 1
    pts_to_w: dict[tuple, float] = {}
    for i in range(s + 1):
        w = (
            (-1) ** i
            * 2.0 ** (-2 * s)
            * float(d + n - 2 * i) ** d
            / math.factorial(i)
            / math.factorial(d + n - i)
        )
        den = d + n - 2 * i
        for beta in _compositions(s - i, n + 1):
            node = tuple((2 * b + 1, den) for b in beta)
            pts_to_w[node] = pts_to_w.get(node, 0.0) + w
    points = np.array([[p / q for (p, q) in node] for node in pts_to_w], dtype=float)
    weights = np.array(list(pts_to_w.values()), dtype=float)
    # normalize so the rule integrates 1 to the simplex volume exactly
    weights *= (1.0 / math.factorial(n)) / weights.sum()
    return points, weights


# ---------------------------------------------------------------------------
# Finite-difference weights (Fornberg's algorithm)
# ---------------------------------------------------------------------------


def fd_weights(z: float, x, m: int) -> np.ndarray:
    """Weights w[j, i] with sum_i w[j, i] f(x[i]) ~ f^(j)(z), j = 0..m."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    if m >= n:
        raise DomainError("need more nodes than the derivative order")
    c = np.zeros((m + 1, n))
    c1 = 1.0
    c4 = x[0] - z
    c[0, 0] = 1.0
    for i in range(1, n):
        mn = min(i, m)
        c2 = 1.0
        c5 = c4
        c4 = x[i] - z
        for j in range(i):
            c3 = x[i] - x[j]
            c2 *= c3
            if j == i - 1:
                for k in range(mn, 0, -1):
                    c[k, i] = c1 * (k * c[k - 1, i - 1] - c5 * c[k, i - 1]) / c2
                c[0, i] = -c1 * c5 * c[0, i - 1] / c2
            for k in range(mn, 0, -1):
                c[k, j] = (c4 * c[k, j] - k * c[k - 1, j]) / c3
            c[0, j] = c4 * c[0, j] / c3
        c1 = c2
    return c
