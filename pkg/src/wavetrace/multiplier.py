"""The k-fold sine multiplier M_k in its two representations.

M_k(xi) = int over the (k-1)-simplex of prod_j sin(s_j |xi_j|)/|xi_j| ds.
Two evaluators are provided and cross-checked:

* a rational divided-difference closed form,
      M_k(xi) = sum_j (prod_{i != j} 1/(|xi_i|^2 - |xi_j|^2)) sin|xi_j|/|xi_j|,
  valid when the squared norms are pairwise separated;
* the simplex integral of G_{k-1/2}(|xi|_s^2), by Monte Carlo or a
  deterministic Grundmann-Moller rule for small k.

Both rest on the divided-difference identity
  sum_j f(x_j) prod_{i != j} (x_i - x_j)^-1
      = (-1)^(k-1) int_simplex f^(k-1)(s.x) ds,
exposed for arbitrary polynomial f via hermite_genocchi_check.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import DomainError, DegenerateInputError
from .geometry import FrequencyTuple, sample_simplex, _vectors_of
from .integrate import MCEstimate, grundmann_moller, mc_stream
from .specfun import eval_G


def _norms_sq(xi) -> np.ndarray:
    if isinstance(xi, FrequencyTuple):
        return xi.norms_sq()
    xv = _vectors_of(xi)
    return np.sum(xv**2, axis=1)


def gap_threshold(norms_sq: np.ndarray) -> float:
    """Separation below which the rational form loses too many digits."""
    return 1e-4 * (1.0 + float(np.max(norms_sq)))


def m_k_divided(xi) -> float:
    """Divided-difference closed form; requires pairwise-separated |xi_j|^2."""
    x = _norms_sq(xi)
    k = x.size
    if k == 1:
        return float(eval_G(0.5, x[0]))
    diff = x[:, None] - x[None, :]
    off = np.abs(diff[~np.eye(k, dtype=bool)])
    if off.min() < gap_threshold(x):
        raise DegenerateInputError(
            "squared norms closer than the stability threshold; use m_k_simplex"
        )
    total = 0.0
    sincs = eval_G(0.5, x)
    for j in range(k):
        prod = 1.0
        for i in range(k):
            if i != j:
                prod /= x[i] - x[j]
        total += prod * sincs[j]
    return float(total)


def m_k_simplex(xi, n_samples: int = 10**5, seed: int = 0, strata: int = 16,
                method: str = "mc") -> MCEstimate:
    """Simplex-integral form, int_simplex G_{k-1/2}(|xi|_s^2) ds.

    ``method="mc"`` gives a stratified Monte Carlo estimate; ``"quad"``
    uses a degree-9 Grundmann-Moller rule (deterministic, stderr 0),
    available for k <= 4.
    """
    x = _norms_sq(xi)
    k = x.size
    nu = k - 0.5
    if k == 1:
        return MCEstimate(float(eval_G(0.5, x[0])), 0.0, 0, seed, strata)
    if method == "quad":
        if k > 4:
            raise DomainError("deterministic simplex rule is provided for k <= 4")
        pts, wts = grundmann_moller(k - 1, s=4)
        vals = eval_G(nu, pts @ x)
        return MCEstimate(float(wts @ vals), 0.0, pts.shape[0], seed, 1)
    if method != "mc":
        raise DomainError(f"unknown method {method!r}")
    if n_samples <= 0:
        raise DomainError("n_samples must be positive")
    vol = 1.0 / math.factorial(k - 1)

    def sample_fn(rng, m):
        s = sample_simplex(rng, k, m)
        return vol * eval_G(nu, s @ x)

    res = mc_stream(sample_fn, n_samples, seed, strata)
    return MCEstimate(float(res.values), float(res.stderr), res.n, seed, strata, res.flagged)


def hermite_genocchi_check(coeffs, x, n_samples: int = 10**5, seed: int = 0,
                           strata: int = 16):
    """Evaluate both sides of the divided-difference identity for a polynomial.

    ``coeffs`` are polynomial coefficients in increasing degree (degree <= 12).
    Returns (lhs, rhs) with lhs the exact rational sum and rhs the Monte
    Carlo simplex integral of (-1)^(k-1) f^(k-1)(s.x).
    """
    coeffs = np.asarray(coeffs, dtype=float)
    if coeffs.size > 13:
        raise DomainError("polynomial degree budget is 12")
    x = np.asarray(x, dtype=float)
    k = x.size
    if np.unique(x).size != k:
        raise DomainError("nodes must be pairwise distinct")
    poly = np.polynomial.Polynomial(coeffs)
    lhs = 0.0
    for j in range(k):
        prod = 1.0
        for i in range(k):
            if i != j:
                prod /= x[i] - x[j]
        lhs += poly(x[j]) * prod
    dpoly = poly.deriv(k - 1) if k > 1 else poly
    vol = 1.0 / math.factorial(k - 1)
    sign = (-1.0) ** (k - 1)

    def sample_fn(rng, m):
        s = sample_simplex(rng, k, m)
        return sign * vol * dpoly(s @ x)

    res = mc_stream(sample_fn, n_samples, seed, strata)
    rhs = MCEstimate(float(res.values), float(res.stderr), res.n, seed, strata, res.flagged)
    return float(lhs), rhs
