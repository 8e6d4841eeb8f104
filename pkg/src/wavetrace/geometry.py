"""Simplex sampling and the frequency quadratic forms.

Conventions. A simplex point is s = (s_1, ..., s_k) with s_j >= 0 and
sum s_j = 1; the simplex measure is the pullback of Lebesgue measure under
projection to the first k-1 coordinates, total mass 1/(k-1)!. A frequency
tuple is xi = (xi_1, ..., xi_k), each in R^d. The dispersion form is

    Q_{k,s}(xi) = |xi|_s^2 - |s.xi|^2 = sum_j s_j |xi_j - s.xi|^2 >= 0,

computed in the variance form on the right, which is nonnegative by
construction (no cancellation). In increment coordinates theta_j =
eta_{j+1} - eta_j (eta_1 = eta_{k+1} = 0) it expands as
Q = sum_{i<j} q_{k,s}(i,j) <theta_i, theta_j> with
q_{k,s}(i,j) = A(1-A), A = s_{i+1} + ... + s_j.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class SimplexPoint:
    """Validated barycentric weights (sum to 1 within 1e-14, nonnegative)."""

    s: np.ndarray

    def __post_init__(self):
        s = np.asarray(self.s, dtype=float)
        object.__setattr__(self, "s", s)
        if s.ndim != 1 or s.size < 1:
            raise DomainError("simplex point must be a 1-d vector, k >= 1")
        if np.any(s < -1e-14):
            raise DomainError("simplex weights must be nonnegative")
        if abs(float(s.sum()) - 1.0) > 1e-14 * max(1, s.size):
            raise DomainError(f"simplex weights must sum to 1, got {float(s.sum())!r}")

    @property
    def k(self) -> int:
        return self.s.size


@dataclass(frozen=True)
class FrequencyTuple:
    """k frequency vectors in R^d, stored as an array of shape (k, d)."""

    d: int
    xi: np.ndarray

    def __post_init__(self):
        xi = np.atleast_2d(np.asarray(self.xi, dtype=float))
        object.__setattr__(self, "xi", xi)
        if xi.shape[1] != self.d:
            raise DomainError(f"frequency vectors have dimension {xi.shape[1]}, expected {self.d}")
        if not np.all(np.isfinite(xi)):
            raise DomainError("frequency entries must be finite")

    @property
    def k(self) -> int:
        return self.xi.shape[0]

    def norms_sq(self) -> np.ndarray:
        return np.sum(self.xi**2, axis=1)


def _weights_of(s) -> np.ndarray:
    return s.s if isinstance(s, SimplexPoint) else np.asarray(s, dtype=float)


def _vectors_of(xi) -> np.ndarray:
    return xi.xi if isinstance(xi, FrequencyTuple) else np.atleast_2d(np.asarray(xi, dtype=float))


def sample_simplex(rng: np.random.Generator, k: int, n: int | None = None) -> np.ndarray:
    """Uniform samples on the (k-1)-simplex via normalized exponentials.

    Averages of f over these samples approximate the integral against the
    simplex measure after multiplying by the volume 1/(k-1)!.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    m = 1 if n is None else int(n)
    if k == 1:
        out = np.ones((m, 1))
    else:
        e = rng.standard_exponential((m, k))
        out = e / e.sum(axis=1, keepdims=True)
    return out[0] if n is None else out


def xi_norm_s(s, xi) -> float:
    """|xi|_s^2 = sum_j s_j |xi_j|^2."""
    sv = _weights_of(s)
    xv = _vectors_of(xi)
    if sv.shape[-1] != xv.shape[0]:
        raise DomainError(f"k mismatch: {sv.shape[-1]} weights vs {xv.shape[0]} vectors")
    return float(sv @ np.sum(xv**2, axis=1))


def Q_form(s, xi) -> float:
    """Q_{k,s}(xi) = |xi|_s^2 - |s.xi|^2, evaluated in the variance form."""
    sv = _weights_of(s)
    xv = _vectors_of(xi)
    if sv.shape[-1] != xv.shape[0]:
        raise DomainError(f"k mismatch: {sv.shape[-1]} weights vs {xv.shape[0]} vectors")
    mean = sv @ xv
    return float(sv @ np.sum((xv - mean) ** 2, axis=1))


def Q_form_batch(s: np.ndarray, xi: np.ndarray) -> np.ndarray:
    """Vectorized Q over batches: s (n, k), xi (n, k, d) -> (n,)."""
    mean = np.einsum("nk,nkd->nd", s, xi)
    diff = xi - mean[:, None, :]
    return np.einsum("nk,nk->n", s, np.sum(diff**2, axis=2))


def q_coeff(k: int, s, i: int, j: int) -> float:
    """Increment-coupling coefficient q_{k,s}(i,j) = A(1-A), A = s_{i+1}+...+s_j.

    Indices are 1-based with 1 <= i < j <= k.
    """
    sv = _weights_of(s)
    if sv.size != k:
        raise DomainError(f"simplex point has k={sv.size}, expected {k}")
    if not (1 <= i < j <= k):
        raise DomainError(f"need 1 <= i < j <= k, got i={i}, j={j}, k={k}")
    a = float(np.sum(sv[i:j]))
    return a * (1.0 - a)


def theta_to_eta(theta: np.ndarray) -> np.ndarray:
    """Map increments theta (k, d) with sum 0 to eta (k, d): eta_i = sum_{j<i} theta_j."""
    th = np.atleast_2d(np.asarray(theta, dtype=float))
    eta = np.zeros_like(th)
    eta[1:] = np.cumsum(th[:-1], axis=0)
    return eta


def theta_to_eta_batch(theta: np.ndarray) -> np.ndarray:
    """Batched version: theta (n, k-1, d) free increments -> eta (n, k, d).

    The free increments are theta_1..theta_{k-1}; the closing increment
    -(theta_1+...+theta_{k-1}) is implied and eta_1 = 0.
    """
    n, km1, d = theta.shape
    eta = np.zeros((n, km1 + 1, d))
    eta[:, 1:, :] = np.cumsum(theta, axis=1)
    return eta


def cumulative_tuple(eta_prime: np.ndarray) -> np.ndarray:
    """(0, eta_2, eta_2+eta_3, ..., eta_2+...+eta_k) from eta' = (eta_2..eta_k)."""
    ep = np.atleast_2d(np.asarray(eta_prime, dtype=float))
    out = np.zeros((ep.shape[0] + 1, ep.shape[1]))
    out[1:] = np.cumsum(ep, axis=0)
    return out
