"""Spatial-side trace representation for d <= 3.

For d = 1, 2, 3 the k-th trace coefficient has the configuration-space form

    a_{k,V}(t) = int V(u_1) prod_{j>=2} V(u_1 + t u_j) d sigma_k(u') du_1,

where sigma_k is a finite positive measure on the paths u' = (u_2..u_k)
supported where the closed polygon length
f(u') = |u_2| + |u_3-u_2| + ... + |u_k| is at most 1. In d = 1 the density
rho_k is the closed form (1 - f)_+^(k-1) / (2^(k-2) k!); in d = 2 it is a
singular simplex integral evaluated here by a Dirichlet(1/2) importance
scheme that cancels the inverse-square-root endpoint singularities; in
d = 3 the measure lives on {f = 1} and is sampled by radial projection of
Gaussian draws. Everything is cross-checkable against the Fourier engine.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import DomainError, UnsupportedError
from .geometry import Q_form_batch, cumulative_tuple, sample_simplex
from .integrate import MCEstimate, StreamResult, grundmann_moller, mc_stream
from .specfun import eval_G


def _as_paths(u_prime, d: int) -> np.ndarray:
    """Normalize path input to shape (n, k-1, d)."""
    arr = np.asarray(u_prime, dtype=float)
    if d == 1 and arr.ndim == 1:
        arr = arr[None, :, None]
    elif arr.ndim == 2 and arr.shape[-1] == d:
        arr = arr[None]
    elif arr.ndim == 3:
        pass
    else:
        raise DomainError(f"path array has shape {arr.shape}, expected (*, k-1, {d})")
    return arr


def segment_lengths(u_prime, d: int) -> np.ndarray:
    """Lengths of the k closed-polygon segments 0 -> u_2 -> ... -> u_k -> 0."""
    arr = _as_paths(u_prime, d)
    n, km1, _ = arr.shape
    segs = np.empty((n, km1 + 1))
    segs[:, 0] = np.linalg.norm(arr[:, 0], axis=-1)
    if km1 > 1:
        segs[:, 1:km1] = np.linalg.norm(np.diff(arr, axis=1), axis=-1)
    segs[:, km1] = np.linalg.norm(arr[:, -1], axis=-1)
    return segs


def f_path(u_prime, d: int = 1):
    """Closed polygon length f(u') = |u_2| + |u_3 - u_2| + ... + |u_k|."""
    out = segment_lengths(u_prime, d).sum(axis=1)
    return float(out[0]) if out.size == 1 and np.asarray(u_prime).ndim <= 2 else out


def rho_k_d1(k: int, u_prime):
    """d = 1 path density (1 - f(u'))_+^(k-1) / (2^(k-2) k!).

    Accepts a single path of shape (k-1,) or a batch of shape (n, k-1).
    """
    if k < 2:
        raise DomainError("k must be >= 2")
    arr = np.asarray(u_prime, dtype=float)
    scalar = arr.ndim == 1
    if arr.shape[-1] != k - 1:
        raise DomainError(f"paths must have k-1 = {k - 1} coordinates")
    f = np.atleast_1d(f_path(arr[..., None] if not scalar else arr[None, :, None], d=1))
    out = np.clip(1.0 - f, 0.0, None) ** (k - 1) / (2.0 ** (k - 2) * math.factorial(k))
    return float(out[0]) if scalar else out


def sigma_mass_d1_exact(k: int) -> float:
    """d = 1 mass of sigma_k by exact orthant decomposition of int rho_k.

    In increment coordinates theta with f = sum|theta_j| + |sum theta_j|,
    each sign pattern splits into two cones on which f is linear with
    coefficients in {0, 2}; every piece reduces to a beta integral, giving
    an exact rational value.
    """
    if k < 2:
        raise DomainError("k must be >= 2")
    n = k - 1
    piece = Fraction(math.factorial(k - 2) * math.factorial(k - 1), math.factorial(2 * k - 2))
    piece /= Fraction(2) ** (k - 1)
    total = Fraction(0)
    for p in range(1, n + 1):
        q = n - p
        total += Fraction(math.comb(n, p), math.factorial(p - 1) * math.factorial(q))
    i_k = 2 * total * piece
    mass = i_k / (Fraction(2) ** (k - 2) * math.factorial(k))
    return float(mass)


def _rho_d2_samples(rng, m: int, c: np.ndarray, k: int) -> np.ndarray:
    """Weighted samples of the d = 2 simplex integral at fixed segment lengths c."""
    F = float(c.sum())
    if F >= 1.0:
        return np.zeros(m)
    sigma = rng.dirichlet([0.5] * k, size=m)
    core = np.prod(2.0 * c[None, :] + (1.0 - F) * sigma, axis=1) ** -0.5
    pref = (
        4.0 / (k * (2.0 * math.pi) ** k)
        * (1.0 - F) ** (0.5 * k - 1.0)
        * math.pi ** (0.5 * k)
        / math.gamma(0.5 * k)
    )
    return pref * core


def rho_k_d2(k: int, u_prime, n_samples: int = 10**5, seed: int = 0,
             strata: int = 16) -> MCEstimate:
    """d = 2 path density at one point u', by Dirichlet(1/2) Monte Carlo.

    The simplex integrand prod (s_j^2 - c_j^2)_+^(-1/2) is supported on the
    shifted simplex {s_j >= c_j}; substituting s = c + (1-f) sigma and
    sampling sigma from Dirichlet(1/2) absorbs every endpoint singularity
    into the sampling density, leaving a bounded weight.
    """
    if k < 2:
        raise DomainError("k must be >= 2")
    c = segment_lengths(u_prime, d=2)[0]
    if float(c.sum()) >= 1.0:
        return MCEstimate(0.0, 0.0, 0, seed, strata)
    res = mc_stream(lambda rng, m: _rho_d2_samples(rng, m, c, k), n_samples, seed, strata)
    return MCEstimate(float(res.values), float(res.stderr), res.n, seed, strata, res.flagged)


def _d3_mass_samples(rng, m: int, k: int, eta_prime=None) -> np.ndarray:
    """Radialized Gaussian estimator for int F d sigma_k in d = 3.

    sigma_k = c_k delta(1 - f(u')) / prod |seg_j| du' restricted to the
    surface {f = 1}; projecting w ~ N(0, I_n) onto the surface along rays
    gives the exact weight (2 pi^(n/2) / Gamma(n/2)) |w|^n f(w)^(k-n) / prod
    |seg_j(w)| with n = 3(k-1).
    """
    n_dim = 3 * (k - 1)
    w = rng.standard_normal((m, k - 1, 3))
    segs = segment_lengths(w, d=3)
    f = segs.sum(axis=1)
    prod_segs = np.prod(segs, axis=1)
    radius = np.linalg.norm(w.reshape(m, -1), axis=1)
    c_k = 4.0 / (k * (4.0 * math.pi) ** k)
    weight = (
        c_k
        * 2.0
        * math.pi ** (0.5 * n_dim)
        / math.gamma(0.5 * n_dim)
        * radius**n_dim
        * f ** (k - n_dim)
        / prod_segs
    )
    if eta_prime is not None:
        omega = w / f[:, None, None]
        phase = np.einsum("mjd,jd->m", omega, eta_prime)
        weight = weight * np.cos(phase)
    return weight


def sigma_mass(k: int, d: int, n_samples: int = 10**6, seed: int = 0,
               strata: int = 16) -> MCEstimate:
    """Total mass of sigma_k for d in {1, 2, 3}.

    d = 1 is exact (deterministic, stderr 0); d = 2 integrates rho_k over
    u' drawn uniformly from the product of radius-1/2 disks; d = 3 uses the
    radialized Gaussian estimator on the surface measure.
    """
    if k < 2:
        raise DomainError("k must be >= 2")
    if d == 1:
        return MCEstimate(sigma_mass_d1_exact(k), 0.0, 0, seed, strata)
    if d == 2:
        area = (math.pi / 4.0) ** (k - 1)

        def sample_fn(rng, m):
            pts = rng.standard_normal((m, k - 1, 2))
            pts /= np.linalg.norm(pts, axis=2, keepdims=True)
            pts *= 0.5 * np.sqrt(rng.random((m, k - 1)))[:, :, None]
            segs = segment_lengths(pts, d=2)
            F = segs.sum(axis=1)
            ok = F < 1.0
            sigma = rng.dirichlet([0.5] * k, size=m)
            one_minus = np.where(ok, 1.0 - F, 1.0)
            core = np.prod(2.0 * segs + one_minus[:, None] * sigma, axis=1) ** -0.5
            pref = (
                4.0 / (k * (2.0 * math.pi) ** k)
                * one_minus ** (0.5 * k - 1.0)
                * math.pi ** (0.5 * k)
                / math.gamma(0.5 * k)
            )
            return np.where(ok, area * pref * core, 0.0)

        res = mc_stream(sample_fn, n_samples, seed, strata)
        return MCEstimate(float(res.values), float(res.stderr), res.n, seed, strata, res.flagged)
    if d == 3:
        res = mc_stream(lambda rng, m: _d3_mass_samples(rng, m, k), n_samples, seed, strata)
        return MCEstimate(float(res.values), float(res.stderr), res.n, seed, strata, res.flagged)
    raise UnsupportedError("spatial masses are defined for d in {1, 2, 3}")


def sigma_mass_closed(k: int, d: int) -> float:
    """Closed-form mass of sigma_k (the verification target)."""
    if d == 1:
        return 1.0 / (2.0 ** (2 * k - 3) * math.factorial(k) * math.factorial(k - 1))
    if d == 2:
        return 2.0 / (math.pi * k * math.factorial(2 * k - 2))
    if d == 3:
        return 1.0 / (2.0 ** (2 * k - 3) * math.pi * math.factorial(k) * math.factorial(k - 2))
    raise UnsupportedError("spatial masses are defined for d in {1, 2, 3}")


def ftsigma_rhs(k: int, d: int, eta_prime, n_samples: int = 10**5, seed: int = 0,
                strata: int = 16, method: str = "auto") -> MCEstimate:
    """Simplex-side value (4 pi^(d/2) / (k (2 pi)^d)) int G_{k-(d+1)/2}(Q(eta~)) ds.

    eta~ is the cumulative tuple (0, eta_2, eta_2+eta_3, ...). Deterministic
    degree-9 simplex cubature for k <= 4 unless method="mc" is forced.
    """
    ep = np.atleast_2d(np.asarray(eta_prime, dtype=float))
    if ep.shape[0] != k - 1:
        raise DomainError(f"eta' must hold k-1 = {k - 1} vectors")
    tilde = cumulative_tuple(ep)  # (k, d)
    nu = k - (d + 1) / 2.0
    pref = 4.0 * math.pi ** (d / 2.0) / (k * (2.0 * math.pi) ** d)
    if method == "auto":
        method = "quad" if k <= 4 else "mc"
    if method == "quad":
        pts, wts = grundmann_moller(k - 1, s=4)
        q = Q_form_batch(pts, np.broadcast_to(tilde, (pts.shape[0],) + tilde.shape))
        return MCEstimate(pref * float(wts @ eval_G(nu, q)), 0.0, pts.shape[0], seed, 1)

    vol = 1.0 / math.factorial(k - 1)

    def sample_fn(rng, m):
        s = sample_simplex(rng, k, m)
        q = Q_form_batch(s, np.broadcast_to(tilde, (m,) + tilde.shape))
        return pref * vol * eval_G(nu, q)

    res = mc_stream(sample_fn, n_samples, seed, strata)
    return MCEstimate(float(res.values), float(res.stderr), res.n, seed, strata, res.flagged)


def ftsigma_check(k: int, d: int, eta_prime_samples, n_samples: int = 10**6,
                  seed: int = 0, strata: int = 16):
    """Fourier transform of sigma_k at -eta' versus the simplex-side formula.

    Returns a list of (lhs, rhs) MCEstimates, one per supplied eta'.
    """
    if d not in (1, 3):
        raise UnsupportedError("the transform cross-check samples sigma_k for d in {1, 3}")
    out = []
    for idx, ep in enumerate(eta_prime_samples):
        ep_arr = np.atleast_2d(np.asarray(ep, dtype=float))
        if d == 1:
            def sample_fn(rng, m, ep_arr=ep_arr):
                u = rng.random((m, k - 1)) - 0.5  # support box, volume 1
                dens = rho_k_d1(k, u)
                phase = u @ ep_arr[:, 0]
                return dens * np.cos(phase)

            res = mc_stream(sample_fn, n_samples, seed + idx, strata)
        else:
            res = mc_stream(
                lambda rng, m, ep_arr=ep_arr: _d3_mass_samples(rng, m, k, eta_prime=ep_arr),
                n_samples,
                seed + idx,
                strata,
            )
        lhs = MCEstimate(float(res.values), float(res.stderr), res.n, seed + idx, strata)
        rhs = ftsigma_rhs(k, d, ep_arr, n_samples=max(n_samples // 10, 10**4),
                          seed=seed + idx + 10**6, strata=strata)
        out.append((lhs, rhs))
    return out


def trace_spatial_d3(phi, V, k: int, n_samples: int = 10**6, seed: int = 0,
                     strata: int = 16) -> MCEstimate:
    """d = 3 trace functional through the light-cone kernel composition.

    Computes (4 / (k (4 pi)^k)) int psi(sum |x_{j+1}-x_j|) prod V(x_j) /
    |x_{j+1}-x_j| dx over cyclic chains, psi(s) = s phi(s). Sampling: x_1
    from |V| / ||V||_L1, increments from the radial density proportional to
    |y|^(-1) e^(-|y|/lam) matching the kernel singularity, the closing edge
    left raw (integrable).
    """
    if V.d != 3:
        raise DomainError("this functional is the d = 3 representation")
    if k < 2:
        raise DomainError("k must be >= 2")
    lam = min(2.0 * V.R_eff, phi.support_radius)
    l1 = abs(V.integral())  # single-signed catalog families
    c_k = 4.0 / (k * (4.0 * math.pi) ** k)

    def sample_fn(rng, m):
        x1 = V.sample_spatial(rng, m)
        radii = rng.gamma(2.0, lam, size=(m, k - 1))
        dirs = rng.standard_normal((m, k - 1, 3))
        dirs /= np.linalg.norm(dirs, axis=2, keepdims=True)
        incr = dirs * radii[:, :, None]
        xs = x1[:, None, :] + np.cumsum(incr, axis=1)  # x_2 .. x_k
        closing = np.linalg.norm(xs[:, -1] - x1, axis=1)
        total_len = radii.sum(axis=1) + closing
        pot_prod = np.ones(m)
        for j in range(k - 1):
            pot_prod *= V(xs[:, j])
        weight = np.prod(4.0 * math.pi * lam**2 * np.exp(radii / lam), axis=1)
        psi_vals = total_len * phi(total_len)
        closing = np.where(closing == 0.0, np.inf, closing)
        return (
            c_k
            * psi_vals
            * np.sign(V(x1))
            * l1
            * pot_prod
            * weight
            / closing
        )

    res = mc_stream(sample_fn, n_samples, seed, strata)
    return MCEstimate(float(res.values), float(res.stderr), res.n, seed, strata, res.flagged)


def ak_spatial_d1(V, k: int, ts, n_samples: int = 10**5, seed: int = 0,
                  strata: int = 16) -> StreamResult:
    """d = 1 coefficient curve a_{k,V}(t) via the closed-form path density.

    Samples u_1 from |V| / ||V||_L1 and u' uniformly on the support box;
    one draw serves every requested t, so the returned StreamResult carries
    exact cross-t correlations for downstream quadrature.
    """
    if V.d != 1:
        raise DomainError("spatial coefficient curves are implemented for d = 1")
    if k < 2:
        raise DomainError("k must be >= 2")
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    l1 = abs(V.integral())

    def sample_fn(rng, m):
        u1 = V.sample_spatial(rng, m)[:, 0]
        u = rng.random((m, k - 1)) - 0.5
        dens = rho_k_d1(k, u)
        vals = np.sign(V.value_radial(np.abs(u1))) * l1 * dens
        prod = np.ones((m, ts.size))
        pts = u1[:, None, None] + ts[None, :, None] * u[:, None, :]  # (m, nt, k-1)
        prod = np.prod(V.value_radial(np.abs(pts)), axis=2)
        return vals[:, None] * prod

    return mc_stream(sample_fn, n_samples, seed, strata)
