"""Catalog of radial potentials with Fourier transforms and norms.

Families:

* ``gaussian:d=<d>,sigma=<s>,amp=<a>`` - analytic transform, admitted with
  an effective support radius of 12 sigma (truncation below 1e-30 relative);
* ``ball:d=<d>,r=<r>,amp=<a>`` - indicator of a ball, d <= 3;
* ``mollball:d=1,r=<r>,amp=<a>,h=<h>`` - indicator convolved with a width-h
  box mollifier (trapezoid profile, exact transform), d = 1 only;
* ``bump:d=<d>,r=<r>,amp=<a>,p=<p>`` - amp (1-(|x|/r)^2)_+^p, d <= 3.

Conventions: V_hat(xi) = int V(x) e^(-i<x,xi>) dx (real for these radial
families), Plancherel reads (2pi)^-d int |V_hat|^2 = int |V|^2, the
homogeneous Sobolev seminorms are hdot(j)^2 = (2pi)^-d int |xi|^(2j)
|V_hat|^2 d xi, the inhomogeneous ones use the weight (1+|xi|^2)^m, and
lhat1 = (2pi)^-d int |V_hat|. Divergent norms are reported as math.inf.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, UnsupportedError, UsageError
from .integrate import gauss_legendre
from .specfun import eval_G, sinc, surface_area

INF = math.inf


@dataclass(frozen=True)
class NormReport:
    """All norms of a potential used by the trace formulas."""

    l2: float
    linf: float
    lhat1: float
    integral_V: float
    hm: dict = field(default_factory=dict)    # m -> inhomogeneous H^m norm
    hdot: dict = field(default_factory=dict)  # j -> homogeneous |D|^j L2 norm


def ball_volume(d: int, r: float) -> float:
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0) * r**d


class RadialPotential:
    """Base class: real, radial, (numerically) compactly supported V."""

    family = "abstract"
    d: int
    amp: float
    R_eff: float

    # -- pointwise -----------------------------------------------------------

    def value_radial(self, r):
        raise NotImplementedError

    def __call__(self, x):
        x_arr = np.asarray(x, dtype=float)
        if x_arr.ndim == 0 or (self.d == 1 and x_arr.ndim == 1):
            r = np.abs(x_arr)
        else:
            if x_arr.shape[-1] != self.d:
                raise DomainError(f"points must have dimension {self.d}")
            r = np.linalg.norm(x_arr, axis=-1)
        return self.value_radial(r)

    # -- Fourier side ----------------------------------------------------------

    def fourier_radial(self, rho):
        raise NotImplementedError

    def fourier(self, xi):
        xi_arr = np.asarray(xi, dtype=float)
        if xi_arr.ndim == 0 or (self.d == 1 and xi_arr.ndim == 1):
            rho = np.abs(xi_arr)
        else:
            rho = np.linalg.norm(xi_arr, axis=-1)
        return self.fourier_radial(rho)

    # -- norms -----------------------------------------------------------------

    def integral(self) -> float:
        raise NotImplementedError

    def integral_power(self, k: int) -> float:
        raise NotImplementedError

    def l2_sq(self) -> float:
        return self.integral_power(2)

    def linf(self) -> float:
        return abs(self.amp)

    def sobolev_order(self) -> float:
        """Largest integer m with V in H^m (math.inf when all m)."""
        raise NotImplementedError

    def lhat1(self) -> float:
        raise NotImplementedError

    def hdot_sq(self, j: int) -> float:
        raise NotImplementedError

    def hm_sq(self, m: int) -> float:
        if m > self.sobolev_order():
            return INF
        return sum(math.comb(m, j) * self.hdot_sq(j) for j in range(m + 1))

    def x_norm(self) -> float:
        """The a-priori class norm: sup norm for d <= 3, lhat1 for d >= 4."""
        return self.linf() if self.d <= 3 else self.lhat1()

    def norms(self, m_max: int = 3) -> NormReport:
        if m_max > 6:
            raise DomainError("norm budget is m <= 6")
        hm = {m: math.sqrt(v) if (v := self.hm_sq(m)) < INF else INF for m in range(m_max + 1)}
        hdot = {j: math.sqrt(v) if (v := self.hdot_sq(j)) < INF else INF for j in range(m_max + 1)}
        return NormReport(
            l2=math.sqrt(self.l2_sq()),
            linf=self.linf(),
            lhat1=self.lhat1(),
            integral_V=self.integral(),
            hm=hm,
            hdot=hdot,
        )

    # -- sampling ----------------------------------------------------------------

    def sample_fourier(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise UnsupportedError(
            f"Fourier-side importance sampling is not available for {self.family}"
        )

    def sample_spatial(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise UnsupportedError(f"spatial sampling is not available for {self.family}")

    # -- misc ---------------------------------------------------------------------

    def scaled(self, c: float):
        raise NotImplementedError

    def canonical_spec(self) -> str:
        raise NotImplementedError

    def plancherel_residual(self, n_grid: int = 2000) -> float:
        """Relative mismatch of (2pi)^-d int |V_hat|^2 against int V^2."""
        lhs = (
            surface_area(self.d)
            / (2.0 * math.pi) ** self.d
            * _semi_infinite_quad(lambda r: self.fourier_radial(r) ** 2 * r ** (self.d - 1),
                                  char_freq=self.R_eff, tol=1e-10)
        )
        return abs(lhs - self.l2_sq()) / self.l2_sq()

    def __repr__(self) -> str:
        return self.canonical_spec()


def _semi_infinite_quad(f, char_freq: float, tol: float = 1e-9, max_chunks: int = 4000):
    """Chunked Gauss-Legendre integral of f on [0, inf) for decaying f.

    Chunk width resolves oscillation at frequency ``char_freq``; stops when
    the running tail estimate drops below ``tol`` times the accumulated
    value (plus an absolute floor).
    """
    width = math.pi / max(char_freq, 1e-6)
    acc = 0.0
    scale = 0.0
    quiet = 0
    for i in range(max_chunks):
        t, w = gauss_legendre(i * width, (i + 1) * width, 24)
        chunk = float(w @ np.asarray(f(t), dtype=float))
        acc += chunk
        scale = max(scale, abs(chunk))
        if abs(chunk) < tol * max(abs(acc), scale):
            quiet += 1
            if quiet >= 8:
                return acc
        else:
            quiet = 0
    return acc


class GaussianPotential(RadialPotential):
    """V(x) = amp exp(-|x|^2 / (2 sigma^2)); every norm is closed-form."""

    family = "gaussian"

    def __init__(self, d: int, sigma: float = 1.0, amp: float = 1.0):
        if d < 1 or int(d) != d:
            raise DomainError("dimension must be a positive integer")
        if not sigma > 0:
            raise DomainError("sigma must be positive")
        self.d = int(d)
        self.sigma = float(sigma)
        self.amp = float(amp)
        # exp(-72) < 1e-30: truncation error beyond 12 sigma is negligible
        self.R_eff = 12.0 * self.sigma

    def value_radial(self, r):
        r_arr = np.asarray(r, dtype=float)
        return self.amp * np.exp(-(r_arr**2) / (2.0 * self.sigma**2))

    def fourier_radial(self, rho):
        rho_arr = np.asarray(rho, dtype=float)
        return (
            self.amp
            * (2.0 * math.pi) ** (self.d / 2.0)
            * self.sigma**self.d
            * np.exp(-(self.sigma**2) * rho_arr**2 / 2.0)
        )

    def integral(self) -> float:
        return self.amp * (2.0 * math.pi) ** (self.d / 2.0) * self.sigma**self.d

    def integral_power(self, k: int) -> float:
        return self.amp**k * (2.0 * math.pi * self.sigma**2 / k) ** (self.d / 2.0)

    def sobolev_order(self) -> float:
        return INF

    def lhat1(self) -> float:
        return abs(self.amp)

    def hdot_sq(self, j: int) -> float:
        d = self.d
        return (
            self.amp**2
            * self.sigma ** (d - 2 * j)
            * math.pi ** (d / 2.0)
            * math.gamma(j + d / 2.0)
            / math.gamma(d / 2.0)
        )

    def sample_fourier(self, rng, n):
        # |V_hat| proportional to exp(-sigma^2 |xi|^2 / 2): exact normal draws
        return rng.standard_normal((n, self.d)) / self.sigma

    def sample_spatial(self, rng, n):
        return rng.standard_normal((n, self.d)) * self.sigma

    def scaled(self, c: float):
        return GaussianPotential(self.d, self.sigma, self.amp * c)

    def canonical_spec(self) -> str:
        return f"gaussian:d={self.d},sigma={self.sigma:g},amp={self.amp:g}"


class BallPotential(RadialPotential):
    """amp times the indicator of the ball of radius r, d <= 3."""

    family = "ball"

    def __init__(self, d: int, r: float = 1.0, amp: float = 1.0):
        if d not in (1, 2, 3):
            raise UnsupportedError("ball potentials are provided for d <= 3")
        if not r > 0:
            raise DomainError("radius must be positive")
        self.d = int(d)
        self.r = float(r)
        self.amp = float(amp)
        self.R_eff = self.r

    def value_radial(self, r):
        r_arr = np.asarray(r, dtype=float)
        return np.where(r_arr <= self.r, self.amp, 0.0)

    def fourier_radial(self, rho):
        rho_arr = np.asarray(rho, dtype=float)
        z2 = (self.r * rho_arr) ** 2
        if self.d == 1:
            return 2.0 * self.amp * self.r * sinc(self.r * rho_arr)
        if self.d == 2:
            return 4.0 * math.sqrt(math.pi) * self.amp * self.r**2 * eval_G(1.0, z2)
        return 8.0 * math.pi * self.amp * self.r**3 * eval_G(1.5, z2)

    def integral(self) -> float:
        return self.amp * ball_volume(self.d, self.r)

    def integral_power(self, k: int) -> float:
        return self.amp**k * ball_volume(self.d, self.r)

    def sobolev_order(self) -> float:
        return 0

    def lhat1(self) -> float:
        return INF

    def hdot_sq(self, j: int) -> float:
        return self.amp**2 * ball_volume(self.d, self.r) if j == 0 else INF

    def sample_spatial(self, rng, n):
        pts = rng.standard_normal((n, self.d))
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
        radii = self.r * rng.random(n) ** (1.0 / self.d)
        return pts * radii[:, None]

    def scaled(self, c: float):
        return BallPotential(self.d, self.r, self.amp * c)

    def canonical_spec(self) -> str:
        return f"ball:d={self.d},r={self.r:g},amp={self.amp:g}"

    def plancherel_residual(self, n_grid: int = 2000) -> float:
        # slow |xi|^-(d+1) decay: integrate to a fixed cutoff and add the
        # mean-value tail of the oscillatory square
        a, r, d = abs(self.amp), self.r, self.d
        chunks = 3000
        width = math.pi / r
        acc = 0.0
        for i in range(chunks):
            t, w = gauss_legendre(i * width, (i + 1) * width, 24)
            acc += float(w @ (self.fourier_radial(t) ** 2 * t ** (d - 1)))
        X = chunks * width
        mean_tail = {1: 2 * a**2 / X, 2: 4 * math.pi * a**2 * r / X, 3: 8 * math.pi**2 * a**2 * r**2 / X}[d]
        lhs = surface_area(d) / (2 * math.pi) ** d * (acc + mean_tail)
        return abs(lhs - self.l2_sq()) / self.l2_sq()


class MollifiedBallPotential(RadialPotential):
    """Interval indicator convolved with a width-h box mollifier (d = 1).

    The profile is a trapezoid: amp on |x| <= r - h/2, linear down to 0 at
    |x| = r + h/2. Its transform is exactly
    V_hat(xi) = 2 amp r sinc(r xi) sinc(h xi / 2).
    """

    family = "mollball"

    def __init__(self, d: int, r: float = 1.0, amp: float = 1.0, h: float = 0.05):
        if d != 1:
            raise UnsupportedError("mollified indicators are provided in d = 1 only")
        if not (0 < h < 2 * r):
            raise DomainError("need 0 < h < 2r for a trapezoid profile")
        self.d = 1
        self.r = float(r)
        self.amp = float(amp)
        self.h = float(h)
        self.R_eff = self.r + self.h / 2.0

    def value_radial(self, r):
        r_arr = np.asarray(r, dtype=float)
        ramp = (self.r + self.h / 2.0 - r_arr) / self.h
        return self.amp * np.clip(ramp, 0.0, 1.0)

    def fourier_radial(self, rho):
        rho_arr = np.asarray(rho, dtype=float)
        return 2.0 * self.amp * self.r * sinc(self.r * rho_arr) * sinc(self.h * rho_arr / 2.0)

    def integral(self) -> float:
        return 2.0 * self.amp * self.r

    def integral_power(self, k: int) -> float:
        # plateau of width 2r - h plus two linear ramps of width h
        return self.amp**k * (2.0 * self.r - self.h + 2.0 * self.h / (k + 1.0))

    def sobolev_order(self) -> float:
        return 1

    def lhat1(self) -> float:
        val = _semi_infinite_quad(
            lambda rho: np.abs(self.fourier_radial(rho)), char_freq=self.R_eff, tol=1e-9
        )
        # asymptotic mean-value tail of |sin sin| / rho^2 past the chunk cutoff
        return (2.0 / (2.0 * math.pi)) * val

    def hdot_sq(self, j: int) -> float:
        if j == 0:
            return self.l2_sq()
        if j == 1:
            return 2.0 * self.amp**2 / self.h
        return INF

    def sample_fourier(self, rng, n):
        # envelope e(rho) = 2 amp r min(1, a / rho^2), a = 2/(r h): exact bound
        a = 2.0 / (self.r * self.h)
        cut = math.sqrt(a)
        mass_core = cut  # integral of min(1, a/rho^2) on [0, cut]
        mass_tail = a / cut
        out = np.empty(n)
        have = 0
        while have < n:
            m = 2 * (n - have) + 16
            u = rng.random(m)
            core = u < mass_core / (mass_core + mass_tail)
            rho = np.where(core, rng.random(m) * cut, cut / np.maximum(rng.random(m), 1e-300))
            env = np.minimum(1.0, a / rho**2)
            accept = rng.random(m) * env <= np.abs(
                sinc(self.r * rho) * sinc(self.h * rho / 2.0)
            )
            got = rho[accept][: n - have]
            out[have : have + got.size] = got
            have += got.size
        signs = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        return (out * signs)[:, None]

    def sample_spatial(self, rng, n):
        # piecewise-linear profile: inverse CDF on [0, r+h/2], then a sign
        total = self.integral() / (2.0 * abs(self.amp))
        u = rng.random(n) * total
        flat = self.r - self.h / 2.0
        x = np.where(
            u <= flat,
            u,
            (self.r + self.h / 2.0)
            - np.sqrt(np.maximum(0.0, 2.0 * self.h * (total - u))),
        )
        signs = np.where(rng.random(n) < 0.5, -1.0, 1.0)
        return (x * signs)[:, None]

    def scaled(self, c: float):
        return MollifiedBallPotential(1, self.r, self.amp * c, self.h)

    def canonical_spec(self) -> str:
        return f"mollball:d=1,r={self.r:g},amp={self.amp:g},h={self.h:g}"


class BumpPotential(RadialPotential):
    """V(x) = amp (1 - (|x|/r)^2)_+^p, compactly supported and C^(p-1)."""

    family = "bump"

    def __init__(self, d: int, r: float = 1.0, amp: float = 1.0, p: int = 3):
        if d not in (1, 2, 3):
            raise UnsupportedError("bump potentials are provided for d <= 3")
        if not r > 0:
            raise DomainError("radius must be positive")
        if int(p) != p or p < 1:
            raise DomainError("p must be an integer >= 1")
        self.d = int(d)
        self.r = float(r)
        self.amp = float(amp)
        self.p = int(p)
        self.R_eff = self.r

    def value_radial(self, r):
        r_arr = np.asarray(r, dtype=float)
        return self.amp * np.clip(1.0 - (r_arr / self.r) ** 2, 0.0, None) ** self.p

    def _profile_moment(self, power: int, a: int) -> float:
        """int_0^1 (1-u^2)^(power) u^a du = B((a+1)/2, power+1) / 2."""
        return 0.5 * math.gamma((a + 1) / 2.0) * math.gamma(power + 1.0) / math.gamma(
            (a + 1) / 2.0 + power + 1.0
        )

    def fourier_radial(self, rho):
        rho_arr = np.atleast_1d(np.asarray(rho, dtype=float))
        n = 64 + 2 * int(self.r * float(np.max(rho_arr)) / math.pi)
        t, w = gauss_legendre(0.0, self.r, min(n, 3000))
        prof = self.value_radial(t)
        if self.d == 1:
            kern = 2.0 * np.cos(np.outer(rho_arr, t))
            out = (kern * prof) @ w
        elif self.d == 2:
            z2 = np.outer(rho_arr, t) ** 2
            kern = 2.0 * math.sqrt(math.pi) * eval_G(0.0, z2) * t
            out = (kern * prof) @ w
        else:
            kern = 4.0 * math.pi * sinc(np.outer(rho_arr, t)) * t**2
            out = (kern * prof) @ w
        return float(out[0]) if np.ndim(rho) == 0 else out.reshape(np.shape(rho))

    def integral(self) -> float:
        return self.amp * surface_area(self.d) * self.r**self.d * self._profile_moment(self.p, self.d - 1)

    def integral_power(self, k: int) -> float:
        return (
            self.amp**k
            * surface_area(self.d)
            * self.r**self.d
            * self._profile_moment(k * self.p, self.d - 1)
        )

    def sobolev_order(self) -> float:
        return self.p

    def lhat1(self) -> float:
        if self.p <= (self.d - 1) / 2.0:
            return INF
        val = _semi_infinite_quad(
            lambda rho: np.abs(self.fourier_radial(rho)) * rho ** (self.d - 1),
            char_freq=self.r,
            tol=1e-9,
        )
        return surface_area(self.d) / (2.0 * math.pi) ** self.d * val

    def hdot_sq(self, j: int) -> float:
        if j > self.p:
            return INF
        val = _semi_infinite_quad(
            lambda rho: self.fourier_radial(rho) ** 2 * rho ** (2 * j + self.d - 1),
            char_freq=self.r,
            tol=1e-10,
        )
        return surface_area(self.d) / (2.0 * math.pi) ** self.d * val

    def sample_spatial(self, rng, n):
        # rejection against the uniform ball
        out = np.empty((n, self.d))
        have = 0
        while have < n:
            m = 2 * (n - have) + 16
            pts = rng.standard_normal((m, self.d))
            pts /= np.linalg.norm(pts, axis=1, keepdims=True)
            radii = self.r * rng.random(m) ** (1.0 / self.d)
            pts *= radii[:, None]
            accept = rng.random(m) <= np.clip(1.0 - (radii / self.r) ** 2, 0.0, None) ** self.p
            got = pts[accept][: n - have]
            out[have : have + got.shape[0]] = got
            have += got.shape[0]
        return out

    def scaled(self, c: float):
        return BumpPotential(self.d, self.r, self.amp * c, self.p)

    def canonical_spec(self) -> str:
        return f"bump:d={self.d},r={self.r:g},amp={self.amp:g},p={self.p}"


_FAMILIES = {
    "gaussian": (GaussianPotential, {"d": int, "sigma": float, "amp": float}),
    "ball": (BallPotential, {"d": int, "r": float, "amp": float}),
    "mollball": (MollifiedBallPotential, {"d": int, "r": float, "amp": float, "h": float}),
    "bump": (BumpPotential, {"d": int, "r": float, "amp": float, "p": int}),
}


def parse_potential(spec: str) -> RadialPotential:
    """Parse a potential spec string like "gaussian:d=3,sigma=1,amp=1"."""
    name, _, rest = spec.partition(":")
    name = name.strip()
    if name not in _FAMILIES:
        raise UsageError(f"unknown potential family {name!r}")
    cls, schema = _FAMILIES[name]
    kwargs = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, _, val = item.partition("=")
        key = key.strip()
        if key not in schema:
            raise UsageError(f"unknown key {key!r} for potential family {name!r}")
        try:
            kwargs[key] = schema[key](val.strip())
        except ValueError:
            raise UsageError(f"bad value for {key!r} in {spec!r}") from None
    if "d" not in kwargs:
        raise UsageError("potential spec must set d")
    return cls(**kwargs)
