"""Even, compactly supported test functions with exact derivative algebra.

The catalog family is the polynomial cutoff phi(t) = (1 - (t/T)^2)_+^p,
which is even, supported on [-T, T], and C^(p-1). Because phi is a
polynomial in u = (t/T)^2 inside its support, ordinary derivatives and the
radial operators (t^-1 d/dt)^j are exact rational-coefficient algebra.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from .errors import DomainError, SmoothnessError, UsageError
from .integrate import gauss_legendre


def _u_poly_eval(coeffs, u):
    """Evaluate sum c_m u^m (Horner) for Fraction coefficients."""
    acc = np.zeros_like(u)
    for c in reversed(coeffs):
        acc = acc * u + float(c)
    return acc


class PolyCutoff:
    """phi(t) = (1 - (t/T)^2)_+^p with exact derivatives up to order p-1."""

    family = "polycut"

    def __init__(self, T: float = 1.0, p: int = 2):
        if not T > 0:
            raise DomainError(f"support radius must be positive, got {T}")
        if int(p) != p or p < 2:
            raise DomainError(f"smoothness order p must be an integer >= 2, got {p}")
        self.T = float(T)
        self.p = int(p)
        # coefficients of (1-u)^p in u = (t/T)^2
        self.u_coeffs = tuple(
            Fraction((-1) ** m * math.comb(self.p, m)) for m in range(self.p + 1)
        )

    @property
    def support_radius(self) -> float:
        return self.T

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        u = np.clip(1.0 - (t_arr / self.T) ** 2, 0.0, None)
        out = u**self.p
        return float(out) if np.ndim(t) == 0 else out

    def derivative(self, j: int, t):
        """Exact j-th derivative; requires j <= p-1 (phi is C^(p-1))."""
        if j < 0:
            raise DomainError("derivative order must be >= 0")
        if j == 0:
            return self(t)
        if j > self.p - 1:
            raise SmoothnessError(
                f"phi is C^{self.p - 1}; derivative of order {j} is not continuous"
            )
        t_arr = np.asarray(t, dtype=float)
        inside = np.abs(t_arr) < self.T
        x = t_arr / self.T
        acc = np.zeros_like(np.asarray(x, dtype=float))
        # d^j/dt^j sum_m c_m (t/T)^(2m) = T^(-j) sum_m c_m (2m)_j x^(2m-j)
        for m in range(self.p, -1, -1):
            n = 2 * m
            if n < j:
                continue
            fall = 1
            for i in range(j):
                fall *= n - i
            coeff = float(self.u_coeffs[m] * fall)
            acc = acc + coeff * x ** (n - j)
        out = np.where(inside, acc / self.T**j, 0.0)
        return float(out) if np.ndim(t) == 0 else out

    def _radial_u_coeffs(self, j: int):
        """Coefficients of (t^-1 d/dt)^j phi as a polynomial in u = (t/T)^2.

        (t^-1 d/dt) maps sum c_m u^m to T^-2 sum 2m c_m u^(m-1); the
        accumulated T^(-2j) factor is applied at evaluation time.
        """
        coeffs = list(self.u_coeffs)
        for _ in range(j):
            coeffs = [Fraction(2 * m) * coeffs[m] for m in range(1, len(coeffs))]
        return coeffs

    def radial_derivative(self, j: int, t):
        """((t^-1 d/dt)^j phi)(t), finite at t = 0; requires 2j <= p-1."""
        if j < 0:
            raise DomainError("radial order must be >= 0")
        if j == 0:
            return self(t)
        if 2 * j > self.p - 1:
            raise SmoothnessError(
                f"(t^-1 d/dt)^{j} needs smoothness p >= {2 * j + 1}, have p = {self.p}"
            )
        coeffs = self._radial_u_coeffs(j)
        t_arr = np.asarray(t, dtype=float)
        inside = np.abs(t_arr) < self.T
        u = (t_arr / self.T) ** 2
        out = np.where(inside, _u_poly_eval(coeffs, u) / self.T ** (2 * j), 0.0)
        return float(out) if np.ndim(t) == 0 else out

    def radial_derivative_dt(self, j: int, t):
        """d/dt of (t^-1 d/dt)^j phi, using d/dt = t * (t^-1 d/dt)."""
        t_arr = np.asarray(t, dtype=float)
        out = t_arr * np.asarray(self.radial_derivative(j + 1, t_arr))
        return float(out) if np.ndim(t) == 0 else out

    def psi(self, t):
        """psi(t) = t phi(t) (odd)."""
        t_arr = np.asarray(t, dtype=float)
        out = t_arr * np.asarray(self(t_arr))
        return float(out) if np.ndim(t) == 0 else out

    def phi_hat(self, tau):
        """Fourier transform int phi(t) e^(-i tau t) dt = 2 int_0^T phi cos(tau t) dt."""
        tau_arr = np.atleast_1d(np.asarray(tau, dtype=float))
        n = 2 * int(math.ceil(self.T * float(np.max(np.abs(tau_arr))) / math.pi)) + 64
        t, w = gauss_legendre(0.0, self.T, n)
        vals = 2.0 * (np.cos(np.outer(tau_arr, t)) * self(t)) @ w
        return float(vals[0]) if np.ndim(tau) == 0 else vals.reshape(np.shape(tau))

    def moment(self, a: int) -> float:
        """Exact int_0^T t^a phi(t) dt via the beta integral."""
        if a < 0:
            raise DomainError("moment order must be >= 0")
        return (
            0.5
            * self.T ** (a + 1)
            * math.gamma((a + 1) / 2.0)
            * math.gamma(self.p + 1.0)
            / math.gamma((a + 3) / 2.0 + self.p)
        )

    def canonical_spec(self) -> str:
        return f"polycut:T={self.T:g},p={self.p}"

    def __repr__(self) -> str:
        return f"PolyCutoff(T={self.T}, p={self.p})"


class TruncatedGaussianWindow:
    """Even window e^(-t^2 / (4 tau)) truncated at |t| >= S (heat-bridge weight).

    Only pointwise evaluation on [0, S] is supported; it is used in the
    d = 1 assembly paths, which never differentiate the window.
    """

    family = "gausswin"

    def __init__(self, tau: float, tail: float = 1e-14):
        if not tau > 0:
            raise DomainError("tau must be positive")
        self.tau = float(tau)
        self.T = 2.0 * math.sqrt(self.tau * math.log(1.0 / tail))
        self.tail = tail

    @property
    def support_radius(self) -> float:
        return self.T

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = np.where(np.abs(t_arr) <= self.T, np.exp(-(t_arr**2) / (4.0 * self.tau)), 0.0)
        return float(out) if np.ndim(t) == 0 else out

    def psi(self, t):
        t_arr = np.asarray(t, dtype=float)
        out = t_arr * np.asarray(self(t_arr))
        return float(out) if np.ndim(t) == 0 else out


def parse_testfn(spec: str) -> PolyCutoff:
    """Parse "polycut:T=<real>,p=<int>" into a test function."""
    name, _, rest = spec.partition(":")
    if name.strip() != "polycut":
        raise UsageError(f"unknown test-function family {name!r}")
    params = {}
    for item in filter(None, (s.strip() for s in rest.split(","))):
        key, _, val = item.partition("=")
        if not val:
            raise UsageError(f"malformed test-function parameter {item!r}")
        params[key.strip()] = val.strip()
    allowed = {"T", "p"}
    unknown = set(params) - allowed
    if unknown:
        raise UsageError(f"unknown test-function keys {sorted(unknown)}")
    try:
        T = float(params.get("T", 1.0))
        p = int(params.get("p", 2))
    except ValueError as exc:
        raise UsageError(f"bad test-function parameters in {spec!r}: {exc}") from None
    return PolyCutoff(T=T, p=p)
