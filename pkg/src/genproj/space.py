"""Finite-dimensional l^p space arithmetic.

Norms, duality mappings, the dual pairing and modulus-of-convexity /
modulus-of-smoothness estimates, all realized on R^n with the p-norm.
Primal vectors live in l^p, dual vectors in l^q with 1/p + 1/q = 1; both
are stored as plain float arrays and distinguished only by role.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SpaceContext",
    "ModulusEstimates",
    "as_vector",
    "norm",
    "dual_norm",
    "pairing",
    "duality_map",
    "duality_map_star",
    "gauge_duality_map",
    "modulus_estimates",
    "monotone_inverse",
]

FIGIEL_CONSTANT = 3.18  # conservative upper end of the admissible range (1, 3.18]


@dataclass(frozen=True)
class SpaceContext:
    """Dimension n and exponent p fixing the l^p norm; q is the dual exponent."""

    n: int
    p: float
    q: float = field(init=False)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        if not np.isfinite(self.p) or self.p <= 1.0:
            raise ValueError(f"exponent p must satisfy 1 < p < inf, got {self.p}")
        q = self.p / (self.p - 1.0)
        object.__setattr__(self, "q", q)
        if abs(1.0 / self.p + 1.0 / q - 1.0) > 1e-12:
            raise ValueError("dual exponent inconsistent with p")

    def dual(self) -> "SpaceContext":
        """Context of the dual space l^q."""
        return SpaceContext(self.n, self.q)


def as_vector(ctx: SpaceContext, x) -> np.ndarray:
    """Validate and return x as a float array of dimension ctx.n."""
    v = np.asarray(x, dtype=float)
    if v.shape != (ctx.n,):
        raise ValueError(f"expected shape ({ctx.n},), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector entries must be finite")
    return v


def norm(ctx: SpaceContext, x) -> float | np.ndarray:
    """l^p norm (sum |x_i|^p)^(1/p); operates on the last axis for batches."""
    return _pnorm(np.asarray(x, dtype=float), ctx.p)


def dual_norm(ctx: SpaceContext, phi) -> float | np.ndarray:
    """l^q norm of a dual vector."""
    return _pnorm(np.asarray(phi, dtype=float), ctx.q)


def _pnorm(v, p):
    out = np.sum(np.abs(v) ** p, axis=-1) ** (1.0 / p)
    return float(out) if np.ndim(out) == 0 else out


def pairing(phi, x) -> float | np.ndarray:
    """Dual product <phi, x> = sum phi_i x_i."""
    phi = np.asarray(phi, dtype=float)
    x = np.asarray(x, dtype=float)
    if phi.shape[-1] != x.shape[-1]:
        raise ValueError(f"dimension mismatch: {phi.shape[-1]} vs {x.shape[-1]}")
    out = np.sum(phi * x, axis=-1)
    return float(out) if np.ndim(out) == 0 else out


def _signed_power(v, e):
    # sign(v)*|v|^e with 0 -> 0; e > 0 throughout this module
    return np.sign(v) * np.abs(v) ** e


def duality_map(ctx: SpaceContext, x) -> np.ndarray:
    """Normalized duality map J: (Jx)_i = ||x||^(2-p) |x_i|^(p-2) x_i.

    Satisfies <Jx, x> = ||x||^2 and ||Jx||_q = ||x||.  Computed in the
    scale-invariant form J(x) = ||x|| * J(x/||x||), which avoids overflow
    of the ||x||^(2-p) prefactor for small vectors.
    """
    return _jmap(np.asarray(x, dtype=float), ctx.p)


def duality_map_star(ctx: SpaceContext, phi) -> np.ndarray:
    """Normalized duality map of the dual space; inverse of duality_map."""
    return _jmap(np.asarray(phi, dtype=float), ctx.q)


def _jmap(v, p):
    nv = np.sum(np.abs(v) ** p, axis=-1, keepdims=True) ** (1.0 / p)
    safe = np.where(nv > 0.0, nv, 1.0)
    return nv * _signed_power(v / safe, p - 1.0)


def gauge_duality_map(ctx: SpaceContext, x) -> np.ndarray:
    """Duality map with gauge t^(p-1): (J x)_i = |x_i|^(p-2) x_i.

    Satisfies <Jx, x> = ||x||^p and ||Jx||_q = ||x||^(p-1); equals the
    gradient of ||x||^p / p.
    """
    return _signed_power(np.asarray(x, dtype=float), ctx.p - 1.0)


@dataclass(frozen=True)
class ModulusEstimates:
    """Lower bound for the modulus of convexity, upper bound for the modulus
    of smoothness, and the Figiel constant used in the geometric estimates.

    Both bounds are pure powers coef * t^exp, so their inverses (and the
    inverse of g(eps) = delta(eps)/eps) are closed-form; the generic
    monotone_inverse below serves as an independent cross-check.
    """

    delta_coef: float
    delta_exp: float
    rho_coef: float
    rho_exp: float
    figiel_L: float = FIGIEL_CONSTANT

    def delta_lower(self, eps):
        return _scal(self.delta_coef * np.power(eps, self.delta_exp))

    def rho_upper(self, tau):
        return _scal(self.rho_coef * np.power(tau, self.rho_exp))

    def g_lower(self, eps):
        """delta(eps)/eps, extended by 0 at eps = 0."""
        return _scal(self.delta_coef * np.power(eps, self.delta_exp - 1.0))

    def delta_lower_inv(self, y):
        return _scal(np.power(np.asarray(y) / self.delta_coef, 1.0 / self.delta_exp))

    def g_lower_inv(self, y):
        return _scal(np.power(np.asarray(y) / self.delta_coef,
                              1.0 / (self.delta_exp - 1.0)))


def _scal(v):
    return float(v) if np.ndim(v) == 0 else v


def modulus_estimates(ctx: SpaceContext) -> ModulusEstimates:
    """Standard l^p modulus bounds.

    delta(eps) >= (p-1) eps^2 / 8 for 1 < p <= 2 and eps^p / (p 2^p) for
    p > 2; rho(tau) <= tau^p / p for 1 < p <= 2 and (p-1) tau^2 / 2 for
    p >= 2.
    """
    p = ctx.p
    if p <= 2.0:
        delta = ((p - 1.0) / 8.0, 2.0)
        rho = (1.0 / p, p)
    else:
        delta = (1.0 / (p * 2.0 ** p), p)
        rho = ((p - 1.0) / 2.0, 2.0)
    return ModulusEstimates(delta_coef=delta[0], delta_exp=delta[1],
                            rho_coef=rho[0], rho_exp=rho[1])


def monotone_inverse(f, y: float, lo: float = 0.0, hi: float = 2.0, tol: float = 1e-12) -> float:
    """Inverse of a nondecreasing f with f(lo) <= y, by bisection.

    The initial bracket [lo, hi] is expanded by doubling when y exceeds
    f(hi); the stability and continuity estimates evaluate the inverse
    beyond the unit-sphere range [0, 2].
    """
    if y <= f(lo):
        return lo
    while f(hi) < y:
        hi *= 2.0
        if hi > 1e12:
            return hi
    a, b = lo, hi
    while b - a > tol:
        m = 0.5 * (a + b)
        if f(m) < y:
            a = m
        else:
            b = m
    return 0.5 * (a + b)
