"""Convex closed set primitives with exact Euclidean projection oracles.

Each variant carries a membership test (tol measured as Euclidean distance
to the set), an exact nearest-point oracle in the Euclidean norm, samplers
for harness use, an outward perturbation with known Hausdorff distance,
and a JSON description.  Intersections are first-class only for the
feasibility solver; the single-set operators require a primitive variant.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from ._backend import kernels

__all__ = [
    "ConvexSet",
    "Halfspace",
    "Hyperplane",
    "Box",
    "Ball2",
    "Simplex",
    "Intersection",
    "UnsupportedSetError",
    "set_from_dict",
    "set_to_dict",
    "load_sets",
]


class UnsupportedSetError(ValueError):
    """Operation not defined for this set variant."""


class ConvexSet:
    """Base interface; variants are immutable dataclasses."""

    def contains(self, x, tol: float = 0.0) -> bool:
        if tol < 0.0:
            raise ValueError("tol must be >= 0")
        return self._distance(np.asarray(x, dtype=float)) <= tol

    def project_euclid(self, x) -> np.ndarray:
        """Exact Euclidean nearest point; identity on members."""
        k, sv1, sv2, s1, s2 = self.kernel_encoding()
        return kernels.proj_set(k, sv1, sv2, s1, s2, np.asarray(x, dtype=float))

    def _distance(self, x) -> float:
        d = self.project_euclid(x) - x
        return float(np.sqrt(d @ d))

    def kernel_encoding(self):
        raise UnsupportedSetError(f"{type(self).__name__} has no kernel encoding")

    def perturb(self, sigma: float) -> "ConvexSet":
        raise UnsupportedSetError(f"{type(self).__name__} does not support perturbation")

    def perturb_hausdorff(self, sigma: float) -> float:
        """Exact Hausdorff distance between the set and perturb(sigma)."""
        raise UnsupportedSetError(f"{type(self).__name__} does not support perturbation")

    def witness(self) -> np.ndarray:
        """A point of the set (nonemptiness evidence)."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, count: int) -> np.ndarray:
        """(count, n) array of set members: boundary-flavored plus interior draws."""
        raise NotImplementedError


def _as1d(v):
    return np.atleast_1d(np.asarray(v, dtype=float))


@dataclass(frozen=True, eq=False)
class Halfspace(ConvexSet):
    """{xi : <a, xi> <= b}"""

    a: np.ndarray
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", _as1d(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not np.any(self.a):
            raise ValueError("halfspace normal must be nonzero")

    def kernel_encoding(self):
        z = np.zeros_like(self.a)
        return 0, self.a, z, self.b, 0.0

    def perturb(self, sigma):
        return Halfspace(self.a, self.b + sigma * float(np.sqrt(self.a @ self.a)))

    def perturb_hausdorff(self, sigma):
        return float(sigma)

    def witness(self):
        return (self.b - 1.0) / float(self.a @ self.a) * self.a

    def sample(self, rng, count):
        n = self.a.size
        pts = rng.normal(size=(count, n))
        na2 = float(self.a @ self.a)
        viol = pts @ self.a - self.b
        # first half pulled onto the boundary, rest strictly inside
        onto = viol / na2
        inside = (viol + rng.uniform(0.1, 2.0, size=count) * np.sqrt(na2)) / na2
        shift = np.where(np.arange(count) % 2 == 0, onto, np.maximum(inside, 0.0))
        return pts - shift[:, None] * self.a


@dataclass(frozen=True, eq=False)
class Hyperplane(ConvexSet):
    """{xi : <a, xi> = b}"""

    a: np.ndarray
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", _as1d(self.a))
        object.__setattr__(self, "b", float(self.b))
        if not np.any(self.a):
            raise ValueError("hyperplane normal must be nonzero")

    def kernel_encoding(self):
        z = np.zeros_like(self.a)
        return 1, self.a, z, self.b, 0.0

    def witness(self):
        return self.b / float(self.a @ self.a) * self.a

    def sample(self, rng, count):
        pts = rng.normal(size=(count, self.a.size))
        res = (pts @ self.a - self.b) / float(self.a @ self.a)
        return pts - res[:, None] * self.a


@dataclass(frozen=True, eq=False)
class Box(ConvexSet):
    """[lo, hi] componentwise."""

    lo: np.ndarray
    hi: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "lo", _as1d(self.lo))
        object.__setattr__(self, "hi", _as1d(self.hi))
        if self.lo.shape != self.hi.shape or np.any(self.lo > self.hi):
            raise ValueError("box requires lo <= hi componentwise")

    def kernel_encoding(self):
        return 2, self.lo, self.hi, 0.0, 0.0

    def perturb(self, sigma):
        return Box(self.lo - sigma, self.hi + sigma)

    def perturb_hausdorff(self, sigma):
        # farthest new point is an inflated corner
        return float(sigma) * np.sqrt(self.lo.size)

    def witness(self):
        return 0.5 * (self.lo + self.hi)

    def corners(self) -> np.ndarray:
        n = self.lo.size
        out = np.empty((2 ** n, n))
        for i in range(2 ** n):
            mask = np.array([(i >> j) & 1 for j in range(n)], dtype=bool)
            out[i] = np.where(mask, self.hi, self.lo)
        return out

    def sample(self, rng, count):
        n = self.lo.size
        interior = rng.uniform(self.lo, self.hi, size=(count, n))
        if n <= 8:
            c = self.corners()
            take = min(len(c), count)
            interior[:take] = c[:take]
        return interior


@dataclass(frozen=True, eq=False)
class Ball2(ConvexSet):
    """Euclidean ball of given center and radius."""

    center: np.ndarray
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", _as1d(self.center))
        object.__setattr__(self, "radius", float(self.radius))
        if self.radius <= 0.0:
            raise ValueError("radius must be positive")

    def kernel_encoding(self):
        z = np.zeros_like(self.center)
        return 3, self.center, z, self.radius, 0.0

    def perturb(self, sigma):
        return Ball2(self.center, self.radius + sigma)

    def perturb_hausdorff(self, sigma):
        return float(sigma)

    def witness(self):
        return self.center.copy()

    def sample(self, rng, count):
        n = self.center.size
        dirs = rng.normal(size=(count, n))
        dirs /= np.linalg.norm(dirs, axis=1, keepdims=True)
        # half on the sphere, half interior
        radii = self.radius * np.where(
            np.arange(count) % 2 == 0, 1.0, rng.uniform(0.0, 1.0, size=count) ** (1.0 / n)
        )
        return self.center + radii[:, None] * dirs


@dataclass(frozen=True, eq=False)
class Simplex(ConvexSet):
    """{xi >= 0, sum xi = scale}"""

    scale: float
    n: int

    def __post_init__(self):
        object.__setattr__(self, "scale", float(self.scale))
        if self.scale <= 0.0:
            raise ValueError("scale must be positive")
        if self.n < 1:
            raise ValueError("dimension must be >= 1")

    def kernel_encoding(self):
        z = np.zeros(self.n)
        return 4, z, z, self.scale, 0.0

    def witness(self):
        return np.full(self.n, self.scale / self.n)

    def sample(self, rng, count):
        w = rng.dirichlet(np.ones(self.n), size=count) * self.scale
        take = min(self.n, count)
        w[:take] = self.scale * np.eye(self.n)[:take]  # vertices
        return w


@dataclass(frozen=True, eq=False)
class Intersection(ConvexSet):
    """Finite intersection; handled by the feasibility solver, not a single oracle."""

    members: tuple

    def __post_init__(self):
        object.__setattr__(self, "members", tuple(self.members))
        if not self.members:
            raise ValueError("intersection needs at least one member")

    def contains(self, x, tol: float = 0.0) -> bool:
        return all(m.contains(x, tol) for m in self.members)

    def project_euclid(self, x):
        raise UnsupportedSetError("no single-set oracle for intersections")

    def witness(self):
        # cyclic Euclidean projections from the first member's witness
        x = self.members[0].witness()
        for _ in range(200):
            for m in self.members:
                x = m.project_euclid(x)
            if self.contains(x, 1e-9):
                return x
        raise ValueError("could not certify a common point for this intersection")


_TYPES = {
    "halfspace": Halfspace,
    "hyperplane": Hyperplane,
    "box": Box,
    "ball2": Ball2,
    "simplex": Simplex,
    "intersection": Intersection,
}


def set_to_dict(s: ConvexSet) -> dict:
    if isinstance(s, Halfspace):
        return {"type": "halfspace", "a": s.a.tolist(), "b": s.b}
    if isinstance(s, Hyperplane):
        return {"type": "hyperplane", "a": s.a.tolist(), "b": s.b}
    if isinstance(s, Box):
        return {"type": "box", "lo": s.lo.tolist(), "hi": s.hi.tolist()}
    if isinstance(s, Ball2):
        return {"type": "ball2", "center": s.center.tolist(), "radius": s.radius}
    if isinstance(s, Simplex):
        return {"type": "simplex", "scale": s.scale}
    if isinstance(s, Intersection):
        return {"type": "intersection", "members": [set_to_dict(m) for m in s.members]}
    raise UnsupportedSetError(f"cannot serialize {type(s).__name__}")


def set_from_dict(d: dict, n: int | None = None) -> ConvexSet:
    kind = d.get("type")
    if kind not in _TYPES:
        raise ValueError(f"unknown set type {kind!r}")
    if kind == "halfspace":
        return Halfspace(d["a"], d["b"])
    if kind == "hyperplane":
        return Hyperplane(d["a"], d["b"])
    if kind == "box":
        return Box(d["lo"], d["hi"])
    if kind == "ball2":
        return Ball2(d["center"], d["radius"])
    if kind == "simplex":
        dim = d.get("n", n)
        if dim is None:
            raise ValueError("simplex description needs a dimension")
        return Simplex(d["scale"], int(dim))
    return Intersection(tuple(set_from_dict(m, n) for m in d["members"]))


def load_sets(path, n: int | None = None) -> list[ConvexSet]:
    with open(path) as fh:
        data = json.load(fh)
    return [set_from_dict(d, n) for d in data]
