"""Bounded domains: unit disc, polydisc and symmetrized polydisc.

All integrals use normalized Lebesgue measure (dA/pi on the disc, its
product on the polydisc, and the pushforward of the polydisc measure under
the symmetrization map, weighted by |J_s|^2 / d!, on the symmetrized
polydisc).  With this normalization e_n = sqrt(n+1) z^n is orthonormal on D.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np

from .algebra import DimensionMismatch, _as_points

UNIT_DISC = "UnitDisc"
POLYDISC = "Polydisc"
SYMMETRIZED = "SymmetrizedPolydisc"

MEMBERSHIP_MARGIN = 1e-12


class NotReinhardt(ValueError):
    pass


@dataclass(frozen=True)
class Domain:
    kind: str
    dim: int

    def __post_init__(self):
        if self.kind not in (UNIT_DISC, POLYDISC, SYMMETRIZED):
            raise ValueError(f"unknown domain kind {self.kind!r}")
        if self.dim < 1:
            raise ValueError("dimension must be positive")
        if self.kind == UNIT_DISC and self.dim != 1:
            raise ValueError("the unit disc is one-dimensional")

    @property
    def is_reinhardt(self) -> bool:
        return self.kind != SYMMETRIZED

    @property
    def name(self) -> str:
        if self.kind == UNIT_DISC:
            return "D"
        if self.kind == POLYDISC:
            return f"D^{self.dim}"
        return f"G_{self.dim}"

    def __str__(self) -> str:
        return self.name

    def contains(self, z) -> bool | np.ndarray:
        return contains(self, z)


def unit_disc() -> Domain:
    return Domain(UNIT_DISC, 1)


def polydisc(d: int) -> Domain:
    """D^d; for d = 1 this is the unit disc."""
    return unit_disc() if d == 1 else Domain(POLYDISC, d)


def symmetrized_polydisc(d: int) -> Domain:
    return Domain(SYMMETRIZED, d)


def cover_domain(domain: Domain) -> Domain:
    """The polydisc over which integrals on ``domain`` are computed."""
    return polydisc(domain.dim)


# membership

def roots_from_symmetric(w) -> np.ndarray:
    """Roots of t^d - w_1 t^{d-1} + ... + (-1)^d w_d for a batch of points.

    Returns an (N, d) array.  The quadratic case uses the closed formula;
    higher degrees use companion-matrix eigenvalues.
    """
    w = np.atleast_2d(np.asarray(w, dtype=complex))
    n, d = w.shape
    if d == 1:
        return w.copy()
    if d == 2:
        s1, s2 = w[:, 0], w[:, 1]
        disc = np.sqrt(s1 * s1 - 4 * s2)
        # pick the larger-magnitude root first to avoid cancellation
        sign = np.where((np.conj(s1) * disc).real >= 0, 1.0, -1.0)
        r1 = (s1 + sign * disc) / 2
        safe = np.abs(r1) > 0
        r2 = np.where(safe, s2 / np.where(safe, r1, 1), s1 - r1)
        return np.stack([r1, r2], axis=1)
    comp = np.zeros((n, d, d), dtype=complex)
    signs = np.array([(-1) ** k for k in range(d)])
    comp[:, 0, :] = w * signs
    comp[:, np.arange(1, d), np.arange(d - 1)] = 1.0
    return np.linalg.eigvals(comp)


def contains(domain: Domain, z):
    """Vectorized membership test; returns a bool for a single point."""
    pts, single = _as_points(z, domain.dim)
    if domain.kind == SYMMETRIZED:
        roots = roots_from_symmetric(pts)
        inside = np.all(np.abs(roots) < 1 - MEMBERSHIP_MARGIN, axis=1)
    else:
        inside = np.all(np.abs(pts) < 1, axis=1)
    return bool(inside[0]) if single else inside


# quadrature

@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes (N, d), positive weights (N,), and the polynomial exactness degree.

    ``preimages`` holds, for symmetrized-polydisc rules, one polydisc point
    z with s(z) = node for every node.
    """

    domain: Domain
    nodes: np.ndarray
    weights: np.ndarray
    exact_degree: int
    preimages: np.ndarray | None = None
    chunk: int = field(default=65536, repr=False)

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, func: Callable[[np.ndarray], np.ndarray]) -> complex:
        """Sum of weights * func(nodes), accumulated chunkwise in node order."""
        total = 0j
        for start in range(0, len(self.weights), self.chunk):
            stop = start + self.chunk
            vals = np.asarray(func(self.nodes[start:stop]), dtype=complex)
            total += np.dot(self.weights[start:stop], vals)
        return total

    def to_csv(self, path) -> None:
        d = self.nodes.shape[1]
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            header = []
            for i in range(d):
                header += [f"re_z{i + 1}", f"im_z{i + 1}"]
            writer.writerow(header + ["weight"])
            for node, weight in zip(self.nodes, self.weights):
                row = []
                for c in node:
                    row += [repr(float(c.real)), repr(float(c.imag))]
                writer.writerow(row + [repr(float(weight))])


@lru_cache(maxsize=64)
def disc_rule_arrays(radial: int, angular: int) -> tuple[np.ndarray, np.ndarray]:
    """Polar product rule on D: Gauss-Legendre in t = r^2 times uniform angles.

    ``radial`` Gauss-Legendre points and ``angular`` equally spaced angles.
    Under normalized measure dA/pi = dt * dtheta / (2 pi), so the weights sum
    to one.
    """
    x, wx = np.polynomial.legendre.leggauss(radial)
    t = (x + 1) / 2
    wt = wx / 2
    theta = 2 * np.pi * np.arange(angular) / angular
    r = np.sqrt(t)
    nodes = (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
    weights = (wt[:, None] * np.full(angular, 1.0 / angular)[None, :]).ravel()
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def disc_sizes(level: int) -> tuple[int, int]:
    """Radial and angular node counts giving exactness for z^a conj(z)^b, a, b <= level."""
    return level // 2 + 1, 2 * level + 1


def quadrature(domain: Domain, level: int) -> QuadratureRule:
    """Quadrature rule exact for z^alpha conj(z)^beta with every alpha_i, beta_i <= level."""
    if level < 1:
        raise ValueError("quadrature level must be at least 1")
    return _quadrature(domain, int(level))


@lru_cache(maxsize=32)
def _quadrature(domain: Domain, level: int) -> QuadratureRule:
    radial, angular = disc_sizes(level)
    z1, w1 = disc_rule_arrays(radial, angular)
    d = domain.dim
    if d == 1:
        return QuadratureRule(domain, z1.reshape(-1, 1), np.asarray(w1), 2 * level)
    grids = np.meshgrid(*([z1] * d), indexing="ij")
    nodes = np.stack([g.ravel() for g in grids], axis=1)
    wgrids = np.meshgrid(*([w1] * d), indexing="ij")
    weights = np.prod(np.stack([g.ravel() for g in wgrids], axis=1), axis=1)
    if domain.kind == POLYDISC:
        return QuadratureRule(domain, nodes, weights, 2 * level)
    return pushforward_rule(domain, nodes, weights, 2 * level)


def pushforward_rule(domain: Domain, nodes: np.ndarray, weights: np.ndarray,
                     exact_degree: int) -> QuadratureRule:
    """Push a polydisc rule forward under s with weights w |J_s|^2 / d!."""
    d = domain.dim
    jac = vandermonde_values(nodes)
    w = weights * np.abs(jac) ** 2 / math.factorial(d)
    keep = w > 0
    pre = nodes[keep]
    return QuadratureRule(domain, symmetrize_points(pre), w[keep], exact_degree, preimages=pre)


def symmetrize_points(z: np.ndarray) -> np.ndarray:
    """Elementary symmetric polynomials of each row of an (N, d) array."""
    z = np.atleast_2d(z)
    n, d = z.shape
    # coefficients of prod (1 + z_i x) give s_1 .. s_d
    e = np.zeros((n, d + 1), dtype=complex)
    e[:, 0] = 1
    for i in range(d):
        e[:, 1:] = e[:, 1:] + z[:, i:i + 1] * e[:, :-1]
    return e[:, 1:]


def vandermonde_values(z: np.ndarray) -> np.ndarray:
    """prod_{i<j} (z_i - z_j) row by row."""
    z = np.atleast_2d(z)
    out = np.ones(z.shape[0], dtype=complex)
    for i, j in itertools.combinations(range(z.shape[1]), 2):
        out = out * (z[:, i] - z[:, j])
    return out


def volume(domain: Domain) -> float:
    """Normalized volume: 1 for D and D^d, 1/d! for G_d."""
    if domain.kind == SYMMETRIZED:
        return 1.0 / math.factorial(domain.dim)
    return 1.0


def monomial_norm(domain: Domain, alpha) -> float:
    if not domain.is_reinhardt:
        raise NotReinhardt(f"{domain.name} is not a Reinhardt domain")
    alpha = tuple(int(a) for a in np.atleast_1d(alpha))
    if len(alpha) != domain.dim:
        raise DimensionMismatch(f"multi-index {alpha} on {domain.name}")
    return float(np.prod([1.0 / math.sqrt(a + 1) for a in alpha]))


def sample(domain: Domain, n: int, rng: np.random.Generator, radius: float = 1.0) -> np.ndarray:
    """Random points, returned as an (n, d) array.

    Polydisc coordinates are uniform (area measure) in the disc of the given
    radius; symmetrized-polydisc points are images of such polydisc points.
    """
    d = domain.dim
    r = radius * np.sqrt(rng.random((n, d)))
    theta = 2 * np.pi * rng.random((n, d))
    z = r * np.exp(1j * theta)
    if domain.kind == SYMMETRIZED:
        return symmetrize_points(z)
    return z


def sample_preimages(domain: Domain, n: int, rng: np.random.Generator,
                     radius: float = 1.0) -> tuple[np.ndarray, np.ndarray]:
    """Like :func:`sample` but also returns polydisc coordinates of each point."""
    d = domain.dim
    r = radius * np.sqrt(rng.random((n, d)))
    theta = 2 * np.pi * rng.random((n, d))
    z = r * np.exp(1j * theta)
    if domain.kind == SYMMETRIZED:
        return symmetrize_points(z), z
    return z, z


def sample_ball(domain: Domain, n: int, rng: np.random.Generator,
                radius: float = 0.7) -> np.ndarray:
    """Points whose polydisc coordinates are uniform in the Euclidean ball |z| <= radius.

    On G_d the ball is taken in the polydisc cover and pushed forward by s.
    """
    d = domain.dim
    g = rng.standard_normal((n, 2 * d))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    g *= radius * rng.random((n, 1)) ** (1.0 / (2 * d))
    z = g[:, :d] + 1j * g[:, d:]
    if domain.kind == SYMMETRIZED:
        return symmetrize_points(z)
    return z


def from_name(name: str) -> Domain:
    """Parse "D", "D^d" / "polydisc:d", "G_d" / "symdisc:d"."""
    text = name.strip()
    if text in ("D", "disc", "unit_disc"):
        return unit_disc()
    for prefix in ("D^", "polydisc:"):
        if text.startswith(prefix):
            return polydisc(int(text[len(prefix):]))
    for prefix in ("G_", "G", "symdisc:"):
        if text.startswith(prefix) and text[len(prefix):].isdigit():
            return symmetrized_polydisc(int(text[len(prefix):]))
    raise ValueError(f"unknown domain {name!r}")
