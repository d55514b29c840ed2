"""Deck transformation groups of catalog maps.

A deck transformation h of a Blaschke product B is a disc automorphism that
permutes every fiber of B.  Three fiber points determine a Moebius map, so
the candidates are enumerated from injective assignments of a fixed fiber
triple and then checked pointwise.  Polydisc products and Edigarian-Zwonek
maps inherit their candidates from the one-variable factors.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from .domains import roots_from_symmetric, sample, symmetrize_points, vandermonde_values
from .maps import (BlaschkeMap, EdigarianZwonek, PolydiscProduct, ProperMap, Symmetrization,
                   _is_regular)

AUTOMORPHISM_TOL = 1e-8
SOUNDNESS_TOL = 1e-7


class NoRegularValue(RuntimeError):
    pass


# automorphisms

@dataclass(frozen=True)
class Mobius:
    """h(z) = lam (z - a) / (1 - conj(a) z) with |lam| = 1, |a| < 1."""

    lam: complex
    a: complex

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        return self.lam * (z - self.a) / (1 - np.conj(self.a) * z)

    def derivative(self, z):
        z = np.asarray(z, dtype=complex)
        return self.lam * (1 - abs(self.a) ** 2) / (1 - np.conj(self.a) * z) ** 2

    def compose(self, other: "Mobius") -> "Mobius":
        """self o other, through the product of the 2x2 coefficient matrices."""
        (p, q), (r, s) = self.matrix() @ other.matrix()
        lam = p / s
        return Mobius(complex(lam / abs(lam)), complex(-np.conj(r / s)))

    def matrix(self) -> np.ndarray:
        return np.array([[self.lam, -self.lam * self.a], [-np.conj(self.a), 1]])

    def inverse(self) -> "Mobius":
        # z = h^{-1}(w) = conj(lam)(w + lam a) / (1 + conj(lam a) w)
        return Mobius(complex(np.conj(self.lam)), complex(-self.lam * self.a))

    @property
    def is_identity(self) -> bool:
        return abs(self.a) < AUTOMORPHISM_TOL and abs(self.lam - 1) < AUTOMORPHISM_TOL

    def descriptor(self) -> dict:
        return {"a": [_snap(self.a.real), _snap(self.a.imag)],
                "theta": _snap(np.angle(self.lam))}


IDENTITY = Mobius(1 + 0j, 0j)


def _snap(x: float, tol: float = 1e-12) -> float:
    """Round-off below tol is reported as zero in descriptors."""
    return 0.0 if abs(x) < tol else float(x)


def fit_mobius(src, dst) -> Mobius | None:
    """Disc automorphism through three point pairs, or None.

    Writes h = (alpha z + beta) / (gamma z + 1), solves the linear system
    alpha z_k + beta - gamma z_k w_k = w_k, and accepts when it has the form
    lam (z - a)/(1 - conj(a) z): alpha = lam, gamma = -conj(a), beta = -lam a.
    """
    src = np.asarray(src, dtype=complex)
    dst = np.asarray(dst, dtype=complex)
    mat = np.stack([src, np.ones(3), -src * dst], axis=1)
    try:
        alpha, beta, gamma = np.linalg.solve(mat, dst)
    except np.linalg.LinAlgError:
        return None
    lam = alpha
    a = -np.conj(gamma)
    if abs(abs(lam) - 1) > AUTOMORPHISM_TOL or abs(a) >= 1:
        return None
    if abs(beta + lam * a) > AUTOMORPHISM_TOL:
        return None
    return Mobius(complex(lam / abs(lam)), complex(a))


@dataclass(frozen=True)
class DiscElement:
    """Deck element of a one-variable map."""

    mobius: Mobius

    def __call__(self, z):
        z = np.atleast_2d(z)
        return self.mobius(z[:, 0]).reshape(-1, 1)

    def jacobian(self, z):
        return self.mobius.derivative(np.atleast_2d(z)[:, 0])

    def descriptor(self):
        return {"mobius": self.mobius.descriptor()}


@dataclass(frozen=True)
class PolydiscAutomorphism:
    """h(z)_i = phi_i(z_{perm[i]})."""

    perm: tuple
    factors: tuple

    def __call__(self, z):
        z = np.atleast_2d(z)
        return np.stack([phi(z[:, j]) for phi, j in zip(self.factors, self.perm)], axis=1)

    def jacobian(self, z):
        z = np.atleast_2d(z)
        d = len(self.perm)
        mat = np.zeros((d, d))
        mat[np.arange(d), list(self.perm)] = 1
        out = np.full(len(z), np.linalg.det(mat), dtype=complex)
        for phi, j in zip(self.factors, self.perm):
            out = out * phi.derivative(z[:, j])
        return out

    def descriptor(self):
        return {"perm": list(self.perm), "factors": [phi.descriptor() for phi in self.factors]}


@dataclass(frozen=True)
class SymmetrizedAutomorphism:
    """Automorphism of G_d induced by a disc automorphism: s(z) -> s(phi(z_1), ..., phi(z_d))."""

    mobius: Mobius
    d: int

    def __call__(self, w):
        z = roots_from_symmetric(np.atleast_2d(w))
        return symmetrize_points(self.mobius(z))

    def jacobian(self, w):
        z = roots_from_symmetric(np.atleast_2d(w))
        u = self.mobius(z)
        return (vandermonde_values(u) * np.prod(self.mobius.derivative(z), axis=1)
                / vandermonde_values(z))

    def descriptor(self):
        return {"lift_of": self.mobius.descriptor(), "dim": self.d}


@dataclass(frozen=True)
class PermutationElement:
    """Coordinate permutation z -> (z_{perm[0]}, ..., z_{perm[d-1]})."""

    perm: tuple

    def __call__(self, z):
        return np.atleast_2d(z)[:, list(self.perm)]

    def jacobian(self, z):
        d = len(self.perm)
        mat = np.zeros((d, d))
        mat[np.arange(d), list(self.perm)] = 1
        return np.full(len(np.atleast_2d(z)), np.linalg.det(mat), dtype=complex)

    def descriptor(self):
        return {"perm": list(self.perm)}


# reports

@dataclass
class DeckReport:
    map_name: str
    elements: list
    fiber_size: int
    soundness_residual: float
    closed: bool
    transitive: bool
    seed: int | None = None
    extra: dict = field(default_factory=dict)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def is_galois(self) -> bool:
        return self.order == self.fiber_size

    def to_dict(self) -> dict:
        return {"map": self.map_name, "elements": [e.descriptor() for e in self.elements],
                "order": self.order, "is_galois": self.is_galois,
                "fiber_size": self.fiber_size,
                "soundness_residual": self.soundness_residual,
                "closed": self.closed, "transitive": self.transitive}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def table(self) -> str:
        lines = [f"Deck({self.map_name}): order {self.order}, fiber size {self.fiber_size}, "
                 f"galois {self.is_galois}"]
        for k, e in enumerate(self.elements):
            lines.append(f"  h{k}: {json.dumps(e.descriptor(), sort_keys=True)}")
        return "\n".join(lines)


def _residual(f: ProperMap, h, pts) -> float:
    return float(np.max(np.abs(f.evaluate(h(pts)) - f.evaluate(pts))))


def _same(h1, h2, pts, tol=1e-7) -> bool:
    return float(np.max(np.abs(h1(pts) - h2(pts)))) < tol


def _dedupe(elements, pts):
    out = []
    for h in elements:
        if not any(_same(h, g, pts) for g in out):
            out.append(h)
    return out


def _closure(elements, pts) -> bool:
    for h1, h2 in itertools.product(elements, repeat=2):
        def comp(z, h1=h1, h2=h2):
            return h1(h2(z))
        if not any(_same(comp, g, pts) for g in elements):
            return False
    return True


def _transitive(f: ProperMap, elements, rng, fibers: int = 5) -> bool:
    """Does the group act transitively on several random fibers?"""
    done = 0
    for _ in range(20 * fibers):
        pt = sample(f.source, 1, rng, radius=0.8)
        pre = f.preimages(f.evaluate(pt))[0]
        if not _is_regular(f, pre):
            continue
        orbit = np.concatenate([h(pt) for h in elements], axis=0)
        for p in pre:
            if np.min(np.linalg.norm(orbit - p[None, :], axis=1)) > 1e-7:
                return False
        done += 1
        if done == fibers:
            return True
    raise NoRegularValue("no regular fibers for the transitivity test")


def _finish(f: ProperMap, elements, rng, seed) -> DeckReport:
    fresh = sample(f.source, 200, rng, radius=0.95)
    grid = sample(f.source, 50, rng, radius=0.9)
    residual = max((_residual(f, h, fresh) for h in elements), default=0.0)
    return DeckReport(f.name, elements, f.multiplicity, residual, _closure(elements, grid),
                      _transitive(f, elements, rng), seed)


def _regular_fiber(blaschke_map: BlaschkeMap, rng) -> np.ndarray:
    for _ in range(20):
        u = sample(blaschke_map.target, 1, rng, radius=0.9)
        pre = blaschke_map.preimages(u)[0]
        if _is_regular(blaschke_map, pre):
            return pre[:, 0]
    raise NoRegularValue("fiber degenerate after 20 draws")


def blaschke_deck_mobius(f: BlaschkeMap, rng, tol: float = 1e-8) -> list[Mobius]:
    """Moebius maps h with B o h = B, found by fiber-triple enumeration."""
    m = f.multiplicity
    if m == 1:
        return [IDENTITY]
    grid = sample(f.source, 100, rng, radius=0.95)[:, 0]
    b = f.blaschke
    fib = _regular_fiber(f, rng)
    if m >= 3:
        src = fib[:3]
        assignments = [np.array(t) for t in itertools.permutations(fib, 3)]
        pairs = [(src, dst) for dst in assignments]
    else:
        other = _regular_fiber(f, rng)
        src = np.array([fib[0], fib[1], other[0]])
        pairs = []
        for first in (0, 1):
            for third in (0, 1):
                pairs.append((src, np.array([fib[first], fib[1 - first], other[third]])))
    found: list[Mobius] = []
    for s, t in pairs:
        h = fit_mobius(s, t)
        if h is None:
            continue
        if np.max(np.abs(b(h(grid)) - b(grid))) > tol:
            continue
        if not any(np.max(np.abs(h(grid) - g(grid))) < 1e-7 for g in found):
            found.append(h)
    # identity first, then by rotation angle
    found.sort(key=lambda h: (not h.is_identity, abs(h.a), np.angle(h.lam) % (2 * np.pi)))
    return found


def deck_group_blaschke(f: BlaschkeMap, tol: float = 1e-8, seed: int = 0) -> DeckReport:
    rng = np.random.default_rng(seed)
    elements = [DiscElement(h) for h in blaschke_deck_mobius(f, rng, tol)]
    return _finish(f, elements, rng, seed)


def deck_group_polydisc(f: PolydiscProduct, tol: float = 1e-8, seed: int = 0) -> DeckReport:
    """Candidates (perm, phi_i) with perm preserving equal factors; all checked pointwise."""
    rng = np.random.default_rng(seed)
    d = len(f.factors)
    per_factor = {}
    for b in f.factors:
        if b not in per_factor:
            per_factor[b] = blaschke_deck_mobius(BlaschkeMap(b), rng, tol)
    grid = sample(f.source, 100, rng, radius=0.95)
    elements = []
    rejected = 0
    for perm in itertools.permutations(range(d)):
        if any(f.factors[i] != f.factors[perm[i]] for i in range(d)):
            continue
        for combo in itertools.product(*[per_factor[b] for b in f.factors]):
            h = PolydiscAutomorphism(tuple(perm), tuple(combo))
            if _residual(f, h, grid) <= tol:
                elements.append(h)
            else:
                rejected += 1
    elements = _dedupe(elements, grid)
    report = _finish(f, elements, rng, seed)
    report.extra["rejected_candidates"] = rejected
    return report


def deck_group_symmetrized(f: EdigarianZwonek, tol: float = 1e-8, seed: int = 0) -> DeckReport:
    """Lifts of the deck group of B to G_d, checked pointwise on G_d."""
    rng = np.random.default_rng(seed)
    candidates = blaschke_deck_mobius(BlaschkeMap(f.blaschke), rng, tol)
    grid = sample(f.source, 100, rng, radius=0.95)
    elements = [SymmetrizedAutomorphism(h, f.d) for h in candidates]
    elements = [h for h in elements if _residual(f, h, grid) <= tol]
    return _finish(f, _dedupe(elements, grid), rng, seed)


def deck_group_symmetrization(f: Symmetrization, tol: float = 1e-8, seed: int = 0) -> DeckReport:
    rng = np.random.default_rng(seed)
    grid = sample(f.source, 100, rng, radius=0.95)
    elements = [PermutationElement(p) for p in itertools.permutations(range(f.d))]
    elements = [h for h in elements if _residual(f, h, grid) <= tol]
    return _finish(f, elements, rng, seed)


def deck_group(f: ProperMap, tol: float = 1e-8, seed: int = 0) -> DeckReport:
    if isinstance(f, BlaschkeMap):
        return deck_group_blaschke(f, tol, seed)
    if isinstance(f, PolydiscProduct):
        return deck_group_polydisc(f, tol, seed)
    if isinstance(f, EdigarianZwonek):
        return deck_group_symmetrized(f, tol, seed)
    if isinstance(f, Symmetrization):
        return deck_group_symmetrization(f, tol, seed)
    raise TypeError(f"no deck computation for {type(f).__name__}")


def deck_average(report: DeckReport, phi, z) -> np.ndarray:
    """(1/|Deck|) sum_h phi(h z) J_h(z); equals the fiber projection when Galois."""
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    total = np.zeros(len(z), dtype=complex)
    for h in report.elements:
        total += np.asarray(phi(h(z))).reshape(-1) * h.jacobian(z)
    return total / report.order
