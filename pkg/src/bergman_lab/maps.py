"""Catalog of proper holomorphic maps with jacobians and fiber solvers.

Every map carries a description of how it lifts to polydisc covers: there
are maps pi_1 (onto the source) and pi_2 (onto the target), each either the
identity of D^d or the symmetrization s, and a coordinatewise Blaschke map
B with f o pi_1 = pi_2 o B.  The Gram machinery in :mod:`spaces` integrates
over these covers.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import algebra
from .algebra import Polynomial, RationalFunction, _as_points
from .domains import (Domain, contains, polydisc, roots_from_symmetric, symmetrize_points,
                      symmetrized_polydisc, unit_disc, vandermonde_values)

ROOT_TOL = 1e-10
ROOT_ITER_CAP = 500
REGULAR_JAC = 1e-10
BOUNDARY_GUARD = 1e-6
DISTINCT_TOL = 1e-8


class ZeroOutsideDisc(ValueError):
    pass


class RootFindingDiverged(RuntimeError):
    pass


class TargetMiss(ValueError):
    pass


class InconsistentFiberCount(RuntimeError):
    pass


class UnknownMap(KeyError):
    pass


# one-variable Blaschke products

class Blaschke:
    """B(z) = e^{i phase} prod ((z - a_j) / (1 - conj(a_j) z))^{k_j}."""

    def __init__(self, zeros, powers=None, phase: float = 0.0):
        zeros = [complex(a) for a in zeros]
        if powers is None:
            powers = [1] * len(zeros)
        powers = [int(k) for k in powers]
        if len(powers) != len(zeros):
            raise ValueError("zeros and powers differ in length")
        if any(k < 1 for k in powers):
            raise ValueError("powers must be positive")
        if any(abs(a) >= 1 for a in zeros):
            raise ZeroOutsideDisc("Blaschke zeros must lie in the open unit disc")
        merged: dict[complex, int] = {}
        for a, k in zip(zeros, powers):
            merged[a] = merged.get(a, 0) + k
        self.zeros = tuple(merged)
        self.powers = tuple(merged.values())
        self.phase = float(phase)
        self.unit = complex(np.exp(1j * self.phase))

    @property
    def degree(self) -> int:
        return sum(self.powers)

    @property
    def is_polynomial(self) -> bool:
        return all(a == 0 for a in self.zeros)

    @property
    def is_identity(self) -> bool:
        return self.is_polynomial and self.degree == 1 and self.unit == 1

    @property
    def pole_radius(self) -> float:
        """Distance from 0 to the nearest pole (infinity for polynomials)."""
        mags = [abs(a) for a in self.zeros if a != 0]
        return math.inf if not mags else 1.0 / max(mags)

    def key(self):
        return (self.zeros, self.powers, round(self.phase, 15))

    def __eq__(self, other):
        return isinstance(other, Blaschke) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Blaschke(zeros={list(self.zeros)}, powers={list(self.powers)}, phase={self.phase})"

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, self.unit, dtype=complex)
        for a, k in zip(self.zeros, self.powers):
            out = out * ((z - a) / (1 - np.conj(a) * z)) ** k
        return out

    def derivative(self, z):
        """B'(z) by the product rule (no division by B, safe at zeros)."""
        z = np.asarray(z, dtype=complex)
        factors = [(z - a) / (1 - np.conj(a) * z) for a in self.zeros]
        dfactors = [(1 - abs(a) ** 2) / (1 - np.conj(a) * z) ** 2 for a in self.zeros]
        total = np.zeros(z.shape, dtype=complex)
        for j, (kj, fj, dj) in enumerate(zip(self.powers, factors, dfactors)):
            term = kj * fj ** (kj - 1) * dj
            for i, (ki, fi) in enumerate(zip(self.powers, factors)):
                if i != j:
                    term = term * fi ** ki
            total = total + term
        return self.unit * total

    def numerator_coeffs(self) -> np.ndarray:
        """Coefficients (lowest degree first) of e^{i phase} prod (z - a)^k."""
        c = np.array([self.unit])
        for a, k in zip(self.zeros, self.powers):
            for _ in range(k):
                c = np.convolve(c, np.array([-a, 1.0]))
        return c

    def denominator_coeffs(self) -> np.ndarray:
        c = np.array([1.0 + 0j])
        for a, k in zip(self.zeros, self.powers):
            for _ in range(k):
                c = np.convolve(c, np.array([1.0, -np.conj(a)]))
        return c

    def rational(self, dim: int = 1, var: int = 0) -> RationalFunction:
        """B(z_var) as a rational function in ``dim`` variables."""
        def poly(coeffs):
            terms = {}
            for n, c in enumerate(coeffs):
                alpha = [0] * dim
                alpha[var] = n
                terms[tuple(alpha)] = c
            return Polynomial(dim, terms)
        return RationalFunction(poly(self.numerator_coeffs()), poly(self.denominator_coeffs()))

    def preimages(self, w) -> np.ndarray:
        """All m roots of B(z) = w for each w in a batch; returns (N, m)."""
        w = np.atleast_1d(np.asarray(w, dtype=complex))
        num = self.numerator_coeffs()
        den = self.denominator_coeffs()
        m = self.degree
        coeffs = np.zeros((len(w), m + 1), dtype=complex)
        coeffs[:, :len(num)] += num
        coeffs[:, :len(den)] -= w[:, None] * den
        roots = aberth(coeffs)
        resid = np.abs(self(roots) - w[:, None])
        if np.any(~np.isfinite(resid)) or np.max(resid, initial=0.0) > ROOT_TOL:
            raise RootFindingDiverged(f"Blaschke fiber residual {np.max(resid):.2e}")
        return roots


def aberth(coeffs: np.ndarray, tol: float = 1e-15, cap: int = ROOT_ITER_CAP) -> np.ndarray:
    """Simultaneous (Aberth-Ehrlich) iteration for a batch of polynomials.

    ``coeffs`` has shape (N, m+1), lowest degree first, with nonzero leading
    coefficient.  Returns all m roots of each polynomial, shape (N, m).
    """
    coeffs = np.atleast_2d(np.asarray(coeffs, dtype=complex))
    n, size = coeffs.shape
    m = size - 1
    if m == 0:
        return np.zeros((n, 0), dtype=complex)
    lead = coeffs[:, -1]
    if np.any(lead == 0):
        raise RootFindingDiverged("leading coefficient vanishes")
    monic = coeffs / lead[:, None]
    if m == 1:
        return -monic[:, :1]
    dcoeffs = monic[:, 1:] * np.arange(1, size)
    # Cauchy-type bound for the initial circle, rotated to break symmetry
    radius = 1 + np.max(np.abs(monic[:, :-1]), axis=1)
    radius = np.minimum(radius, 2.0)
    angles = 2 * np.pi * np.arange(m) / m + 0.4
    z = (0.5 * radius)[:, None] * np.exp(1j * angles)[None, :]
    active = np.ones(n, dtype=bool)
    eye = np.eye(m, dtype=bool)
    for _ in range(cap):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        za = z[idx]
        p = _horner(monic[idx], za)
        dp = _horner(dcoeffs[idx], za)
        ratio = p / np.where(dp == 0, 1e-300, dp)
        diff = za[:, :, None] - za[:, None, :]
        diff[:, eye] = 1.0
        inv = 1.0 / diff
        inv[:, eye] = 0.0
        corr = ratio / (1 - ratio * inv.sum(axis=2))
        corr = np.where(np.isfinite(corr), corr, 0.0)
        z[idx] = za - corr
        done = np.max(np.abs(corr) / np.maximum(1.0, np.abs(za)), axis=1) < tol
        active[idx[done]] = False
    # two Newton polishing steps
    for _ in range(2):
        p = _horner(monic, z)
        dp = _horner(dcoeffs, z)
        step = np.where(dp != 0, p / np.where(dp == 0, 1, dp), 0)
        z = z - step
    return z


def _horner(coeffs: np.ndarray, z: np.ndarray) -> np.ndarray:
    """Evaluate batch polynomials (lowest degree first) at an (N, k) array."""
    out = np.zeros(z.shape, dtype=complex) + coeffs[:, -1:][:, :1]
    for j in range(coeffs.shape[1] - 2, -1, -1):
        out = out * z + coeffs[:, j:j + 1]
    return out


# proper maps

@dataclass(frozen=True)
class Fiber:
    base_point: np.ndarray
    preimages: np.ndarray
    regular: bool

    def __len__(self) -> int:
        return len(self.preimages)


class ProperMap:
    """Base class; subclasses supply numeric evaluation and fibers."""

    kind = "ProperMap"
    name: str
    source: Domain
    target: Domain
    multiplicity: int
    # cover description: source cover pi_1 and target cover pi_2 are "id" or "sym"
    cover_in = "id"
    cover_out = "id"
    axes: tuple = ()

    @property
    def dim(self) -> int:
        return self.source.dim

    def __repr__(self):
        return f"<{self.kind} {self.name}: {self.source} -> {self.target}, m={self.multiplicity}>"

    def __call__(self, z):
        pts, single = _as_points(z, self.dim)
        out = self.evaluate(pts)
        return out[0] if single else out

    def jacobian_at(self, z):
        pts, single = _as_points(z, self.dim)
        out = self.jacobian_values(pts)
        return out[0] if single else out

    def evaluate(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def jacobian_values(self, pts: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def preimages(self, w: np.ndarray) -> np.ndarray:
        """All m preimages for a batch of target points, shape (N, m, d)."""
        raise NotImplementedError

    @cached_property
    def components(self) -> list[RationalFunction]:
        raise NotImplementedError

    @cached_property
    def jacobian(self) -> RationalFunction:
        return algebra.jacobian_det(self.components)

    def cover_points(self, z: np.ndarray) -> np.ndarray:
        """Polydisc points over source points (identity unless the source is G_d)."""
        if self.cover_in == "sym":
            return roots_from_symmetric(z)
        return z

    @property
    def blaschke_axes(self) -> tuple:
        return self.axes


class BlaschkeMap(ProperMap):
    kind = "Blaschke"

    def __init__(self, blaschke: Blaschke, name: str | None = None):
        self.blaschke = blaschke
        self.name = name or _blaschke_name(blaschke)
        self.source = unit_disc()
        self.target = unit_disc()
        self.multiplicity = blaschke.degree
        self.axes = (blaschke,)
        if blaschke.is_polynomial and blaschke.unit == 1:
            self.kind = "Power"

    def evaluate(self, pts):
        return self.blaschke(pts[:, 0]).reshape(-1, 1)

    def jacobian_values(self, pts):
        return self.blaschke.derivative(pts[:, 0])

    def preimages(self, w):
        w = np.atleast_2d(w)
        return self.blaschke.preimages(w[:, 0])[:, :, None]

    @cached_property
    def components(self):
        return [self.blaschke.rational()]


class PolydiscProduct(ProperMap):
    kind = "PolydiscProduct"

    def __init__(self, factors, name: str | None = None):
        factors = [f.blaschke if isinstance(f, BlaschkeMap) else f for f in factors]
        if not factors:
            raise ValueError("need at least one factor")
        self.factors = tuple(factors)
        d = len(factors)
        self.name = name or "prod:" + "/".join(_blaschke_name(b) for b in factors)
        self.source = polydisc(d)
        self.target = polydisc(d)
        self.multiplicity = int(np.prod([b.degree for b in factors]))
        self.axes = self.factors

    def evaluate(self, pts):
        return np.stack([b(pts[:, i]) for i, b in enumerate(self.factors)], axis=1)

    def jacobian_values(self, pts):
        out = np.ones(len(pts), dtype=complex)
        for i, b in enumerate(self.factors):
            out = out * b.derivative(pts[:, i])
        return out

    def preimages(self, w):
        w = np.atleast_2d(w)
        per_axis = [b.preimages(w[:, i]) for i, b in enumerate(self.factors)]
        combos = list(itertools.product(*[range(b.degree) for b in self.factors]))
        out = np.empty((len(w), len(combos), len(self.factors)), dtype=complex)
        for c, idx in enumerate(combos):
            for i, k in enumerate(idx):
                out[:, c, i] = per_axis[i][:, k]
        return out

    @cached_property
    def components(self):
        d = len(self.factors)
        return [b.rational(d, i) for i, b in enumerate(self.factors)]


class Symmetrization(ProperMap):
    kind = "Symmetrization"
    cover_out = "sym"

    def __init__(self, d: int):
        if d < 1:
            raise ValueError("dimension must be positive")
        self.d = d
        self.name = f"sym:{d}"
        self.source = polydisc(d)
        self.target = symmetrized_polydisc(d)
        self.multiplicity = math.factorial(d)
        self.axes = (None,) * d

    def evaluate(self, pts):
        return symmetrize_points(pts)

    def jacobian_values(self, pts):
        return jacobian_sign(self.d) * vandermonde_values(pts)

    def preimages(self, w):
        roots = roots_from_symmetric(np.atleast_2d(w))
        perms = list(itertools.permutations(range(self.d)))
        return np.stack([roots[:, list(p)] for p in perms], axis=1)

    @cached_property
    def components(self):
        return [RationalFunction(algebra.elementary_symmetric(self.d, k))
                for k in range(1, self.d + 1)]


class EdigarianZwonek(ProperMap):
    """Self-map f of G_d with f(s(z)) = s(B(z_1), ..., B(z_d))."""

    kind = "EdigarianZwonek"
    cover_in = "sym"
    cover_out = "sym"

    def __init__(self, blaschke: Blaschke, d: int, name: str | None = None):
        self.blaschke = blaschke
        self.d = d
        self.name = name or f"ez:{_blaschke_name(blaschke)}:{d}"
        self.source = symmetrized_polydisc(d)
        self.target = symmetrized_polydisc(d)
        self.multiplicity = blaschke.degree ** d
        self.axes = (blaschke,) * d

    def evaluate(self, pts):
        z = roots_from_symmetric(pts)
        return symmetrize_points(self.blaschke(z))

    def jacobian_values(self, pts):
        z = roots_from_symmetric(pts)
        return self.jacobian_from_cover(z)

    def jacobian_from_cover(self, z):
        """J_f(s(z)) = J_s(B(z)) prod B'(z_i) / J_s(z); the sign of J_s cancels."""
        u = self.blaschke(z)
        dprod = np.prod(self.blaschke.derivative(z), axis=1)
        return vandermonde_values(u) * dprod / vandermonde_values(z)

    def preimages(self, w):
        w = np.atleast_2d(w)
        y = roots_from_symmetric(w)
        per = [self.blaschke.preimages(y[:, i]) for i in range(self.d)]
        n = self.blaschke.degree
        combos = list(itertools.product(range(n), repeat=self.d))
        out = np.empty((len(w), len(combos), self.d), dtype=complex)
        for c, idx in enumerate(combos):
            pts = np.stack([per[i][:, k] for i, k in enumerate(idx)], axis=1)
            out[:, c, :] = symmetrize_points(pts)
        return out

    @cached_property
    def components(self):
        """Rational components in w, via expressing symmetric numerators in s_k."""
        d = self.d
        nums, dens = [], []
        for i in range(d):
            r = self.blaschke.rational(d, i)
            nums.append(r.numerator)
            dens.append(r.denominator)
        common = Polynomial.constant(d)
        for q in dens:
            common = common * q
        den_w = algebra.express_in_elementary(common)
        out = []
        for k in range(1, d + 1):
            total = Polynomial.zero(d)
            for subset in itertools.combinations(range(d), k):
                term = Polynomial.constant(d)
                for i in range(d):
                    term = term * (nums[i] if i in subset else dens[i])
                total = total + term
            out.append(RationalFunction(algebra.express_in_elementary(total), den_w))
        if den_w.is_constant():
            c = den_w.constant_term()
            out = [RationalFunction(r.numerator * (1 / c)) for r in out]
        return out


_JAC_SIGN: dict[int, float] = {}


def jacobian_sign(d: int) -> float:
    """Sign c with jacobian_det(s_1, ..., s_d) = c * prod_{i<j} (z_i - z_j)."""
    if d not in _JAC_SIGN:
        if d == 1:
            _JAC_SIGN[d] = 1.0
        else:
            comps = [algebra.elementary_symmetric(d, k) for k in range(1, d + 1)]
            jac = algebra.jacobian_det(comps).as_polynomial()
            vand = algebra.vandermonde(d)
            alpha = next(iter(vand.terms))
            _JAC_SIGN[d] = float(np.real(jac.coefficient(alpha) / vand.coefficient(alpha)))
    return _JAC_SIGN[d]


# constructors matching the catalog operations

def blaschke(zeros, powers=None, phase: float = 0.0) -> BlaschkeMap:
    return BlaschkeMap(Blaschke(zeros, powers, phase))


def polydisc_product(factors) -> ProperMap:
    return PolydiscProduct(factors)


def symmetrization(d: int) -> Symmetrization:
    return Symmetrization(d)


def edigarian_zwonek(b, d: int) -> EdigarianZwonek:
    if isinstance(b, BlaschkeMap):
        return EdigarianZwonek(b.blaschke, d, name=f"ez:{b.name}:{d}")
    return EdigarianZwonek(b, d)


B1 = Blaschke([0, 0.5], [4, 2])
B2 = Blaschke([-0.5, 0, 0.75], [1, 1, 1])


def _blaschke_name(b: Blaschke) -> str:
    if b == B1:
        return "b1"
    if b == B2:
        return "b2"
    if b.is_polynomial and b.unit == 1:
        return f"power:{b.degree}"
    zeros = ",".join(repr(complex(a)).strip("()") for a in b.zeros)
    powers = ",".join(str(k) for k in b.powers)
    return f"blaschke:{zeros};{powers};{b.phase!r}"


# fibers

def fiber(f: ProperMap, w) -> Fiber:
    """Preimages of a single target point, with a regularity flag."""
    w = np.asarray(w, dtype=complex).reshape(-1)
    if len(w) != f.target.dim:
        raise algebra.DimensionMismatch(f"target point of length {len(w)}")
    if not contains(f.target, w):
        raise TargetMiss(f"{w} is not in {f.target}")
    pre = f.preimages(w.reshape(1, -1))[0]
    return Fiber(w, pre, _is_regular(f, pre))


def _is_regular(f: ProperMap, pre: np.ndarray) -> bool:
    if len(pre) != f.multiplicity:
        return False
    jac = f.jacobian_values(pre)
    if np.any(~np.isfinite(jac)) or np.min(np.abs(jac)) <= REGULAR_JAC:
        return False
    cover = f.cover_points(pre)
    if np.any(1 - np.abs(cover) <= BOUNDARY_GUARD):
        return False
    if len(pre) > 1:
        gaps = np.linalg.norm(pre[:, None, :] - pre[None, :, :], axis=2)
        gaps[np.diag_indices(len(pre))] = np.inf
        if np.min(gaps) <= DISTINCT_TOL:
            return False
    return True


def distinct_count(points: np.ndarray, tol: float = DISTINCT_TOL) -> int:
    reps: list[np.ndarray] = []
    for p in points:
        if all(np.linalg.norm(p - q) > tol for q in reps):
            reps.append(p)
    return len(reps)


def multiplicity_certify(f: ProperMap, trials: int = 5, rng=None) -> int:
    """Count distinct in-domain preimages at random regular values."""
    if trials < 1:
        raise ValueError("trials must be positive")
    rng = np.random.default_rng(rng)
    counts = []
    draws = 0
    while len(counts) < trials:
        draws += 1
        if draws > 50 * trials:
            raise InconsistentFiberCount("could not find regular values")
        w = _random_target_point(f, rng)
        fb = fiber(f, w)
        if not fb.regular:
            continue
        inside = fb.preimages[contains(f.source, fb.preimages)]
        residual = np.max(np.abs(f.evaluate(inside) - w[None, :]), initial=0.0)
        if residual > 1e-9:
            raise InconsistentFiberCount(f"fiber residual {residual:.2e}")
        counts.append(distinct_count(inside))
    if len(set(counts)) != 1:
        raise InconsistentFiberCount(f"fiber sizes disagree: {counts}")
    return counts[0]


def _random_target_point(f: ProperMap, rng) -> np.ndarray:
    from .domains import sample
    return sample(f.target, 1, rng, radius=0.9)[0]


def random_regular_points(f: ProperMap, n: int, rng, radius: float = 0.9,
                          jac_floor: float = 1e-3) -> np.ndarray:
    """Source points whose fibers are regular with a comfortable jacobian margin."""
    from .domains import sample
    out = []
    while len(out) < n:
        pts = sample(f.source, 4 * n, rng, radius=radius)
        for p in pts:
            pre = f.preimages(f.evaluate(p[None, :]))[0]
            if _is_regular(f, pre) and np.min(np.abs(f.jacobian_values(pre))) > jac_floor:
                out.append(p)
                if len(out) == n:
                    break
    return np.array(out)


# catalog names

def from_name(name: str) -> ProperMap:
    text = name.strip()
    try:
        if text == "b1":
            return BlaschkeMap(B1, "b1")
        if text == "b2":
            return BlaschkeMap(B2, "b2")
        if text == "prod":
            return PolydiscProduct([B2, B2], name="prod")
        if text.startswith("power:"):
            n = int(text[len("power:"):])
            return BlaschkeMap(Blaschke([0], [n]), text)
        if text.startswith("sym:"):
            return Symmetrization(int(text[len("sym:"):]))
        if text.startswith("blaschke:"):
            return BlaschkeMap(_parse_blaschke(text[len("blaschke:"):]), text)
        if text.startswith("ez:"):
            inner, _, d = text[len("ez:"):].rpartition(":")
            b = from_name(inner)
            if not isinstance(b, BlaschkeMap):
                raise UnknownMap(f"{inner!r} is not a one-variable Blaschke map")
            return EdigarianZwonek(b.blaschke, int(d), name=text)
        if text.startswith("prod:"):
            parts = text[len("prod:"):].split("/")
            factors = []
            for p in parts:
                b = from_name(p)
                if not isinstance(b, BlaschkeMap):
                    raise UnknownMap(f"{p!r} is not a one-variable Blaschke map")
                factors.append(b.blaschke)
            return PolydiscProduct(factors, name=text)
    except (ValueError, IndexError) as exc:
        raise UnknownMap(f"cannot parse map name {name!r}: {exc}") from exc
    raise UnknownMap(f"unknown map {name!r}")


def _parse_blaschke(body: str) -> Blaschke:
    fields = body.split(";")
    if len(fields) not in (2, 3):
        raise ValueError("expected <zeros;powers;phase>")
    zeros = [complex(s.replace(" ", "")) for s in fields[0].split(",") if s.strip()]
    powers = [int(s) for s in fields[1].split(",") if s.strip()]
    phase = float(fields[2]) if len(fields) == 3 and fields[2].strip() else 0.0
    return Blaschke(zeros, powers, phase)


CATALOG = ("b1", "b2", "power:1", "power:2", "power:3", "power:4", "power:5",
           "prod", "prod:power:2/power:3", "sym:2", "sym:3", "ez:b2:2", "ez:power:2:2")


def list_catalog() -> str:
    lines = []
    for name in CATALOG:
        f = from_name(name)
        lines.append(f"{name} multiplicity {f.multiplicity} {f.source} -> {f.target} ({f.kind})")
    return "\n".join(lines)
