"""Finite pseudoreflection groups, relative invariants and the projection P_mu.

Group elements act on functions by composition with the matrix:
(rho . f)(z) = f(rho z).  With this convention a relative invariant of the
character chi = det^{-1} satisfies f(rho z) = chi(rho) f(z); the jacobian of
the invariant map theta and the polynomial f_mu both have this property, and

    P_mu f(z) = (1/|G|) sum_rho chi(rho^{-1}) f(rho z)

is the orthogonal projection onto the relative invariants.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import block_diag

from . import algebra
from .algebra import Polynomial
from .domains import Domain, polydisc

MATCH_TOL = 1e-10
INVARIANT_TOL = 1e-12


class NotDivisible(ArithmeticError):
    pass


class UnknownGroup(KeyError):
    pass


@dataclass(frozen=True, eq=False)
class ReflectionGroup:
    dim: int
    elements: list
    generators: list
    hsop: list
    f_mu: Polynomial
    kind: str
    name: str
    # for division: list of (kind, data) factors whose product is f_mu
    fmu_factors: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.elements)

    @property
    def order(self) -> int:
        return len(self.elements)

    def chi(self, rho: np.ndarray) -> complex:
        """chi_mu(rho) = det(rho)^{-1}."""
        return complex(1.0 / np.linalg.det(rho))

    def find(self, rho: np.ndarray) -> int:
        for k, g in enumerate(self.elements):
            if np.max(np.abs(g - rho)) < MATCH_TOL:
                return k
        raise KeyError("matrix is not a group element")

    def inverse(self, rho: np.ndarray) -> np.ndarray:
        return self.elements[self.find(rho.conj().T)]

    def is_closed(self) -> bool:
        try:
            for a in self.elements:
                for b in self.elements:
                    self.find(a @ b)
        except KeyError:
            return False
        return True

    def theta_map(self):
        """The invariant map theta as a catalog proper map."""
        from . import maps
        if self.kind == "SymmetricGroup":
            return maps.Symmetrization(self.dim)
        if self.kind == "Cyclic":
            return maps.BlaschkeMap(maps.Blaschke([0], [len(self.elements)]))
        if self.kind == "Product":
            factors = [maps.Blaschke([0], [k]) for k in self._cyclic_orders]
            return maps.PolydiscProduct(factors)
        raise NotImplementedError(self.kind)

    @property
    def _cyclic_orders(self):
        return [data for kind, data in self.fmu_factors if kind == "cyclic_order"]


def is_pseudoreflection(rho: np.ndarray) -> bool:
    s = np.linalg.svd(np.eye(len(rho)) - rho, compute_uv=False)
    return s[0] > MATCH_TOL and (len(s) < 2 or s[1] < MATCH_TOL)


def symmetric_group(d: int) -> ReflectionGroup:
    if d < 1:
        raise ValueError("d must be positive")
    elements = []
    for perm in itertools.permutations(range(d)):
        mat = np.zeros((d, d), dtype=complex)
        mat[np.arange(d), perm] = 1
        elements.append(mat)
    generators = []
    for i in range(d - 1):
        mat = np.eye(d, dtype=complex)
        mat[[i, i + 1]] = mat[[i + 1, i]]
        generators.append(mat)
    hsop = [algebra.elementary_symmetric(d, k) for k in range(1, d + 1)]
    return ReflectionGroup(d, elements, generators, hsop, algebra.vandermonde(d),
                           "SymmetricGroup", f"sym:{d}", [("vandermonde", (0, d))])


def cyclic_group(m: int) -> ReflectionGroup:
    if m < 2:
        raise ValueError("m must be at least 2")
    omega = np.exp(2j * np.pi / m)
    elements = [np.array([[omega ** k]]) for k in range(m)]
    z = Polynomial.variable(1, 0)
    return ReflectionGroup(1, elements, [elements[1]], [z ** m], z ** (m - 1),
                           "Cyclic", f"cyc:{m}", [("cyclic", (0, m)), ("cyclic_order", m)])


def product_group(orders) -> ReflectionGroup:
    """Direct product of cyclic groups acting diagonally on C^d."""
    factors = [cyclic_group(m) for m in orders]
    d = len(factors)
    elements = [block_diag(*combo).astype(complex)
                for combo in itertools.product(*[g.elements for g in factors])]
    generators = []
    for i, g in enumerate(factors):
        gen = np.eye(d, dtype=complex)
        gen[i, i] = g.generators[0][0, 0]
        generators.append(gen)
    hsop = [Polynomial.monomial(d, [m if j == i else 0 for j in range(d)])
            for i, m in enumerate(orders)]
    f_mu = Polynomial.monomial(d, [m - 1 for m in orders])
    fmu_factors = [("cyclic", (i, m)) for i, m in enumerate(orders)]
    fmu_factors += [("cyclic_order", m) for m in orders]
    return ReflectionGroup(d, elements, generators, hsop, f_mu, "Product",
                           "cyc:" + "x".join(str(m) for m in orders), fmu_factors)


def from_name(name: str) -> ReflectionGroup:
    try:
        if name.startswith("sym:"):
            return symmetric_group(int(name[4:]))
        if name.startswith("cyc:"):
            body = name[4:]
            if "x" in body:
                return product_group([int(v) for v in body.split("x")])
            return cyclic_group(int(body))
    except ValueError as exc:
        raise UnknownGroup(name) from exc
    raise UnknownGroup(name)


# group actions

def act(rho: np.ndarray, p: Polynomial) -> Polynomial:
    """z -> p(rho z)."""
    return p.linear_substitute(rho)


def project_group(G: ReflectionGroup, phi):
    """P_mu phi; polynomials map to polynomials, callables to callables."""
    weights = [complex(1.0 / G.chi(rho)) for rho in G.elements]  # chi(rho^{-1}) = det(rho)
    if isinstance(phi, Polynomial):
        acc: dict = {}
        for rho, c in zip(G.elements, weights):
            for a, v in act(rho, phi).terms.items():
                acc[a] = acc.get(a, 0) + c * v
        return Polynomial(phi.dim, {a: v / len(G) for a, v in acc.items()})

    def projected(z):
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        total = np.zeros(len(z), dtype=complex)
        for rho, c in zip(G.elements, weights):
            total += c * np.asarray(phi(z @ rho.T)).reshape(-1)
        return total / len(G)
    return projected


def relative_invariant_check(phi: Polynomial, G: ReflectionGroup,
                             tol: float = INVARIANT_TOL) -> bool:
    """True iff phi(rho z) = chi(rho) phi(z) coefficientwise for every rho."""
    if phi.dim != G.dim:
        raise algebra.DimensionMismatch("polynomial and group dimensions differ")
    scale = max(1.0, phi.max_abs())
    for rho in G.elements:
        diff = act(rho, phi) - phi * G.chi(rho)
        if diff.max_abs() > tol * scale:
            return False
    return True


def is_invariant(q: Polynomial, G: ReflectionGroup, tol: float = 1e-10) -> bool:
    scale = max(1.0, q.max_abs())
    return all((act(rho, q) - q).max_abs() <= tol * scale for rho in G.elements)


def divide_by_fmu(phi: Polynomial, G: ReflectionGroup) -> Polynomial:
    """phi / f_mu for a relative invariant phi.

    Symmetric groups divide by the Vandermonde one linear factor at a time;
    cyclic factors strip the monomial z_i^{m-1}.
    """
    scale = max(1.0, phi.max_abs())
    quotient = phi
    worst = 0.0
    for kind, data in G.fmu_factors:
        if kind == "vandermonde":
            quotient, rem = algebra.divide_by_vandermonde(quotient)
            worst = max(worst, rem)
        elif kind == "cyclic":
            axis, m = data
            kept, rem = {}, 0.0
            for a, c in quotient.terms.items():
                if a[axis] >= m - 1:
                    b = list(a)
                    b[axis] -= m - 1
                    kept[tuple(b)] = c
                else:
                    rem = max(rem, abs(c))
            quotient = Polynomial(quotient.dim, kept)
            worst = max(worst, rem)
    if worst > 1e-10 * scale:
        raise NotDivisible(f"remainder {worst:.2e} after dividing by f_mu")
    return quotient


# range comparison of Gamma_theta and P_mu

@dataclass
class EquivReport:
    group: str
    domain: str
    cap: int
    principal_angle: float
    dim_s1: int
    dim_s2: int
    degree: int
    passed: bool

    def to_json(self) -> str:
        return json.dumps({"group": self.group, "domain": self.domain, "cap": self.cap,
                           "principal_angle": self.principal_angle, "dim_s1": self.dim_s1,
                           "dim_s2": self.dim_s2, "degree": self.degree,
                           "pass": self.passed}, sort_keys=True)


def orthonormal_coefficients(gram: np.ndarray, rtol: float = 1e-11) -> np.ndarray:
    """Columns A with A^H G A = I spanning the range of G (rank revealing)."""
    vals, vecs = np.linalg.eigh(gram)
    keep = vals > rtol * max(vals.max(initial=0.0), 1e-300)
    return vecs[:, keep] / np.sqrt(vals[keep])


def largest_principal_angle(gram11, gram22, gram12) -> tuple[float, int, int]:
    """Largest principal angle between two spans given their Gram blocks.

    gram12[r, c] = <f_r, g_c>.  Returns (angle, dim1, dim2); the angle is
    pi/2 when the dimensions differ.
    """
    a1 = orthonormal_coefficients(gram11)
    a2 = orthonormal_coefficients(gram22)
    dim1, dim2 = a1.shape[1], a2.shape[1]
    if dim1 == 0 and dim2 == 0:
        return 0.0, 0, 0
    if dim1 != dim2:
        return math.pi / 2, dim1, dim2
    cross = a1.conj().T @ gram12 @ a2
    sigma = np.linalg.svd(cross, compute_uv=False)
    smallest = min(float(sigma.min()), 1.0)
    return float(math.asin(math.sqrt(max(0.0, 1.0 - smallest ** 2)))), dim1, dim2


def verify_equiv(G: ReflectionGroup, domain: Domain | None = None, cap: int = 4,
                 tol: float = 1e-6) -> EquivReport:
    """Compare ran Gamma_theta with ran P_mu on polynomials up to matching degree."""
    from . import spaces
    domain = domain or polydisc(G.dim)
    if domain.dim != G.dim or not domain.is_reinhardt:
        raise ValueError("verify_equiv needs a G-invariant polydisc")
    theta = G.theta_map()
    hsop_degrees = [h.degree for h in G.hsop]
    if theta.target.is_reinhardt:
        degree = G.f_mu.degree + cap * max(hsop_degrees)
    else:
        degree = G.f_mu.degree + cap
    # target basis elements whose image under Gamma_theta has degree <= degree
    basis = spaces.onb(theta.target, degree)
    s1 = []
    for label, b in zip(basis.labels, basis.elements):
        if theta.target.is_reinhardt:
            image_degree = G.f_mu.degree + sum(a * k for a, k in zip(label, hsop_degrees))
        else:
            image_degree = G.f_mu.degree + sum(label)
        if image_degree <= degree:
            s1.append(spaces.lift_gamma(theta, b))
    s2 = []
    seen = set()
    for alpha in algebra.monomials_up_to(G.dim, degree):
        q = project_group(G, Polynomial.monomial(G.dim, alpha))
        if q.is_zero():
            continue
        key = frozenset((a, round(c.real, 12), round(c.imag, 12)) for a, c in q.terms.items())
        if key in seen:
            continue
        seen.add(key)
        s2.append(spaces.LiftedFunction(spaces.embed_z(q), s1[0].axes, (0,) * G.dim))
    g11 = spaces.gram_lifted(s1)
    g22 = spaces.gram_lifted(s2)
    g12 = spaces.gram_lifted(s1, s2)
    angle, dim1, dim2 = largest_principal_angle(g11, g22, g12)
    return EquivReport(G.name, domain.name, cap, angle, dim1, dim2, degree,
                       bool(angle < tol and dim1 == dim2))


def random_relative_invariants(G: ReflectionGroup, count: int, degree: int,
                               rng: np.random.Generator) -> list[tuple[Polynomial, Polynomial]]:
    """Pairs (f_mu * q, q) with q a random G-invariant polynomial."""
    out = []
    for _ in range(count):
        p = algebra.random_polynomial(G.dim, degree, rng, integer=True)
        q = Polynomial.zero(G.dim)
        for rho in G.elements:
            q = q + act(rho, p)
        q = q * (1.0 / len(G))
        out.append((G.f_mu * q, q))
    return out


def invariant_average(G: ReflectionGroup, p: Polynomial) -> Polynomial:
    q = Polynomial.zero(G.dim)
    for rho in G.elements:
        q = q + act(rho, p)
    return q * (1.0 / len(G))

