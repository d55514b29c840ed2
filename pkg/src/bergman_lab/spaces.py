"""Bergman-space model: orthonormal bases, Gram matrices, Gamma_f and kernels.

Inner products are computed on polydisc covers.  A function on a domain is
represented by its *lift* to a polydisc, a function of the form

    scale * P(z, B(z)) * prod_i B_i'(z_i)^{e_i}

with P a polynomial in 2d variables and B = (B_1, ..., B_d) one-variable
Blaschke products (or identities).  Functions on the symmetrized polydisc are
lifted through s as g -> g(s(z)) J_s(z) / sqrt(d!), which turns the
pushforward measure into the polydisc measure.

Because the polydisc quadrature is a tensor product, the Gram matrix of such
lifts only needs the one-variable Gram matrices of the atoms
z^j B^k (B')^e on each axis.  These are computed by polar quadrature on D
whose size is increased until the atom Gram stops changing.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from . import algebra
from .algebra import Polynomial, RationalFunction
from .domains import (POLYDISC, SYMMETRIZED, UNIT_DISC, Domain, disc_rule_arrays,
                      monomial_norm, polydisc, quadrature, roots_from_symmetric,
                      symmetrize_points, vandermonde_values)
from .maps import Blaschke, ProperMap, jacobian_sign

GRAM_REFINE_TOL = 1e-15
BRANCH_GUARD = 1e-8


class BranchPoint(ZeroDivisionError):
    pass


# lifted functions

@dataclass(frozen=True, eq=False)
class LiftedFunction:
    """scale * poly(z, B(z)) * prod B_i'(z_i)^{jac_i} on the polydisc cover.

    ``poly`` has 2d variables: z_1..z_d followed by u_1..u_d with u_i = B_i(z_i).
    An axis whose entry in ``axes`` is None carries the identity map.
    """

    poly: Polynomial
    axes: tuple
    jac: tuple
    scale: float = 1.0

    @property
    def dim(self) -> int:
        return len(self.axes)

    def __post_init__(self):
        if self.poly.dim != 2 * len(self.axes) or len(self.jac) != len(self.axes):
            raise algebra.DimensionMismatch("lifted function shape mismatch")

    def __call__(self, z) -> np.ndarray:
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        u = np.empty_like(z)
        factor = np.full(len(z), self.scale, dtype=complex)
        for i, b in enumerate(self.axes):
            if b is None:
                u[:, i] = z[:, i]
            else:
                u[:, i] = b(z[:, i])
                if self.jac[i]:
                    factor = factor * b.derivative(z[:, i])
        return factor * self.poly(np.concatenate([z, u], axis=1))

    def times_u(self, q: Polynomial) -> "LiftedFunction":
        """Multiply by a polynomial in the u variables."""
        return LiftedFunction(self.poly * embed_u(q), self.axes, self.jac, self.scale)

    def scaled(self, c: float) -> "LiftedFunction":
        return LiftedFunction(self.poly, self.axes, self.jac, self.scale * c)

    def atoms(self):
        """Per-term decomposition: ((atom_1, ..., atom_d), coefficient)."""
        d = self.dim
        for alpha, c in self.poly.terms.items():
            atoms = []
            for i, b in enumerate(self.axes):
                j, k = alpha[i], alpha[d + i]
                if b is None or b.is_identity:
                    atoms.append((j + k, 0, 0))
                else:
                    atoms.append((j, k, int(self.jac[i])))
            yield tuple(atoms), c * self.scale


def embed_z(p: Polynomial) -> Polynomial:
    """View a polynomial in z as a polynomial in (z, u)."""
    d = p.dim
    return Polynomial(2 * d, {a + (0,) * d: c for a, c in p.terms.items()})


def embed_u(p: Polynomial) -> Polynomial:
    d = p.dim
    return Polynomial(2 * d, {(0,) * d + a: c for a, c in p.terms.items()})


def lift_polynomial(p: Polynomial, domain: Domain) -> LiftedFunction:
    """Lift of a polynomial on ``domain`` to the polydisc cover."""
    d = domain.dim
    axes = (None,) * d
    if domain.kind == SYMMETRIZED:
        q = symmetric_lift(p)
        return LiftedFunction(embed_z(q), axes, (0,) * d, 1.0 / math.sqrt(math.factorial(d)))
    return LiftedFunction(embed_z(p), axes, (0,) * d)


@lru_cache(maxsize=4096)
def _symmetric_lift_cached(p: Polynomial) -> Polynomial:
    d = p.dim
    s = [algebra.elementary_symmetric(d, k) for k in range(1, d + 1)]
    return p.substitute(s) * symmetric_jacobian(d)


def symmetric_lift(p: Polynomial) -> Polynomial:
    """(p o s) * J_s as a polynomial on D^d."""
    return _symmetric_lift_cached(p)


@lru_cache(maxsize=8)
def symmetric_jacobian(d: int) -> Polynomial:
    return algebra.jacobian_det([algebra.elementary_symmetric(d, k)
                                 for k in range(1, d + 1)]).as_polynomial()


def lift_gamma(f: ProperMap, psi: Polynomial) -> LiftedFunction:
    """Lift of Gamma_f psi to the source cover.

    With f o pi_1 = pi_2 o B this is
    psi(pi_2(u)) J_{pi_2}(u) prod B_i'(z_i) / sqrt(m |pi_1|), u = B(z).
    """
    d = f.dim
    if psi.dim != f.target.dim:
        raise algebra.DimensionMismatch("psi does not live on the target")
    q = symmetric_lift(psi) if f.cover_out == "sym" else psi
    cover_degree = math.factorial(d) if f.cover_in == "sym" else 1
    jac = tuple(0 if b is None else 1 for b in f.axes)
    scale = 1.0 / math.sqrt(f.multiplicity * cover_degree)
    return LiftedFunction(embed_u(q), tuple(f.axes), jac, scale)


def lift_source(f: ProperMap, p: Polynomial, with_jacobian: bool = False,
                antisymmetrize: bool = True) -> LiftedFunction:
    """A test function on the source cover: p(z), optionally times prod B_i'(z_i).

    For sources that are symmetrized polydiscs the lift has to be
    anti-symmetric, so p is replaced by its anti-symmetrization.
    """
    if f.cover_in == "sym" and antisymmetrize:
        p = antisymmetrize_poly(p)
    jac = tuple(int(with_jacobian and b is not None) for b in f.axes)
    return LiftedFunction(embed_z(p), tuple(f.axes), jac)


def antisymmetrize_poly(p: Polynomial) -> Polynomial:
    d = p.dim
    out = Polynomial.zero(d)
    for perm in itertools.permutations(range(d)):
        mat = np.zeros((d, d))
        mat[np.arange(d), perm] = 1
        out = out + p.linear_substitute(mat) * algebra.perm_sign(perm)
    return out * (1.0 / math.factorial(d))


def evaluate_on_source(f: ProperMap, g: LiftedFunction, x) -> np.ndarray:
    """Value at source points of the function whose lift is ``g``."""
    x = np.atleast_2d(np.asarray(x, dtype=complex))
    if f.cover_in != "sym":
        return g(x)
    z = roots_from_symmetric(x)
    jac = jacobian_sign(f.dim) * vandermonde_values(z)
    if np.any(np.abs(jac) < BRANCH_GUARD):
        raise BranchPoint("point on the branch locus of the symmetrization")
    return g(z) * math.sqrt(math.factorial(f.dim)) / jac


# one-variable atom Grams

def _atom_values(b: Blaschke | None, atoms: Sequence[tuple[int, int, int]], z: np.ndarray):
    if b is None:
        return np.stack([z ** j for j, _, _ in atoms])
    bz = b(z)
    db = b.derivative(z)
    out = np.empty((len(atoms), len(z)), dtype=complex)
    for r, (j, k, e) in enumerate(atoms):
        v = z ** j * bz ** k
        if e:
            v = v * db
        out[r] = v
    return out


def _gram_on_rule(b, atoms_a, atoms_b, radial, angular):
    z, w = disc_rule_arrays(radial, angular)
    va = _atom_values(b, atoms_a, z)
    vb = va if atoms_b is atoms_a else _atom_values(b, atoms_b, z)
    return (va * w) @ vb.conj().T


def _atom_degree(b: Blaschke | None, atom) -> int:
    j, k, e = atom
    if b is None:
        return j
    return j + k * b.degree + e * max(b.degree - 1, 0)


@lru_cache(maxsize=256)
def _rule_size(b: Blaschke | None, degree: int) -> tuple[int, int]:
    """Smallest tried (radial, angular) sizes at which atom Grams have converged."""
    if b is None or b.is_polynomial:
        return degree // 2 + 1, 2 * degree + 1
    ln_r = math.log(b.pole_radius)
    # all atoms up to the given degree are probed together
    atoms = [(0, k, 1) for k in range(degree // max(b.degree, 1) + 1)]
    atoms += [(j, 0, 1) for j in range(1, degree + 1)]
    radial = degree // 2 + 8 + int(math.ceil(12 / ln_r))
    angular = 2 * degree + 1 + int(math.ceil(36.8 / ln_r))
    current = _gram_on_rule(b, atoms, atoms, radial, angular)
    for _ in range(12):
        r2, a2 = radial + radial // 2 + 4, 2 * angular
        nxt = _gram_on_rule(b, atoms, atoms, r2, a2)
        scale = max(1.0, np.max(np.abs(nxt)))
        if np.max(np.abs(nxt - current)) <= GRAM_REFINE_TOL * 64 * scale:
            return radial, angular
        radial, angular, current = r2, a2, nxt
    return radial, angular


def axis_gram(b: Blaschke | None, atoms_a, atoms_b=None) -> np.ndarray:
    """G[r, c] = integral over D of atom_a[r] * conj(atom_b[c]) under dA/pi."""
    atoms_a = list(atoms_a)
    atoms_b = atoms_a if atoms_b is None else list(atoms_b)
    degree = max(_atom_degree(b, a) for a in atoms_a + atoms_b)
    # round the degree up so that rule sizes are shared between calls
    degree = max(4, int(math.ceil(degree / 4) * 4))
    radial, angular = _rule_size(b, degree)
    return _gram_on_rule(b, atoms_a, atoms_b, radial, angular)


def gram_lifted(fs: Sequence[LiftedFunction], gs: Sequence[LiftedFunction] | None = None
                ) -> np.ndarray:
    """Matrix of inner products <f_r, g_c> computed axis by axis."""
    gs = fs if gs is None else gs
    if not fs or not gs:
        return np.zeros((len(fs), len(gs)), dtype=complex)
    axes = fs[0].axes
    if any(h.axes != axes for h in list(fs) + list(gs)):
        raise ValueError("lifted functions live on different covers")
    d = len(axes)
    decomp_f = [list(h.atoms()) for h in fs]
    decomp_g = decomp_f if gs is fs else [list(h.atoms()) for h in gs]
    index_f = [dict() for _ in range(d)]
    index_g = index_f if gs is fs else [dict() for _ in range(d)]
    for decomp, index in ((decomp_f, index_f), (decomp_g, index_g)):
        for terms in decomp:
            for atoms, _ in terms:
                for i, a in enumerate(atoms):
                    index[i].setdefault(a, len(index[i]))
    mats = []
    for i in range(d):
        la = sorted(index_f[i], key=index_f[i].get)
        lb = sorted(index_g[i], key=index_g[i].get)
        mats.append(axis_gram(axes[i], la, lb))

    def tensor(decomp, index):
        shape = (len(decomp),) + tuple(len(ix) for ix in index)
        out = np.zeros(shape, dtype=complex)
        for r, terms in enumerate(decomp):
            for atoms, c in terms:
                out[(r,) + tuple(index[i][a] for i, a in enumerate(atoms))] += c
        return out

    cf = tensor(decomp_f, index_f)
    cg = cf if gs is fs else tensor(decomp_g, index_g)
    t = cg.conj()
    for i in range(d):
        # contract the axis-i index of t with the column index of mats[i]
        t = np.moveaxis(np.tensordot(mats[i], t, axes=([1], [i + 1])), 0, i + 1)
    out = cf.reshape(len(fs), -1) @ t.reshape(len(gs), -1).T
    if gs is fs:
        out = (out + out.conj().T) / 2
    return out


# generic node path

def gram_nodes(functions: Sequence[Callable], domain: Domain, level: int,
               others: Sequence[Callable] | None = None) -> np.ndarray:
    rule = quadrature(domain, level)
    va = np.stack([np.asarray(f(rule.nodes), dtype=complex).reshape(-1) for f in functions])
    if others is None:
        g = (va * rule.weights) @ va.conj().T
        return (g + g.conj().T) / 2
    vb = np.stack([np.asarray(f(rule.nodes), dtype=complex).reshape(-1) for f in others])
    return (va * rule.weights) @ vb.conj().T


def default_level(functions) -> int:
    degs = [f.degree for f in functions if isinstance(f, Polynomial)]
    return 2 * max(degs, default=4) + 4


def gram(functions: Sequence, domain: Domain | None = None, level: int | None = None
         ) -> np.ndarray:
    """Hermitian Gram matrix G[j, k] = <f_j, f_k> under the normalized measure.

    Lifted functions and polynomials use the separable cover computation;
    rational functions and other callables are sampled on a quadrature rule
    (``level`` defaults to twice the largest polynomial degree plus four).
    """
    functions = list(functions)
    if all(isinstance(f, LiftedFunction) for f in functions):
        return gram_lifted(functions)
    if domain is None:
        raise ValueError("a domain is needed for non-lifted functions")
    if all(isinstance(f, Polynomial) for f in functions):
        return gram_lifted([lift_polynomial(p, domain) for p in functions])
    return gram_nodes(functions, domain, level or 2 * default_level(functions))


def inner(f, g, domain: Domain | None = None) -> complex:
    return complex(gram_lifted([f], [g])[0, 0]) if isinstance(f, LiftedFunction) \
        else complex(gram([f, g], domain)[0, 1])


def norm(f, domain: Domain | None = None) -> float:
    if isinstance(f, Polynomial):
        f = lift_polynomial(f, domain)
    return float(np.sqrt(max(gram_lifted([f]).real[0, 0], 0.0)))


# Gamma_f

def gamma_apply(f: ProperMap, psi):
    """Gamma_f psi = (psi o f) J_f / sqrt(m).

    Polynomials give a RationalFunction built by composition; anything else
    gives a callable on source points.
    """
    c = 1.0 / math.sqrt(f.multiplicity)
    if isinstance(psi, Polynomial):
        try:
            comps = f.components
            jac = f.jacobian
        except NotImplementedError:
            comps = None
        if comps is not None:
            return algebra.compose(psi, comps) * jac * c

    def evaluate(z):
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        return c * np.asarray(psi(f.evaluate(z))).reshape(-1) * f.jacobian_values(z)
    return evaluate


# orthonormal bases

@dataclass(frozen=True, eq=False)
class BasisSet:
    domain: Domain
    elements: list
    degree_cap: int
    labels: list
    degrees: list = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def index(self, label) -> int:
        return self.labels.index(tuple(label))

    def evaluate(self, z) -> np.ndarray:
        """(len(basis), N) values at domain points."""
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        return np.stack([e(z) for e in self.elements])


def partitions_up_to(d: int, cap: int) -> list[tuple[int, ...]]:
    """Partitions mu_1 >= ... >= mu_d >= 0 with |mu| <= cap, by size then lex."""
    out = []

    def rec(prefix, remaining, bound):
        if len(prefix) == d:
            out.append(tuple(prefix))
            return
        for v in range(min(bound, remaining), -1, -1):
            rec(prefix + [v], remaining - v, v)

    rec([], cap, cap)
    return sorted(out, key=lambda mu: (sum(mu), tuple(-v for v in mu)))


@lru_cache(maxsize=256)
def symdisc_basis_element(mu: tuple[int, ...]) -> Polynomial:
    """h_mu on G_d with h_mu o s = sqrt(prod(lambda_i + 1)) a_lambda / J_s, lambda = mu + delta."""
    d = len(mu)
    lam = tuple(m + d - 1 - i for i, m in enumerate(mu))
    alt = algebra.alternant(lam)
    quotient, rem = algebra.divide_by_vandermonde(alt)
    if rem > 1e-9 * max(1.0, alt.max_abs()):
        raise ArithmeticError("alternant not divisible by the Vandermonde")
    quotient = quotient * (jacobian_sign(d) * math.sqrt(float(np.prod([x + 1 for x in lam]))))
    return algebra.express_in_elementary(quotient)


def onb(domain: Domain, degree_cap: int) -> BasisSet:
    if degree_cap < 0:
        raise ValueError("degree cap must be non-negative")
    d = domain.dim
    if domain.kind == SYMMETRIZED:
        labels = partitions_up_to(d, degree_cap)
        elements = [symdisc_basis_element(mu) for mu in labels]
        return BasisSet(domain, elements, degree_cap, labels, [sum(mu) for mu in labels])
    labels = algebra.monomials_up_to(d, degree_cap)
    elements = [Polynomial.monomial(d, a, 1.0 / monomial_norm(domain, a)) for a in labels]
    return BasisSet(domain, elements, degree_cap, labels, [sum(a) for a in labels])


def target_degree(p: Polynomial, domain: Domain) -> int:
    """Degree used for truncation: weighted (w_k has weight k) on G_d."""
    if domain.kind == SYMMETRIZED:
        return p.weighted_degree(list(range(1, domain.dim + 1)))
    return p.degree


# kernels

class KernelModel:
    domain: Domain

    def __call__(self, z, w):
        return self.matrix(np.atleast_2d(z), np.atleast_2d(w))

    def matrix(self, z: np.ndarray, w: np.ndarray) -> np.ndarray:
        """K(z_r, w_c) for point arrays z (N, d) and w (M, d)."""
        raise NotImplementedError

    def pairs(self, z: np.ndarray, w: np.ndarray) -> np.ndarray:
        """K(z_r, w_r) for matched rows."""
        return np.array([self.matrix(z[r:r + 1], w[r:r + 1])[0, 0] for r in range(len(z))])


def _disc_kernel(z: np.ndarray, w: np.ndarray) -> np.ndarray:
    return (1 - z[:, None] * np.conj(w)[None, :]) ** -2


class ClosedForm(KernelModel):
    """Closed-form Bergman kernels of D, D^d and G_d under normalized measure.

    On G_d the kernel is evaluated at preimage coordinates via the
    determinant formula; its overall constant is fixed by reproducing the
    constant function (see :func:`pin_symdisc_constant`) unless given.
    """

    def __init__(self, domain: Domain, constant: complex | None = None,
                 level: int | None = None):
        self.domain = domain
        if domain.kind == SYMMETRIZED and constant is None:
            constant = pin_symdisc_constant(domain.dim, level or pin_level(domain.dim))
        self.constant = 1.0 if constant is None else constant

    @property
    def name(self) -> str:
        return {UNIT_DISC: "kernel:disc", POLYDISC: f"kernel:polydisc:{self.domain.dim}",
                SYMMETRIZED: f"kernel:symdisc:{self.domain.dim}"}[self.domain.kind]

    def matrix(self, z, w):
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        w = np.atleast_2d(np.asarray(w, dtype=complex))
        if self.domain.kind != SYMMETRIZED:
            out = np.ones((len(z), len(w)), dtype=complex)
            for i in range(self.domain.dim):
                out = out * _disc_kernel(z[:, i], w[:, i])
            return out
        return self.constant * symdisc_kernel_raw(roots_from_symmetric(z),
                                                  roots_from_symmetric(w))

    def eval_lifted(self, zc: np.ndarray, wc: np.ndarray) -> np.ndarray:
        """G_d kernel at s(zc), s(wc) given polydisc preimages directly."""
        return self.constant * symdisc_kernel_raw(np.atleast_2d(zc), np.atleast_2d(wc))


def symdisc_kernel_raw(zc: np.ndarray, wc: np.ndarray) -> np.ndarray:
    """J_s(z)^-1 det[(1 - z_i conj(w_j))^-2] conj(J_s(w))^-1 for preimage rows."""
    d = zc.shape[1]
    jz = jacobian_sign(d) * vandermonde_values(zc)
    jw = jacobian_sign(d) * vandermonde_values(wc)
    if np.any(np.abs(jz) < BRANCH_GUARD) or np.any(np.abs(jw) < BRANCH_GUARD):
        raise BranchPoint("kernel formula evaluated on the branch locus")
    det = np.zeros((len(zc), len(wc)), dtype=complex)
    for perm in itertools.permutations(range(d)):
        term = np.full((len(zc), len(wc)), float(algebra.perm_sign(perm)), dtype=complex)
        for i, j in enumerate(perm):
            term = term * (1 - zc[:, i][:, None] * np.conj(wc[:, j])[None, :]) ** -2
        det += term
    return det / jz[:, None] / np.conj(jw)[None, :]


def pin_level(d: int) -> int:
    """Pushforward level for the constant oracle; the rule has O(level^(2d)) nodes."""
    return {1: 24, 2: 24, 3: 10}.get(d, 6)


@lru_cache(maxsize=8)
def pin_symdisc_constant(d: int, level: int = 24, seed: int = 20240601) -> complex:
    """Constant c making c * (raw determinant kernel) reproduce the function 1 on G_d.

    The raw kernel's reproducing integral of 1 is computed with the
    pushforward rule at a few base points and averaged; c is its inverse.
    """
    rule = quadrature(Domain(SYMMETRIZED, d), level)
    rng = np.random.default_rng(seed)
    base = 0.3 * np.sqrt(rng.random((3, d))) * np.exp(2j * np.pi * rng.random((3, d)))
    vals = []
    for y in base:
        k = symdisc_kernel_raw(rule.preimages, y[None, :])[:, 0]
        vals.append(np.dot(rule.weights, np.conj(k)))
    integral = np.mean(vals)
    return complex(1.0 / np.conj(integral))


class TruncatedSum(KernelModel):
    """Sum over a finite orthonormal family of b(z) conj(b(w))."""

    def __init__(self, domain: Domain, functions: Sequence[Callable], label: str = ""):
        self.domain = domain
        self.functions = list(functions)
        self.label = label

    def values(self, z):
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        return np.stack([np.asarray(f(z), dtype=complex).reshape(-1) for f in self.functions])

    def matrix(self, z, w):
        return self.values(z).T @ self.values(w).conj()

    def pairs(self, z, w):
        return np.sum(self.values(z) * self.values(w).conj(), axis=0)


def truncated_kernel(domain: Domain, cap: int) -> TruncatedSum:
    basis = onb(domain, cap)
    return TruncatedSum(domain, basis.elements, label=f"onb:{domain}:{cap}")


def gamma_kernel(f: ProperMap, cap: int) -> TruncatedSum:
    """Truncated sum over {Gamma_f b : b in onb(target, cap)}."""
    basis = onb(f.target, cap)
    return TruncatedSum(f.source, [gamma_apply_numeric(f, b) for b in basis.elements],
                        label=f"gamma:{f.name}:{cap}")


def gamma_apply_numeric(f: ProperMap, psi: Callable) -> Callable:
    c = 1.0 / math.sqrt(f.multiplicity)

    def evaluate(z):
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        return c * np.asarray(psi(f.evaluate(z))).reshape(-1) * f.jacobian_values(z)
    return evaluate


class PulledBack(KernelModel):
    """(1/m) J_f(z) K_2(f(z), f(w)) conj(J_f(w))."""

    def __init__(self, f: ProperMap, inner: KernelModel | None = None):
        self.map = f
        self.domain = f.source
        self.inner = inner if inner is not None else ClosedForm(f.target)

    def matrix(self, z, w):
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        w = np.atleast_2d(np.asarray(w, dtype=complex))
        f = self.map
        jz, jw = f.jacobian_values(z), f.jacobian_values(w)
        k2 = self.inner.matrix(f.evaluate(z), f.evaluate(w))
        return jz[:, None] * k2 * np.conj(jw)[None, :] / f.multiplicity

    def pairs(self, z, w):
        z = np.atleast_2d(np.asarray(z, dtype=complex))
        w = np.atleast_2d(np.asarray(w, dtype=complex))
        f = self.map
        jz, jw = f.jacobian_values(z), f.jacobian_values(w)
        fz, fw = f.evaluate(z), f.evaluate(w)
        k2 = self.inner.pairs(fz, fw)
        return jz * k2 * np.conj(jw) / f.multiplicity


def kernel_eval(model: KernelModel, z, w) -> complex:
    z = np.asarray(z, dtype=complex).reshape(1, -1)
    w = np.asarray(w, dtype=complex).reshape(1, -1)
    return complex(model.matrix(z, w)[0, 0])


def reproduce_check(model: KernelModel, phi: Callable, w, level: int = 40) -> float:
    """|integral of phi(z) conj(K(z, w)) dmu(z) - phi(w)| on the model's domain."""
    rule = quadrature(model.domain, level)
    w = np.asarray(w, dtype=complex).reshape(1, -1)
    if isinstance(model, ClosedForm) and model.domain.kind == SYMMETRIZED:
        k = model.eval_lifted(rule.preimages, roots_from_symmetric(w))[:, 0]
    else:
        k = model.matrix(rule.nodes, w)[:, 0]
    vals = np.asarray(phi(rule.nodes), dtype=complex).reshape(-1)
    integral = np.dot(rule.weights, vals * np.conj(k))
    target = complex(np.asarray(phi(w)).reshape(-1)[0])
    return float(abs(integral - target))


def kernel_from_name(name: str) -> KernelModel:
    from . import maps
    parts = name.split(":")
    if parts[0] == "kernel" and len(parts) >= 2:
        if parts[1] == "disc":
            return ClosedForm(polydisc(1))
        if parts[1] == "polydisc":
            return ClosedForm(polydisc(int(parts[2])))
        if parts[1] == "symdisc":
            return ClosedForm(Domain(SYMMETRIZED, int(parts[2])))
    if parts[0] == "pullback":
        return PulledBack(maps.from_name(name[len("pullback:"):]))
    raise KeyError(f"unknown kernel model {name!r}")


def symmetrize(z):
    return symmetrize_points(np.atleast_2d(z))
