"""Compressions of multiplication operators and the reducing projection P.

P, the orthogonal projection onto ran Gamma_f, is available in three forms:

* through fibers: P phi(z) = (1/m) sum_k phi(w_k) J_f(z) / J_f(w_k), where
  w_1, ..., w_m are the points with f(w_k) = f(z).  The ratio of jacobians
  is the jacobian of the local inverse carrying z to w_k (differentiate
  f o f^k = f);
* by group averaging (P_mu in :mod:`groups`) when f is the invariant map of
  a pseudoreflection group;
* by Gram projection onto span{Gamma_f b}, used as the reference.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from . import spaces
from .algebra import Polynomial
from .domains import SYMMETRIZED, Domain
from .groups import project_group  # noqa: F401  (part of this module's interface)
from .maps import ProperMap
from .spaces import BasisSet, LiftedFunction, onb

NEAR_BRANCH = 1e-6


class TruncationUnsafe(ValueError):
    pass


class NearBranchLocus(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class OperatorMatrix:
    """entries[r, c] = <T b_c, b_r> for row basis b_r and column basis b_c."""

    rows: list
    cols: list
    entries: np.ndarray
    name: str = ""

    @property
    def shape(self):
        return self.entries.shape

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["row\\col"] + [_label(c) for c in self.cols])
            for label, row in zip(self.rows, self.entries):
                writer.writerow([_label(label)] + [_fmt(v) for v in row])


def _label(alpha) -> str:
    return "(" + ",".join(str(a) for a in alpha) + ")"


def _fmt(v: complex) -> str:
    return f"{v.real:.17g}{v.imag:+.17g}j"


def _basis_labels(basis: BasisSet):
    return [tuple(label) for label in basis.labels]


def mult_matrix(symbol, domain: Domain, col_cap: int, row_cap: int,
                level: int | None = None) -> OperatorMatrix:
    """Compression of M_symbol between onb(domain, col_cap) and onb(domain, row_cap)."""
    cols = onb(domain, col_cap)
    rows = onb(domain, row_cap)
    if isinstance(symbol, (int, float, complex)):
        symbol = Polynomial.constant(domain.dim, symbol)
    if isinstance(symbol, Polynomial):
        need = spaces.target_degree(symbol, domain)
        if row_cap < col_cap + max(need, 0):
            raise TruncationUnsafe(f"row cap {row_cap} < {col_cap} + degree {need}")
        prods = [spaces.lift_polynomial(symbol * b, domain) for b in cols.elements]
        rows_l = [spaces.lift_polynomial(b, domain) for b in rows.elements]
        entries = spaces.gram_lifted(prods, rows_l).T
    else:
        level = level or 4 * row_cap + 8
        prods = [(lambda z, b=b: np.asarray(symbol(z)).reshape(-1) * b(z)) for b in cols.elements]
        entries = spaces.gram_nodes(prods, domain, level, others=rows.elements).T
    return OperatorMatrix(_basis_labels(rows), _basis_labels(cols), entries)


def shift_matrix(domain: Domain, i: int, col_cap: int, row_cap: int | None = None
                 ) -> OperatorMatrix:
    """Closed-form Bergman (multi)shift: <z_i e_a, e_b> = sqrt((a_i+1)/(a_i+2)) if b = a + e_i."""
    if not domain.is_reinhardt:
        raise ValueError("closed-form shift weights need a Reinhardt domain")
    row_cap = col_cap + 1 if row_cap is None else row_cap
    cols = onb(domain, col_cap)
    rows = onb(domain, row_cap)
    entries = np.zeros((len(rows), len(cols)), dtype=complex)
    row_index = {tuple(label): r for r, label in enumerate(rows.labels)}
    for c, alpha in enumerate(cols.labels):
        beta = list(alpha)
        beta[i] += 1
        r = row_index.get(tuple(beta))
        if r is not None:
            entries[r, c] = math.sqrt((alpha[i] + 1) / (alpha[i] + 2))
    return OperatorMatrix(_basis_labels(rows), _basis_labels(cols), entries)


def restriction_matrix(f: ProperMap, cap: int, row_cap: int | None = None
                       ) -> list[OperatorMatrix]:
    """<M_{f_i} Gamma_f b_a, Gamma_f b_b> for target basis labels a (cols) and b (rows).

    f_i pulled back to the cover is the i-th component of pi_2(u), so the
    multiplication happens on the polynomial part of the lift.
    """
    if cap < 1:
        raise ValueError("cap must be at least 1")
    target = f.target
    d = target.dim
    step = d if target.kind == SYMMETRIZED else 1
    row_cap = cap + step if row_cap is None else row_cap
    if row_cap < cap + step:
        raise TruncationUnsafe(f"row cap {row_cap} < {cap} + {step}")
    cols = onb(target, cap)
    rows = onb(target, row_cap)
    lifted_cols = [spaces.lift_gamma(f, b) for b in cols.elements]
    lifted_rows = [spaces.lift_gamma(f, b) for b in rows.elements]
    out = []
    for i in range(d):
        if f.cover_out == "sym":
            from .algebra import elementary_symmetric
            symbol = elementary_symmetric(d, i + 1)
        else:
            symbol = Polynomial.variable(d, i)
        prods = [g.times_u(symbol) for g in lifted_cols]
        entries = spaces.gram_lifted(prods, lifted_rows).T
        out.append(OperatorMatrix(_basis_labels(rows), _basis_labels(cols), entries,
                                  name=f"{f.name}:f{i + 1}"))
    return out


def target_mult_matrices(domain: Domain, cap: int) -> list[OperatorMatrix]:
    """Coordinate multiplications on onb(domain) with the row cap used by restriction_matrix."""
    d = domain.dim
    step = d if domain.kind == SYMMETRIZED else 1
    return [mult_matrix(Polynomial.variable(d, i), domain, cap, cap + step) for i in range(d)]


# the projection P

def project_fiber(f: ProperMap, phi: Callable, z, guard: float = NEAR_BRANCH) -> np.ndarray:
    """(1/m) sum_k phi(w_k) J_f(z) / J_f(w_k) over the fiber through z."""
    z = np.atleast_2d(np.asarray(z, dtype=complex))
    pre = f.preimages(f.evaluate(z))  # (N, m, d)
    n, m, d = pre.shape
    flat = pre.reshape(n * m, d)
    jac_pre = f.jacobian_values(flat).reshape(n, m)
    if np.min(np.abs(jac_pre)) <= guard:
        raise NearBranchLocus(f"|J_f| = {np.min(np.abs(jac_pre)):.2e} on a fiber")
    jac_z = f.jacobian_values(z)
    vals = np.asarray(phi(flat), dtype=complex).reshape(n, m)
    return np.sum(vals / jac_pre, axis=1) * jac_z / m


def gram_projection(f: ProperMap, phi: LiftedFunction, cap: int = 12) -> LiftedFunction:
    """Reference projection of a lifted source function onto span{Gamma_f b : |b| <= cap}."""
    basis = onb(f.target, cap)
    lifted = [spaces.lift_gamma(f, b) for b in basis.elements]
    # normal equations: sum_c coef_c <l_c, l_r> = <phi, l_r>
    g = spaces.gram_lifted(lifted)
    rhs = spaces.gram_lifted([phi], lifted)[0]
    coef = scipy.linalg.solve(g.T, rhs, assume_a="her")
    poly = Polynomial.zero(2 * f.dim)
    for c, h in zip(coef, lifted):
        poly = poly + h.poly * (c * h.scale)
    return LiftedFunction(poly, lifted[0].axes, lifted[0].jac)


def source_callable(f: ProperMap, g: LiftedFunction) -> Callable:
    """Evaluate a lifted function at actual source points."""
    return lambda x: spaces.evaluate_on_source(f, g, x)


def commutator_residual(f: ProperMap, test_functions: Sequence[Callable], points,
                        projector: Callable | None = None) -> float:
    """max |P(f_i phi)(z) - f_i(z) P phi(z)| over components, functions and points.

    ``projector(phi, z)`` defaults to the fiber formula.
    """
    points = np.atleast_2d(np.asarray(points, dtype=complex))
    if projector is None:
        def projector(phi, z):
            return project_fiber(f, phi, z)
    fz = f.evaluate(points)
    worst = 0.0
    for phi in test_functions:
        p_phi = projector(phi, points)
        for i in range(f.target.dim):
            def product(x, phi=phi, i=i):
                x = np.atleast_2d(x)
                return f.evaluate(x)[:, i] * np.asarray(phi(x)).reshape(-1)
            lhs = projector(product, points)
            worst = max(worst, float(np.max(np.abs(lhs - fz[:, i] * p_phi))))
    return worst


def compress_square(mat: OperatorMatrix) -> np.ndarray:
    """Square compression onto the column basis (rows restricted to column labels)."""
    index = {label: r for r, label in enumerate(mat.rows)}
    keep = [index[label] for label in mat.cols]
    return mat.entries[keep, :]


def commutant_dimension(matrices: Sequence[np.ndarray], tol: float = 1e-7) -> int:
    """Dimension of {X : X T = T X and X T^* = T^* X for all T} (compressed commutant).

    Built from Kronecker products; the nullspace is read off the singular
    values, relative to the largest one.
    """
    n = matrices[0].shape[0]
    eye = np.eye(n)
    blocks = []
    for t in matrices:
        for s in (t, t.conj().T):
            # vec(X S - S X) = (S^T kron I - I kron S) vec(X)
            blocks.append(np.kron(s.T, eye) - np.kron(eye, s))
    system = np.vstack(blocks)
    sigma = np.linalg.svd(system, compute_uv=False)
    return int(np.sum(sigma <= tol * max(sigma[0], 1.0))) + max(0, n * n - len(sigma))


def fiber_projection_error(f: ProperMap, phi: LiftedFunction, points, cap: int = 12) -> float:
    """Pointwise gap between the fiber formula and the Gram-projection reference."""
    ref = gram_projection(f, phi, cap)
    a = project_fiber(f, source_callable(f, phi), points)
    b = spaces.evaluate_on_source(f, ref, points)
    return float(np.max(np.abs(a - b)))
