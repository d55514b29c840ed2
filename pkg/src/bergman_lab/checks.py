"""Named numerical checks run by scenarios.

Each check takes a proper map, a :class:`CheckContext` and returns a
:class:`CheckOutcome` holding the worst residual, a table of per-item rows
and optional extra CSV artifacts.  Structural failures that are not
residuals (wrong group order, dimension mismatch) are reported as a
residual of 1.0 so that pass is always "residual below tolerance".
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import algebra, deck, groups, operators, spaces
from .algebra import Polynomial
from .domains import SYMMETRIZED, Domain, monomial_norm, polydisc, quadrature, sample, sample_ball
from .maps import BlaschkeMap, PolydiscProduct, ProperMap, Symmetrization, random_regular_points

DEFAULT_TOLERANCES = {
    "isometry": 1e-8,
    "reducing": 1e-7,
    "restriction-shift": 1e-7,
    "kernel-pullback": 1e-6,
    "kernel-symdisc": 1e-6,
    "deck": 1e-7,
    "equiv": 1e-6,
    "onb-gram": 1e-8,
}

STRUCTURAL_FAILURE = 1.0
KERNEL_CAP = 20
KERNEL_RADIUS = 0.7
ISOMETRY_DEGREE = 8
ISOMETRY_SAMPLES = 10


class UnknownCheck(KeyError):
    pass


class CheckNotApplicable(ValueError):
    pass


@dataclass
class CheckContext:
    cap: int
    level: int
    rng: np.random.Generator


@dataclass
class CheckOutcome:
    max_residual: float
    rows: list[dict]
    artifacts: dict[str, Callable] = field(default_factory=dict)


# helpers

def _node_norms(polys: list[Polynomial], domain: Domain, level: int,
                chunk: int = 40000) -> np.ndarray:
    """L2 norms of several polynomials on a quadrature rule, sharing monomial values."""
    rule = quadrature(domain, level)
    alphas = sorted({a for p in polys for a in p.terms})
    coef = np.array([[p.terms.get(a, 0) for p in polys] for a in alphas], dtype=complex)
    top = max(max(a) for a in alphas)
    total = np.zeros(len(polys))
    for start in range(0, len(rule.nodes), chunk):
        x = rule.nodes[start:start + chunk]
        powers = x[:, :, None] ** np.arange(top + 1)[None, None, :]
        mono = np.ones((len(x), len(alphas)), dtype=complex)
        for j, a in enumerate(alphas):
            for i, k in enumerate(a):
                if k:
                    mono[:, j] *= powers[:, i, k]
        vals = mono @ coef
        total += rule.weights[start:start + chunk] @ np.abs(vals) ** 2
    return np.sqrt(total)


def target_norms(polys: list[Polynomial], domain: Domain) -> np.ndarray:
    """Norms on the target without the cover Gram.

    Reinhardt domains use the orthogonality of monomials; G_d uses the
    pushforward rule of the lowest level that is exact for the integrand.
    """
    if domain.is_reinhardt:
        return np.array([math.sqrt(sum(abs(c) ** 2 * monomial_norm(domain, a) ** 2
                                       for a, c in p.terms.items())) for p in polys])
    level = max(p.degree for p in polys) + domain.dim - 1
    return _node_norms(polys, domain, level)


def group_for_map(f: ProperMap) -> groups.ReflectionGroup:
    """The pseudoreflection group whose invariant map is f, for catalog maps that have one."""
    def power_order(b):
        return b.degree if b.is_polynomial and b.unit == 1 and len(b.zeros) == 1 else None
    if isinstance(f, Symmetrization):
        return groups.symmetric_group(f.d)
    if isinstance(f, BlaschkeMap) and power_order(f.blaschke):
        return groups.cyclic_group(f.blaschke.degree)
    if isinstance(f, PolydiscProduct) and all(power_order(b) for b in f.factors):
        return groups.product_group([b.degree for b in f.factors])
    raise CheckNotApplicable(f"{f.name} is not the invariant map of a catalog group")


def symmetrized_domain(f: ProperMap) -> Domain:
    for domain in (f.target, f.source):
        if domain.kind == SYMMETRIZED:
            return domain
    raise CheckNotApplicable(f"{f.name} does not involve a symmetrized polydisc")


# checks

def check_isometry(f: ProperMap, ctx: CheckContext) -> CheckOutcome:
    """| ||Gamma_f psi|| / ||psi|| - 1 | for random polynomials on the target."""
    d = f.target.dim
    degree = min(ctx.cap, ISOMETRY_DEGREE)
    polys = [algebra.random_polynomial(d, degree, ctx.rng) for _ in range(ISOMETRY_SAMPLES)]
    expected = target_norms(polys, f.target)
    rows = []
    for k, (p, n2) in enumerate(zip(polys, expected)):
        n1 = spaces.norm(spaces.lift_gamma(f, p))
        rows.append({"sample": k, "norm_source": n1, "norm_target": n2,
                     "residual": abs(n1 / n2 - 1)})
    return CheckOutcome(max(r["residual"] for r in rows), rows)


def check_reducing(f: ProperMap, ctx: CheckContext, cap: int = 12) -> CheckOutcome:
    """Commutator residual of P with M_f and agreement of the fiber and Gram projections."""
    pts = random_regular_points(f, 20, ctx.rng, radius=0.8)
    rows = []
    for k in range(3):
        p = algebra.random_polynomial(f.dim, 3, ctx.rng)
        for with_jac in (False, True):
            phi = spaces.lift_source(f, p, with_jacobian=with_jac)
            comm = operators.commutator_residual(f, [operators.source_callable(f, phi)], pts)
            gap = operators.fiber_projection_error(f, phi, pts, cap)
            rows.append({"sample": k, "with_jacobian": with_jac, "commutator": comm,
                         "oracle_gap": gap, "residual": max(comm, gap)})
    return CheckOutcome(max(r["residual"] for r in rows), rows)


def check_restriction_shift(f: ProperMap, ctx: CheckContext) -> CheckOutcome:
    """M_f restricted to ran Gamma_f against the Bergman operator of the target."""
    mats = operators.restriction_matrix(f, ctx.cap)
    if f.target.is_reinhardt:
        refs = [operators.shift_matrix(f.target, i, ctx.cap, ctx.cap + 1)
                for i in range(f.target.dim)]
    else:
        refs = operators.target_mult_matrices(f.target, ctx.cap)
    rows = []
    artifacts = {}
    for i, (m, ref) in enumerate(zip(mats, refs)):
        err = float(np.max(np.abs(m.entries - ref.entries)))
        rows.append({"component": i + 1, "shape": "x".join(map(str, m.shape)), "residual": err})
        artifacts[f"restriction_f{i + 1}.csv"] = m.to_csv
    return CheckOutcome(max(r["residual"] for r in rows), rows, artifacts)


def check_kernel_pullback(f: ProperMap, ctx: CheckContext, cap: int = KERNEL_CAP,
                          pairs: int = 200) -> CheckOutcome:
    """Pulled-back closed-form kernel against the basis sum over Gamma_f onb(target, cap)."""
    z = sample_ball(f.source, pairs, ctx.rng, KERNEL_RADIUS)
    w = sample_ball(f.source, pairs, ctx.rng, KERNEL_RADIUS)
    a = spaces.PulledBack(f).pairs(z, w)
    b = spaces.gamma_kernel(f, cap).pairs(z, w)
    err = np.abs(a - b)
    rows = [{"pair": k, "pulled_back": _cstr(x), "basis_sum": _cstr(y), "residual": float(e)}
            for k, (x, y, e) in enumerate(zip(a, b, err))]
    return CheckOutcome(float(err.max()), rows)


def check_kernel_symdisc(f: ProperMap, ctx: CheckContext, samples: int = 10) -> CheckOutcome:
    """Determinant kernel on G_d: reproduction of random polynomials and permutation invariance."""
    domain = symmetrized_domain(f)
    d = domain.dim
    level = min(ctx.level, spaces.pin_level(d))
    model = spaces.ClosedForm(domain)
    rows = [{"item": "constant", "value": _cstr(model.constant), "residual": 0.0}]
    for k in range(samples):
        p = algebra.random_polynomial(d, 4, ctx.rng)
        w = sample(domain, 1, ctx.rng, radius=0.5 if d <= 2 else 0.3)[0]
        rows.append({"item": f"reproduce:{k}", "value": _cstr(p(w)),
                     "residual": spaces.reproduce_check(model, p, w, level)})
    zc = sample(polydisc(d), 50, ctx.rng, radius=0.9)
    wc = sample(polydisc(d), 50, ctx.rng, radius=0.9)
    base = model.eval_lifted(zc, wc)
    worst = 0.0
    for perm in itertools.permutations(range(d)):
        moved = model.eval_lifted(zc[:, list(perm)], wc)
        worst = max(worst, float(np.max(np.abs(moved - base) / np.abs(base))))
    rows.append({"item": "permutation", "value": "", "residual": worst})
    return CheckOutcome(max(r["residual"] for r in rows), rows)


def check_deck(f: ProperMap, ctx: CheckContext, tol: float = 1e-8) -> CheckOutcome:
    """Deck group soundness, group axioms, Galois vs transitivity, and the deck average."""
    seed = int(ctx.rng.integers(2 ** 31))
    report = deck.deck_group(f, tol, seed)
    structure_ok = report.closed and report.transitive == report.is_galois
    rows = [{"item": "order", "value": report.order, "residual": 0.0},
            {"item": "fiber_size", "value": report.fiber_size, "residual": 0.0},
            {"item": "soundness", "value": "", "residual": report.soundness_residual},
            {"item": "structure", "value": f"closed={report.closed} transitive="
             f"{report.transitive} galois={report.is_galois}",
             "residual": 0.0 if structure_ok else STRUCTURAL_FAILURE}]
    if report.is_galois:
        z = random_regular_points(f, 20, ctx.rng, radius=0.8)
        p = algebra.random_polynomial(f.dim, 4, ctx.rng)
        gap = float(np.max(np.abs(operators.project_fiber(f, p, z)
                                  - deck.deck_average(report, p, z))))
        rows.append({"item": "deck_average", "value": "", "residual": gap})
    for k, e in enumerate(report.elements):
        rows.append({"item": f"h{k}", "value": _json(e.descriptor()), "residual": 0.0})
    return CheckOutcome(max(r["residual"] for r in rows), rows)


def check_equiv(f: ProperMap, ctx: CheckContext) -> CheckOutcome:
    """Largest principal angle between ran Gamma_theta and ran P_mu."""
    G = group_for_map(f)
    rep = groups.verify_equiv(G, cap=ctx.cap)
    angle = rep.principal_angle if rep.dim_s1 == rep.dim_s2 else STRUCTURAL_FAILURE
    rows = [{"group": rep.group, "cap": rep.cap, "degree": rep.degree, "dim_s1": rep.dim_s1,
             "dim_s2": rep.dim_s2, "residual": angle}]
    return CheckOutcome(angle, rows)


def check_onb_gram(f: ProperMap, ctx: CheckContext) -> CheckOutcome:
    """onb(target) and its image under Gamma_f are orthonormal."""
    basis = spaces.onb(f.target, ctx.cap)
    image = spaces.gram_lifted([spaces.lift_gamma(f, b) for b in basis.elements])
    d = f.target.dim
    level = ctx.cap + d - 1 if f.target.kind == SYMMETRIZED else ctx.cap
    target = spaces.gram_nodes(basis.elements, f.target, max(level, 1))
    eye = np.eye(len(basis))
    rows = [{"gram": "target_nodes", "size": len(basis),
             "residual": float(np.max(np.abs(target - eye)))},
            {"gram": "image_lifted", "size": len(basis),
             "residual": float(np.max(np.abs(image - eye)))}]
    return CheckOutcome(max(r["residual"] for r in rows), rows)


def _cstr(v) -> str:
    v = complex(np.asarray(v).reshape(-1)[0]) if np.ndim(v) else complex(v)
    return f"{v.real:.17g}{v.imag:+.17g}j"


def _json(obj) -> str:
    return json.dumps(obj, sort_keys=True)


CHECKS: dict[str, Callable[[ProperMap, CheckContext], CheckOutcome]] = {
    "isometry": check_isometry,
    "reducing": check_reducing,
    "restriction-shift": check_restriction_shift,
    "kernel-pullback": check_kernel_pullback,
    "kernel-symdisc": check_kernel_symdisc,
    "deck": check_deck,
    "equiv": check_equiv,
    "onb-gram": check_onb_gram,
}


def get_check(name: str):
    try:
        return CHECKS[name]
    except KeyError:
        raise UnknownCheck(f"unknown check {name!r}; choose from {sorted(CHECKS)}") from None
