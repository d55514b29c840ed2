import math

import numpy as np
import pytest

from bergman_lab import algebra, domains
from bergman_lab.algebra import DimensionMismatch
from bergman_lab.domains import NotReinhardt

D = domains.unit_disc()
D2 = domains.polydisc(2)
G2 = domains.symmetrized_polydisc(2)
G3 = domains.symmetrized_polydisc(3)


def independent_disc_rule(n_r=12, n_t=25):
    """Gauss-Legendre in r (with Jacobian r) times uniform angles, written out directly."""
    x, w = np.polynomial.legendre.leggauss(n_r)
    r = (x + 1) / 2
    wr = w / 2 * 2 * r  # (1/pi) r dr dtheta, angle part 2 pi / n_t
    t = 2 * np.pi * np.arange(n_t) / n_t
    nodes = (r[:, None] * np.exp(1j * t)[None, :]).ravel()
    weights = (wr[:, None] * np.full(n_t, 1.0 / n_t)[None, :]).ravel()
    return nodes, weights


def test_contains_examples():
    assert domains.contains(D, [0.99])
    assert domains.contains(G2, [0, 0])
    assert not domains.contains(G2, [2, 1])
    assert not domains.contains(D2, [0.5, 1.0])
    with pytest.raises(DimensionMismatch):
        domains.contains(D2, [0.1, 0.1, 0.1])


def test_domain_flags():
    assert D.dim == 1 and D.is_reinhardt
    assert D2.is_reinhardt and not G2.is_reinhardt
    assert domains.from_name("G_3") == G3
    assert domains.from_name("polydisc:2") == D2
    assert domains.from_name("D") == D


def test_disc_integrals():
    rule = domains.quadrature(D, 4)
    assert abs(rule.integrate(lambda z: np.ones(len(z))) - 1) < 1e-14
    assert abs(rule.integrate(lambda z: np.abs(z[:, 0]) ** 2) - 0.5) < 1e-14


def test_polydisc_moments():
    level = 6
    rule = domains.quadrature(D2, level)
    for a in algebra.monomials_up_to(2, level // 2):
        for b in algebra.monomials_up_to(2, level // 2):
            val = rule.integrate(lambda z: z[:, 0] ** a[0] * z[:, 1] ** a[1]
                                 * np.conj(z[:, 0] ** b[0] * z[:, 1] ** b[1]))
            expected = (1 / ((a[0] + 1) * (a[1] + 1))) if a == b else 0.0
            assert abs(val - expected) < 1e-12


def test_rule_nodes_inside_and_weights_positive():
    for domain in (D, D2, G2):
        rule = domains.quadrature(domain, 5)
        assert np.all(rule.weights > 0)
        assert np.all(domains.contains(domain, rule.nodes))


def test_symmetrized_volume_from_independent_oracle():
    # (1/2!) * integral over D^2 of |z1 - z2|^2, by a hand-built tensor rule
    nodes, weights = independent_disc_rule()
    diff = np.abs(nodes[:, None] - nodes[None, :]) ** 2
    oracle = 0.5 * float(weights @ diff @ weights)
    assert abs(oracle - 0.5) < 1e-13  # frozen value of the oracle
    assert abs(domains.quadrature(G2, 6).weights.sum() - oracle) < 1e-13
    assert abs(domains.volume(G2) - oracle) < 1e-15
    assert abs(domains.quadrature(G3, 4).weights.sum() - 1 / 6) < 1e-13


def test_quadrature_levels_agree():
    for domain in (D, D2, G2):
        L = 6
        a, b = domains.quadrature(domain, L), domains.quadrature(domain, L + 2)
        for alpha in algebra.monomials_up_to(domain.dim, L // 2):
            p = algebra.Polynomial.monomial(domain.dim, alpha)
            fa = a.integrate(lambda z: np.abs(p(z)) ** 2)
            fb = b.integrate(lambda z: np.abs(p(z)) ** 2)
            assert abs(fa - fb) < 1e-10


def test_pushforward_matches_direct_cover_integral():
    rng = np.random.default_rng(0)
    cover = domains.quadrature(D2, 10)
    push = domains.quadrature(G2, 10)
    jac = domains.vandermonde_values(cover.nodes)
    for _ in range(10):
        g = algebra.random_polynomial(2, 4, rng)
        direct = np.sum(cover.weights * np.abs(jac) ** 2
                        * np.abs(g(domains.symmetrize_points(cover.nodes))) ** 2) / 2
        assert abs(push.integrate(lambda w: np.abs(g(w)) ** 2) - direct) < 1e-10


def test_symmetrized_membership_agrees_with_roots():
    rng = np.random.default_rng(1)
    inside = domains.sample(D2, 100, rng, radius=0.999)
    assert np.all(domains.contains(G2, domains.symmetrize_points(inside)))
    z = rng.standard_normal((100, 3)) + 1j * rng.standard_normal((100, 3))
    z = z[np.max(np.abs(z), axis=1) > 1]
    expected = np.max(np.abs(z), axis=1) < 1
    got = domains.contains(G3, domains.symmetrize_points(z))
    assert np.array_equal(got, expected)


def test_roots_from_symmetric_roundtrip():
    rng = np.random.default_rng(2)
    for d in (2, 3):
        z = domains.sample(domains.polydisc(d), 20, rng, radius=0.9)
        roots = domains.roots_from_symmetric(domains.symmetrize_points(z))
        assert np.allclose(domains.symmetrize_points(roots), domains.symmetrize_points(z),
                           atol=1e-12)


def test_monomial_norm():
    assert domains.monomial_norm(D, (0,)) == 1
    for n in range(6):
        assert abs(domains.monomial_norm(D, (n,)) - 1 / math.sqrt(n + 1)) < 1e-15
    assert abs(domains.monomial_norm(D2, (1, 2)) - 1 / math.sqrt(6)) < 1e-15
    rule = domains.quadrature(D2, 6)
    quad = math.sqrt(rule.integrate(lambda z: np.abs(z[:, 0] * z[:, 1] ** 2) ** 2).real)
    assert abs(quad - 1 / math.sqrt(6)) < 1e-12
    with pytest.raises(NotReinhardt):
        domains.monomial_norm(G2, (1, 0))


def test_rule_csv(tmp_path):
    rule = domains.quadrature(D, 2)
    path = tmp_path / "rule.csv"
    rule.to_csv(path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "re_z1,im_z1,weight"
    assert len(lines) == len(rule) + 1


def test_sample_ball_radius():
    rng = np.random.default_rng(3)
    z = domains.sample_ball(domains.polydisc(3), 500, rng, 0.7)
    assert np.all(np.linalg.norm(z, axis=1) <= 0.7 + 1e-15)
    w = domains.sample_ball(G2, 50, rng, 0.7)
    assert np.all(domains.contains(G2, w))
