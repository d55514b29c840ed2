import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bergman_lab import algebra, domains, maps
from bergman_lab.algebra import Polynomial
from bergman_lab.maps import ZeroOutsideDisc


def test_blaschke_examples():
    b1 = maps.from_name("b1")
    assert b1.multiplicity == 6
    assert maps.blaschke([-0.5, 0, 0.75]).multiplicity == 3
    for n in range(1, 6):
        f = maps.blaschke([0], [n])
        assert f.multiplicity == n
        assert f.kind == "Power"
    x = 0.3 + 0.4j
    expected = x ** 4 * ((x - 0.5) / (1 - 0.5 * x)) ** 2
    assert abs(b1(x) - expected) < 1e-15
    with pytest.raises(ZeroOutsideDisc):
        maps.blaschke([1.2])


def test_blaschke_boundary_unimodular():
    theta = np.exp(2j * np.pi * np.arange(64) / 64)
    for name in ("b1", "b2", "power:3", "blaschke:0.3+0.1j;2;0.7"):
        b = maps.from_name(name).blaschke
        assert np.max(np.abs(np.abs(b(theta)) - 1)) < 1e-10


def test_polydisc_product():
    f = maps.from_name("prod:power:2/power:3")
    assert f.multiplicity == 6
    z = np.array([[0.3 + 0.1j, -0.2 + 0.5j]])
    assert np.allclose(f.evaluate(z), [[z[0, 0] ** 2, z[0, 1] ** 3]])
    assert np.allclose(f.jacobian_values(z), 2 * z[0, 0] * 3 * z[0, 1] ** 2)
    assert maps.from_name("prod").multiplicity == 9
    single = maps.polydisc_product([maps.Blaschke([0.5])])
    assert single.multiplicity == 1 and single.source.dim == 1


def test_symmetrization():
    s = maps.symmetrization(2)
    z1, z2 = Polynomial.variables(2)
    assert s.components[0].as_polynomial() == z1 + z2
    assert s.components[1].as_polynomial() == z1 * z2
    assert s.jacobian.as_polynomial() == z1 - z2
    assert maps.symmetrization(3).multiplicity == 6
    assert maps.symmetrization(1).multiplicity == 1


def test_edigarian_zwonek_square():
    f = maps.edigarian_zwonek(maps.Blaschke([0], [2]), 2)
    w1, w2 = Polynomial.variables(2)
    assert f.components[0] == algebra.RationalFunction(w1 ** 2 - 2 * w2)
    assert f.components[1] == algebra.RationalFunction(w2 ** 2)
    rng = np.random.default_rng(0)
    w = domains.sample(f.source, 20, rng, radius=0.9)
    expected = np.stack([w[:, 0] ** 2 - 2 * w[:, 1], w[:, 1] ** 2], axis=1)
    assert np.allclose(f.evaluate(w), expected, atol=1e-12)
    assert f.multiplicity == 4


def test_edigarian_zwonek_identity_and_bhat():
    ident = maps.edigarian_zwonek(maps.Blaschke([0]), 2)
    w = domains.sample(ident.source, 10, np.random.default_rng(1), radius=0.9)
    assert np.allclose(ident.evaluate(w), w, atol=1e-12)
    f = maps.from_name("ez:b2:2")
    assert f.multiplicity == 9
    assert maps.multiplicity_certify(f, 3, np.random.default_rng(2)) == 9


def test_fiber_examples():
    fib = maps.fiber(maps.from_name("power:3"), [1 / 8])
    omega = np.exp(2j * np.pi / 3)
    expected = np.array([0.5, 0.5 * omega, 0.5 * omega ** 2])
    got = fib.preimages[:, 0]
    assert all(np.min(np.abs(got - e)) < 1e-12 for e in expected)
    assert fib.regular
    sym = maps.fiber(maps.symmetrization(2), [0, -0.25])
    got = {tuple(np.round(p.real, 12)) for p in sym.preimages}
    assert got == {(0.5, -0.5), (-0.5, 0.5)}
    with pytest.raises(maps.TargetMiss):
        maps.fiber(maps.symmetrization(2), [2, 1])


@pytest.mark.parametrize("name", maps.CATALOG)
def test_maps_into_target_and_round_trip(name):
    f = maps.from_name(name)
    rng = np.random.default_rng(3)
    z = domains.sample(f.source, 200, rng, radius=0.95)
    assert np.all(domains.contains(f.target, f.evaluate(z)))
    z = z[:100]
    z = z[np.abs(f.jacobian_values(z)) > 1e-6]
    pre = f.preimages(f.evaluate(z))
    for k in range(len(z)):
        assert np.min(np.linalg.norm(pre[k] - z[k], axis=1)) < 1e-8
        assert np.max(np.abs(f.evaluate(pre[k]) - f.evaluate(z[k:k + 1]))) < 1e-9


@pytest.mark.parametrize("name", ["b1", "b2", "sym:2", "prod", "ez:power:2:2"])
def test_jacobian_values_match_symbolic(name):
    f = maps.from_name(name)
    z = domains.sample(f.source, 10, np.random.default_rng(4), radius=0.9)
    assert np.allclose(f.jacobian_values(z), f.jacobian(z), atol=1e-10)


def test_symmetrization_invariance_and_jacobian_sign():
    for d in (2, 3):
        s = maps.symmetrization(d)
        z = domains.sample(domains.polydisc(d), 50, np.random.default_rng(5))
        for perm in itertools.permutations(range(d)):
            zp = z[:, list(perm)]
            assert np.max(np.abs(s.evaluate(zp) - s.evaluate(z))) < 1e-12
            sign = algebra.perm_sign(perm)
            assert np.max(np.abs(s.jacobian_values(zp) - sign * s.jacobian_values(z))) < 1e-12


@pytest.mark.parametrize("name,expected", [("b1", 6), ("b2", 3), ("power:1", 1), ("sym:2", 2),
                                           ("sym:3", 6), ("prod", 9),
                                           ("prod:power:2/power:3", 6)])
def test_multiplicity_certify(name, expected):
    got = maps.multiplicity_certify(maps.from_name(name), 5, np.random.default_rng(6))
    assert isinstance(got, int) and got == expected


def test_aberth_recovers_known_roots():
    rng = np.random.default_rng(7)
    roots = rng.standard_normal((4, 5)) + 1j * rng.standard_normal((4, 5))
    coeffs = np.array([np.poly(r)[::-1] for r in roots])
    found = maps.aberth(coeffs)
    for r, fnd in zip(roots, found):
        assert all(np.min(np.abs(fnd - x)) < 1e-10 for x in r)


def test_catalog_listing_and_names():
    text = maps.list_catalog()
    for line in ("b1 multiplicity 6", "sym:3 multiplicity 6", "power:1 multiplicity 1"):
        assert line in text
    with pytest.raises(maps.UnknownMap):
        maps.from_name("nosuchmap")
    f = maps.from_name("blaschke:0.5;2;0")
    assert f.multiplicity == 2
    assert math.isinf(maps.from_name("power:2").blaschke.pole_radius)


zeros_strategy = st.lists(st.tuples(st.floats(0, 0.9), st.floats(0, 2 * np.pi)).map(
    lambda t: t[0] * np.exp(1j * t[1])), min_size=1, max_size=4)


@settings(max_examples=30, deadline=None)
@given(zeros_strategy, st.integers(0, 2 ** 32 - 1))
def test_blaschke_fibers_have_full_size(zeros, seed):
    b = maps.Blaschke(zeros)
    f = maps.blaschke(zeros)
    theta = np.exp(2j * np.pi * np.arange(32) / 32)
    assert np.max(np.abs(np.abs(b(theta)) - 1)) < 1e-9
    rng = np.random.default_rng(seed)
    w = domains.sample(domains.unit_disc(), 5, rng, radius=0.8)
    pre = f.preimages(w)
    assert pre.shape == (5, len(zeros), 1)
    assert np.all(np.abs(pre) < 1)
    assert np.max(np.abs(f.evaluate(pre.reshape(-1, 1)).reshape(5, -1) - w)) < 1e-8
