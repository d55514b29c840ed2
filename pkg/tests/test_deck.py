import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bergman_lab import deck, domains, maps, operators

D2 = domains.polydisc(2)


def test_fit_mobius_recovers_automorphism():
    rng = np.random.default_rng(0)
    for _ in range(10):
        a = 0.8 * np.sqrt(rng.random()) * np.exp(2j * np.pi * rng.random())
        h = deck.Mobius(np.exp(2j * np.pi * rng.random()), a)
        src = domains.sample(domains.unit_disc(), 3, rng, radius=0.9)[:, 0]
        fit = deck.fit_mobius(src, h(src))
        assert fit is not None
        assert abs(fit.lam - h.lam) < 1e-10 and abs(fit.a - h.a) < 1e-10


def test_fit_mobius_rejects_non_automorphism():
    src = np.array([0.1, 0.2j, -0.3])
    assert deck.fit_mobius(src, 2 * src) is None


def test_mobius_group_operations():
    h = deck.Mobius(np.exp(0.7j), 0.3 - 0.4j)
    g = deck.Mobius(np.exp(-1.1j), -0.2 + 0.1j)
    x = np.array([0.1 + 0.2j, -0.5j, 0.6])
    assert np.allclose(h.compose(g)(x), h(g(x)))
    assert np.allclose(h.compose(h.inverse())(x), x)
    assert h.compose(h.inverse()).is_identity


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_power_maps_have_rotation_decks(n):
    rep = deck.deck_group(maps.from_name(f"power:{n}"))
    assert rep.order == n and rep.is_galois and rep.fiber_size == n
    lams = np.array([e.mobius.lam for e in rep.elements])
    for k in range(n):
        assert np.min(np.abs(lams - np.exp(2j * np.pi * k / n))) < 1e-10
    assert all(abs(e.mobius.a) < 1e-10 for e in rep.elements)


@pytest.mark.parametrize("name", ["b1", "b2"])
def test_rudin_type_blaschke_products_have_trivial_deck(name):
    rep = deck.deck_group(maps.from_name(name))
    assert rep.order == 1 and rep.elements[0].mobius.is_identity
    assert not rep.is_galois


def brute_force_square_square_decks():
    """All 8 candidates (perm, +-, +-) for (z^2, z^2), checked pointwise by hand."""
    rng = np.random.default_rng(1)
    z = domains.sample(D2, 100, rng, radius=0.95)
    f = z ** 2
    count = 0
    for perm in itertools.permutations(range(2)):
        for signs in itertools.product((1, -1), repeat=2):
            h = np.stack([signs[0] * z[:, perm[0]], signs[1] * z[:, perm[1]]], axis=1)
            if np.max(np.abs(h ** 2 - f)) < 1e-12:
                count += 1
    return count


def test_square_square_product_deck_order():
    expected = brute_force_square_square_decks()
    assert expected == 4  # frozen from the brute-force oracle: swaps fail pointwise
    rep = deck.deck_group(maps.from_name("prod:power:2/power:2"))
    assert rep.order == expected
    assert rep.is_galois
    assert rep.extra["rejected_candidates"] == 4


def test_mixed_power_product_deck():
    rep = deck.deck_group(maps.from_name("prod:power:2/power:3"))
    assert rep.order == 6 and rep.is_galois
    assert all(e.perm == (0, 1) for e in rep.elements)


def test_bhat_product_deck_trivial():
    rep = deck.deck_group(maps.from_name("prod"))
    assert rep.order == 1 and rep.fiber_size == 9


def test_symmetrized_decks():
    rep = deck.deck_group(maps.from_name("ez:b2:2"))
    assert rep.order == 1
    rep = deck.deck_group(maps.from_name("ez:power:2:2"))
    assert rep.order == 2 and rep.fiber_size == 4 and not rep.is_galois
    minus = [e for e in rep.elements if not e.mobius.is_identity][0]
    w = domains.sample(domains.symmetrized_polydisc(2), 10, np.random.default_rng(2), radius=0.9)
    assert np.allclose(minus(w), np.stack([-w[:, 0], w[:, 1]], axis=1), atol=1e-10)
    ident = maps.edigarian_zwonek(maps.Blaschke([0]), 2)
    rep = deck.deck_group(ident)
    assert rep.order == 1 and rep.is_galois


@pytest.mark.parametrize("name", ["b1", "b2", "power:4", "prod", "prod:power:2/power:3",
                                  "sym:2", "sym:3", "ez:b2:2", "ez:power:2:2"])
def test_report_invariants(name):
    f = maps.from_name(name)
    rep = deck.deck_group(f, seed=3)
    assert rep.soundness_residual < 1e-7
    assert rep.closed
    assert rep.transitive == rep.is_galois
    rng = np.random.default_rng(4)
    z = domains.sample(f.source, 50, rng, radius=0.9)
    for h in rep.elements:
        assert np.max(np.abs(f.evaluate(h(z)) - f.evaluate(z))) < 1e-8
    if rep.is_galois:
        pts = maps.random_regular_points(f, 20, rng, radius=0.8)
        p = lambda x: np.exp(np.atleast_2d(x) @ np.arange(1, f.dim + 1))  # noqa: E731
        gap = np.abs(operators.project_fiber(f, p, pts) - deck.deck_average(rep, p, pts))
        assert gap.max() < 1e-7


def test_report_json_fields():
    rep = deck.deck_group(maps.from_name("power:2"))
    data = json.loads(rep.to_json())
    assert {"elements", "is_galois", "fiber_size", "map"} <= set(data)
    assert "Deck(power:2): order 2" in rep.table()


def test_no_regular_value(monkeypatch):
    monkeypatch.setattr(deck, "_is_regular", lambda f, pre: False)
    with pytest.raises(deck.NoRegularValue):
        deck.deck_group(maps.from_name("power:3"))


unit = st.floats(0, 2 * np.pi, allow_nan=False)
inside = st.tuples(st.floats(0, 0.9), st.floats(0, 2 * np.pi)).map(
    lambda t: t[0] * np.exp(1j * t[1]))


@settings(max_examples=40, deadline=None)
@given(unit, inside, unit, inside)
def test_mobius_maps_form_a_group(t1, a1, t2, a2):
    h = deck.Mobius(np.exp(1j * t1), a1)
    g = deck.Mobius(np.exp(1j * t2), a2)
    x = domains.sample(domains.unit_disc(), 20, np.random.default_rng(0), radius=0.95)[:, 0]
    hg = h.compose(g)
    assert abs(abs(hg.lam) - 1) < 1e-12 and abs(hg.a) < 1
    assert np.max(np.abs(hg(x) - h(g(x)))) < 1e-10
    assert np.max(np.abs(h.inverse()(h(x)) - x)) < 1e-10
    assert np.all(np.abs(h(x)) < 1)
    eps = 1e-7
    numeric = (h(x + eps) - h(x - eps)) / (2 * eps)
    assert np.max(np.abs(numeric - h.derivative(x))) < 1e-6
