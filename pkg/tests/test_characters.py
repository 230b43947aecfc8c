import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import char_kernel, complex_char_sum, mobius_reference, phi_reference
from srcg.characters import (
    char_on_set,
    char_orbit,
    char_orbit_general,
    char_orbit_oracle,
    char_table,
    character_matrix,
    euler_phi,
    mobius,
    omega_identity_check,
    omega_set,
)
from srcg.group import OrbitSubset, delta_of, delta_tree, nabla_dual
from srcg.homogeneous import build_homogeneous

ROUTE_CONTEXTS = [(2, 2), (3, 2), (2, 3), (5, 1)]


def test_mobius_and_phi_values():
    assert mobius(1) == 1
    for p in (2, 3, 5, 7):
        assert mobius(p) == -1
        assert mobius(p * p) == 0
    assert euler_phi(9) == 6
    assert euler_phi(1) == 1
    for k in range(1, 80):
        assert mobius(k) == mobius_reference(k)
        assert euler_phi(k) == phi_reference(k)
    with pytest.raises(ValueError):
        mobius(0)
    with pytest.raises(ValueError):
        euler_phi(0)


@pytest.mark.parametrize("p,n", ROUTE_CONTEXTS)
def test_three_routes_agree(p, n):
    tree = delta_tree(p, n)
    for k in range(len(tree)):
        h = nabla_dual(tree, k)
        for f in range(len(tree)):
            v = char_orbit(tree, k, f)
            assert char_orbit_general(tree, h, f) == v
            assert char_orbit_oracle(tree, k, f) == v


@pytest.mark.parametrize("p,n", [(2, 2), (3, 2), (5, 1)])
def test_formula_matches_complex_characters(p, n):
    # every character (u, v), grouped by kernel, sums to the class value on each orbit
    tree = delta_tree(p, n)
    ctx = tree.ctx
    orbits = [tree.orbit_generators(f) for f in range(len(tree))]
    for u in range(ctx.modulus):
        for v in range(ctx.modulus):
            k = delta_of(tree, char_kernel(ctx, u, v))
            for f, orbit in enumerate(orbits):
                assert complex_char_sum(ctx, u, v, orbit) == char_orbit(tree, k, f)


def test_character_examples():
    t32 = delta_tree(3, 2)
    k = t32.levels[2][0]
    assert char_orbit(t32, k, k) == 6
    f = next(x for x in t32.levels[2] if t32.length(t32.father(x)) == 1 and t32.father(x) == t32.father(k) and x != k)
    assert t32.length(t32.father(f)) == 1
    assert char_orbit(t32, k, f) == -3
    for f in range(len(t32)):
        assert char_orbit(t32, t32.root, f) == t32.orbit_size(f)
    t22 = delta_tree(2, 2)
    k, f = t22.node_of((2, 0)), t22.node_of((1, 1))
    assert char_orbit_oracle(t22, k, f) == -2
    for x in range(len(t22)):
        assert char_orbit_oracle(t22, x, t22.root) == 1


def test_general_formula_examples():
    tree = delta_tree(3, 2)
    order_p = tree.levels[1][0]
    inside = next(k for k in range(1, len(tree)) if tree.subgroup_elements(order_p) <= nabla_dual(tree, k).elements())
    outside = next(k for k in range(1, len(tree)) if not tree.subgroup_elements(order_p) <= nabla_dual(tree, k).elements())
    assert char_orbit_general(tree, nabla_dual(tree, inside), order_p) == 2
    assert char_orbit_general(tree, nabla_dual(tree, outside), order_p) == -1
    # order p^2 with trivial kernel intersection
    k = tree.levels[2][0]
    f = next(x for x in tree.levels[2] if tree.father(x) != tree.father(k))
    assert not tree.subgroup_elements(tree.father(f)) <= nabla_dual(tree, k).elements()
    assert char_orbit_general(tree, nabla_dual(tree, k), f) == 0


@pytest.mark.parametrize("p,n", ROUTE_CONTEXTS + [(3, 3)])
def test_row_sums(p, n):
    m = character_matrix(delta_tree(p, n))
    sums = m.sum(axis=1)
    assert sums[0] == p ** (2 * n)
    assert (sums[1:] == 0).all()


def test_char_on_set_examples():
    tree = delta_tree(3, 1)
    assert char_on_set(tree, 1, OrbitSubset()) == 0
    s = OrbitSubset.of(tree.levels[1][:2])
    for k in tree.levels[1]:
        assert char_on_set(tree, k, s) == (1 if k in s else -2)
    for p, n in ROUTE_CONTEXTS:
        t = delta_tree(p, n)
        for k in range(1, len(t)):
            assert char_on_set(t, k, t.full_set) == -1


def test_char_table_examples():
    tree = delta_tree(2, 2)
    vec = char_table(tree, OrbitSubset())
    assert vec.principal == 0 and not vec.values.any()
    vec = char_table(tree, build_homogeneous(tree, (2, 0)))
    assert vec.principal == 6
    assert set(vec.nonprincipal.tolist()) <= {-2, 2}
    t31 = delta_tree(3, 1)
    vec = char_table(t31, build_homogeneous(t31, (2,)))
    assert vec.principal == 4
    assert set(vec.nonprincipal.tolist()) <= {1, -2}


@pytest.mark.parametrize("p,n", ROUTE_CONTEXTS)
def test_principal_value_is_support_size(p, n):
    tree = delta_tree(p, n)
    rng = random.Random(p * 10 + n)
    for _ in range(20):
        s = OrbitSubset.of(f for f in range(1, len(tree)) if rng.random() < 0.5)
        assert char_table(tree, s).principal == len(tree.support(s))
        assert char_table(tree, s)[0] == len(tree.support(s))


def test_matrix_is_read_only():
    m = character_matrix(delta_tree(2, 2))
    with pytest.raises(ValueError):
        m[0, 0] = 3


@pytest.mark.parametrize("p,n", [(3, 2), (2, 3), (2, 2), (5, 2)])
def test_omega_identity(p, n):
    tree = delta_tree(p, n)
    rng = random.Random(7)
    subsets = [OrbitSubset(), tree.level_set(n), tree.full_set]
    subsets += [OrbitSubset.of(f for f in range(1, len(tree)) if rng.random() < 0.4) for _ in range(40)]
    for s in subsets:
        for k in tree.levels[1]:
            assert omega_identity_check(tree, s, k)


def test_omega_set_shape_and_guard():
    tree = delta_tree(3, 2)
    k = tree.levels[1][0]
    assert len(omega_set(tree, k)) == len(tree.levels[2]) - 3
    with pytest.raises(ValueError):
        omega_identity_check(tree, OrbitSubset(), tree.levels[2][0])


@st.composite
def level_split(draw, p, n):
    """Two subsets where each level is used by at most one of them."""
    tree = delta_tree(p, n)
    x, y = set(), set()
    for level in range(1, n + 1):
        side = draw(st.sampled_from([x, y]))
        for f in tree.levels[level]:
            if draw(st.booleans()):
                side.add(f)
    return OrbitSubset.of(x), OrbitSubset.of(y)


@pytest.mark.parametrize("p,n", [(3, 2), (2, 3), (5, 1)])
def test_difference_bound_on_top_level(p, n):
    tree = delta_tree(p, n)
    top = tree.levels[n]
    bound = 2 * p**n - 1

    @settings(max_examples=60, deadline=None)
    @given(level_split(p, n))
    def check(pair):
        x, y = pair
        diffs = [char_on_set(tree, k, x) - char_on_set(tree, k, y) for k in top]
        assert max(diffs) - min(diffs) <= bound

    check()
