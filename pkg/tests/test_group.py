import pytest

from _oracles import cyclic_span
from srcg.group import (
    NotPrime,
    OrbitSubset,
    QuotientUndefined,
    UnsupportedSize,
    cocyclic_contains,
    delta_of,
    delta_tree,
    divide_by_p,
    intersect_cyclic,
    make_context,
    nabla_dual,
    orbit_generators,
    parse_subset,
    phi_image,
)

CONTEXTS = [(2, 1), (3, 1), (5, 1), (2, 2), (3, 2), (2, 3), (5, 2), (3, 3), (2, 4)]
SMALL = [(2, 2), (3, 2), (2, 3)]


def test_context_arithmetic():
    c = make_context(2, 2)
    assert (c.modulus, c.order) == (4, 16)
    c = make_context(3, 2)
    assert (c.modulus, c.order) == (9, 81)
    assert c.add((8, 1), (2, 8)) == (1, 0)
    assert c.neg((0, 3)) == (0, 6)
    assert c.element(c.index((4, 7))) == (4, 7)


@pytest.mark.parametrize("p,n", [(4, 1), (1, 3), (9, 2), (0, 1)])
def test_context_rejects_non_primes(p, n):
    with pytest.raises(NotPrime):
        make_context(p, n)


def test_context_rejects_bad_exponent_and_overflow():
    with pytest.raises(ValueError):
        make_context(3, 0)
    with pytest.raises(UnsupportedSize):
        make_context(2, 16)
    make_context(2, 15)


@pytest.mark.parametrize("p,n", CONTEXTS)
def test_node_counts_per_level(p, n):
    tree = delta_tree(p, n)
    assert len(tree.levels[0]) == 1
    for k in range(1, n + 1):
        assert len(tree.levels[k]) == p**k + p ** (k - 1)
    assert len(tree) == 1 + sum(p**k + p ** (k - 1) for k in range(1, n + 1))


def test_small_node_counts():
    assert len(delta_tree(2, 2)) == 10
    assert len(delta_tree(3, 1)) == 5
    assert len(delta_tree(3, 2)) == 17


@pytest.mark.parametrize("p,n", CONTEXTS)
def test_tree_shape(p, n):
    tree = delta_tree(p, n)
    assert len(tree.sons(tree.root)) == p + 1
    for node in tree.nodes:
        if node.id == tree.root:
            assert node.length == 0 and node.generator == (0, 0)
            continue
        if node.length < n:
            assert len(node.sons) == p
        else:
            assert node.sons == ()
        assert tree.length(node.father) == node.length - 1
        assert node.id in tree.sons(node.father)
        # father is the canonical node of p * generator
        assert tree.node_of(tree.ctx.scale(p, node.generator)) == node.father


@pytest.mark.parametrize("p,n", CONTEXTS)
def test_normal_form_generators(p, n):
    tree = delta_tree(p, n)
    for node in tree.nodes[1:]:
        m, t = node.m, node.param
        assert node.length == n - m
        if node.kind == "A":
            assert 0 <= t < p ** (n - m)
            assert node.generator == (p**m % p**n, t * p**m % p**n)
        else:
            assert 0 <= t < p ** (n - m - 1)
            assert node.generator == (t * p ** (m + 1) % p**n, p**m % p**n)


def test_node_ordering_is_level_then_kind_then_parameter():
    tree = delta_tree(3, 2)
    for level in tree.levels[1:]:
        keys = [(tree.nodes[f].kind, tree.nodes[f].param) for f in level]
        assert keys == sorted(keys)
        assert list(level) == list(range(level[0], level[0] + len(level)))


@pytest.mark.parametrize("p,n", CONTEXTS)
def test_orbits_partition_the_group(p, n):
    tree = delta_tree(p, n)
    seen = set()
    for f in range(len(tree)):
        orbit = orbit_generators(tree, f)
        assert not orbit & seen
        seen |= orbit
        expected = 1 if f == tree.root else p ** (tree.length(f) - 1) * (p - 1)
        assert len(orbit) == expected == tree.orbit_size(f)
        assert {tree.ctx.neg(g) for g in orbit} == orbit
        assert all(tree.node_of(g) == f for g in orbit)
    assert len(seen) == tree.ctx.order


def test_orbit_generator_examples():
    t22 = delta_tree(2, 2)
    f = t22.node_of((1, 2))
    assert orbit_generators(t22, f) == {(1, 2), (3, 2)}
    assert orbit_generators(t22, t22.root) == {(0, 0)}
    t31 = delta_tree(3, 1)
    assert orbit_generators(t31, t31.node_of((1, 1))) == {(1, 1), (2, 2)}


@pytest.mark.parametrize("p,n", SMALL)
def test_intersection_matches_element_sets(p, n):
    tree = delta_tree(p, n)
    for f in range(len(tree)):
        for k in range(len(tree)):
            meet = tree.subgroup_elements(f) & tree.subgroup_elements(k)
            assert tree.subgroup_elements(intersect_cyclic(tree, f, k)) == meet


def test_intersection_examples():
    tree = delta_tree(2, 2)
    a, b = tree.node_of((1, 0)), tree.node_of((1, 2))
    assert intersect_cyclic(tree, a, b) == tree.node_of((2, 0))
    assert intersect_cyclic(tree, a, a) == a
    assert intersect_cyclic(tree, a, tree.root) == tree.root


def test_subgroup_elements_match_cyclic_span():
    tree = delta_tree(3, 2)
    for node in tree.nodes:
        assert tree.subgroup_elements(node.id) == cyclic_span(tree.ctx, node.generator)


@pytest.mark.parametrize("p,n", SMALL + [(5, 1)])
def test_nabla_dual_structure(p, n):
    tree = delta_tree(p, n)
    ctx = tree.ctx
    for f in range(len(tree)):
        h = nabla_dual(tree, f)
        elements = h.elements()
        assert len(elements) == h.size == p ** (2 * n - tree.length(f))
        assert elements == {g for g in ctx.elements() if h.contains(g)}
        assert delta_of(tree, elements) == f
        if tree.length(f) == n:
            assert elements == tree.subgroup_elements(f)


@pytest.mark.parametrize("p,n", SMALL)
def test_duality_is_antitone(p, n):
    tree = delta_tree(p, n)
    duals = [nabla_dual(tree, f).elements() for f in range(len(tree))]
    for a in range(len(tree)):
        for b in range(len(tree)):
            assert tree.is_ancestor(a, b) == (duals[b] <= duals[a])


def test_nabla_dual_examples():
    tree = delta_tree(2, 2)
    h = nabla_dual(tree, tree.node_of((2, 0)))
    assert h.generating_pair == ((1, 0), (0, 2))
    assert {tree.ctx.scale(2, g) for g in h.elements()} == tree.subgroup_elements(tree.node_of((2, 0)))
    g = nabla_dual(tree, tree.root)
    assert g.elements() == frozenset(tree.ctx.elements())


@pytest.mark.parametrize("p,n", SMALL)
def test_length_criterion_matches_containment(p, n):
    tree = delta_tree(p, n)
    for k in range(len(tree)):
        dual = nabla_dual(tree, k).elements()
        for f in range(len(tree)):
            assert cocyclic_contains(tree, k, f) == (tree.subgroup_elements(f) <= dual)


def test_containment_examples():
    tree = delta_tree(2, 2)
    k, f = tree.node_of((2, 0)), tree.node_of((1, 1))
    assert not cocyclic_contains(tree, k, f)
    assert (1, 1) not in nabla_dual(tree, k).elements()
    for x in range(len(tree)):
        assert cocyclic_contains(tree, x, tree.root)
        assert cocyclic_contains(tree, x, x)


def test_phi_image_examples():
    tree = delta_tree(2, 2)
    quotient = tree.quotient_tree
    assert phi_image(tree, tree.node_of((1, 1))) == quotient.node_of((1, 1))
    assert phi_image(tree, tree.root) == quotient.root
    t32 = delta_tree(3, 2)
    assert phi_image(t32, t32.node_of((3, 0))) == t32.quotient_tree.root
    with pytest.raises(QuotientUndefined):
        phi_image(delta_tree(3, 1), 1)


@pytest.mark.parametrize("p,n", SMALL + [(3, 3)])
def test_phi_lowers_length_by_one(p, n):
    tree = delta_tree(p, n)
    q = tree.quotient_tree
    for f in range(len(tree)):
        assert q.length(phi_image(tree, f)) == max(tree.length(f) - 1, 0)


def test_divide_by_p_rejects_nodes_outside_pg():
    tree = delta_tree(3, 2)
    inner = delta_tree(3, 1)
    f = tree.node_of((3, 6))
    assert inner.nodes[divide_by_p(tree, f, inner)].generator == (1, 2)
    with pytest.raises(AssertionError):
        divide_by_p(tree, tree.node_of((1, 0)), inner)


def test_orbit_subset_operations():
    a, b = OrbitSubset.of([1, 2, 3]), OrbitSubset.of([3, 4])
    assert list(a | b) == [1, 2, 3, 4]
    assert list(a & b) == [3]
    assert list(a - b) == [1, 2]
    assert list(a ^ b) == [1, 2, 4]
    assert 2 in a and 4 not in a and len(a) == 3
    assert OrbitSubset.of([3]).issubset(b)
    assert not OrbitSubset()
    with pytest.raises(ValueError):
        OrbitSubset.of([0, 1])


def test_parse_subset_skips_comments():
    tree = delta_tree(2, 2)
    lines = ["# a comment", "", "A:1,0", "B:0,1  # trailing", "  A:0,3 "]
    s = parse_subset(tree, lines)
    assert s.descriptors(tree) == ["A:1,0", "A:0,3", "B:0,1"]
    with pytest.raises(ValueError):
        parse_subset(tree, ["C:0,0"])


def test_subset_from_elements():
    tree = delta_tree(3, 1)
    f = tree.node_of((1, 1))
    assert tree.subset_from_elements({(1, 1), (2, 2)}) == OrbitSubset.of([f])
    with pytest.raises(ValueError):
        tree.subset_from_elements({(1, 1)})
    with pytest.raises(ValueError):
        tree.subset_from_elements({(0, 0)})


def test_trees_are_cached_and_read_only():
    tree = delta_tree(3, 2)
    assert delta_tree(3, 2) is tree
    with pytest.raises(ValueError):
        tree.element_nodes[0] = 5
