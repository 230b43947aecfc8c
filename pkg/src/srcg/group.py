"""Arithmetic in G = Z_{p^n} + Z_{p^n} and the tree of its cyclic subgroups.

Every cyclic subgroup is stored in one normal form:

    A(m, a) = <(p^m, a p^m)>          0 <= m < n, 0 <= a < p^(n-m)
    B(m, b) = <(b p^(m+1), p^m)>      0 <= m < n, 0 <= b < p^(n-m-1)

plus the trivial subgroup E.  The subgroup of length l = n - m has p^l
elements.  Nodes are numbered level by level, A before B inside a level,
each in ascending parameter order.  The father of a node H is pH.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

Element = Tuple[int, int]

# p^(2n) must stay below this so element indices fit in int32 adjacency oracles.
ORDER_LIMIT = 2**31


class NotPrime(ValueError):
    pass


class UnsupportedSize(ValueError):
    pass


class QuotientUndefined(ValueError):
    pass


def is_prime(k: int) -> bool:
    if k < 2:
        return False
    if k % 2 == 0:
        return k == 2
    d = 3
    while d * d <= k:
        if k % d == 0:
            return False
        d += 2
    return True


def valuation(x: int, p: int, cap: int) -> int:
    """p-adic valuation of x, with 0 mapped to ``cap``."""
    if x == 0:
        return cap
    v = 0
    while x % p == 0:
        x //= p
        v += 1
    return min(v, cap)


@dataclass(frozen=True)
class GroupContext:
    p: int
    n: int

    def __post_init__(self):
        if not isinstance(self.p, int) or not is_prime(self.p):
            raise NotPrime(f"{self.p} is not prime")
        if not isinstance(self.n, int) or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n}")
        if self.p ** (2 * self.n) >= ORDER_LIMIT:
            raise UnsupportedSize(
                f"|G| = {self.p}^{2 * self.n} exceeds the supported size 2^31"
            )

    @property
    def modulus(self) -> int:
        return self.p**self.n

    @property
    def order(self) -> int:
        return self.p ** (2 * self.n)

    def add(self, g: Element, h: Element) -> Element:
        q = self.modulus
        return ((g[0] + h[0]) % q, (g[1] + h[1]) % q)

    def neg(self, g: Element) -> Element:
        q = self.modulus
        return ((-g[0]) % q, (-g[1]) % q)

    def scale(self, k: int, g: Element) -> Element:
        q = self.modulus
        return ((k * g[0]) % q, (k * g[1]) % q)

    def index(self, g: Element) -> int:
        return g[0] * self.modulus + g[1]

    def element(self, i: int) -> Element:
        return divmod(i, self.modulus)

    def elements(self) -> Iterator[Element]:
        q = self.modulus
        for x in range(q):
            for y in range(q):
                yield (x, y)

    def length_of(self, g: Element) -> int:
        """log_p of the order of g."""
        v = min(valuation(g[0], self.p, self.n), valuation(g[1], self.p, self.n))
        return self.n - v

    def quotient(self) -> "GroupContext":
        if self.n < 2:
            raise QuotientUndefined("no quotient Z_{p^(n-1)}^2 for n = 1")
        return GroupContext(self.p, self.n - 1)


def make_context(p: int, n: int) -> GroupContext:
    return GroupContext(p, n)


@dataclass(frozen=True)
class DeltaNode:
    id: int
    kind: str  # "A", "B" or "E"
    m: int
    param: int
    generator: Element
    length: int
    father: int
    sons: Tuple[int, ...]

    @property
    def descriptor(self) -> str:
        if self.kind == "E":
            return "E"
        return f"{self.kind}:{self.m},{self.param}"


@dataclass(frozen=True)
class CocyclicRep:
    """A cocyclic subgroup H, identified by the cyclic subgroup H^Delta."""

    ctx: GroupContext
    dual_node: int
    kind: str
    m: int
    param: int
    generating_pair: Tuple[Element, Element]

    @property
    def size(self) -> int:
        # |H| = p^(2n - l(H^Delta)) = p^(n + m)
        return self.ctx.p ** (self.ctx.n + self.m)

    def contains(self, g: Element) -> bool:
        """Membership from the coordinate description of H."""
        x, y = g
        p, n = self.ctx.p, self.ctx.n
        if self.kind == "E":
            return True
        mod = p ** (n - self.m)
        if self.kind == "A":
            return (y - self.param * x) % mod == 0
        return (x - self.param * p * y) % mod == 0

    def elements(self) -> frozenset:
        """Elements of H spanned by the generating pair."""
        g1, g2 = self.generating_pair
        q = self.ctx.modulus
        return frozenset(
            ((i * g1[0] + j * g2[0]) % q, (i * g1[1] + j * g2[1]) % q)
            for i in range(q)
            for j in range(q)
        )


class DeltaTree:
    """The Hasse diagram of cyclic subgroups of G, rooted at {0}."""

    def __init__(self, ctx: GroupContext):
        self.ctx = ctx
        p, n, q = ctx.p, ctx.n, ctx.modulus
        raw: List[Tuple[str, int, int, Element, int]] = [("E", n, 0, (0, 0), 0)]
        for length in range(1, n + 1):
            m = n - length
            for a in range(p**length):
                raw.append(("A", m, a, (p**m % q, a * p**m % q), length))
            for b in range(p ** (length - 1)):
                raw.append(("B", m, b, (b * p ** (m + 1) % q, p**m % q), length))

        owner = np.full(ctx.order, -1, dtype=np.int64)
        for nid, (_, _, _, gen, length) in enumerate(raw):
            for k in range(p**length):
                if length and k % p == 0:
                    continue
                i = ctx.index(ctx.scale(k, gen))
                if owner[i] != -1:
                    raise AssertionError(f"element {ctx.element(i)} lies in two orbits")
                owner[i] = nid
        if (owner < 0).any():
            raise AssertionError("orbits do not cover G")
        owner.setflags(write=False)
        self._owner = owner

        fathers = [0] * len(raw)
        sons: List[List[int]] = [[] for _ in raw]
        for nid, (_, _, _, gen, length) in enumerate(raw):
            if nid == 0:
                continue
            f = int(owner[ctx.index(ctx.scale(p, gen))])
            if raw[f][4] != length - 1:
                raise AssertionError("father length mismatch")
            fathers[nid] = f
            sons[f].append(nid)

        self.nodes: Tuple[DeltaNode, ...] = tuple(
            DeltaNode(nid, kind, m, param, gen, length, fathers[nid], tuple(sons[nid]))
            for nid, (kind, m, param, gen, length) in enumerate(raw)
        )
        self.levels: Tuple[Tuple[int, ...], ...] = tuple(
            tuple(nd.id for nd in self.nodes if nd.length == l) for l in range(n + 1)
        )
        self._by_descriptor = {nd.descriptor: nd.id for nd in self.nodes}

    def __len__(self) -> int:
        return len(self.nodes)

    def __repr__(self) -> str:
        return f"DeltaTree(p={self.ctx.p}, n={self.ctx.n}, nodes={len(self.nodes)})"

    @property
    def root(self) -> int:
        return 0

    def length(self, f: int) -> int:
        return self.nodes[f].length

    def father(self, f: int) -> int:
        return self.nodes[f].father

    def sons(self, f: int) -> Tuple[int, ...]:
        return self.nodes[f].sons

    def size(self, f: int) -> int:
        return self.ctx.p ** self.nodes[f].length

    def orbit_size(self, f: int) -> int:
        l = self.nodes[f].length
        return 1 if l == 0 else self.ctx.p ** (l - 1) * (self.ctx.p - 1)

    def internal_nodes(self) -> Iterator[int]:
        for nd in self.nodes:
            if nd.sons:
                yield nd.id

    def node_of(self, g: Element) -> int:
        """Id of the cyclic subgroup generated by g."""
        q = self.ctx.modulus
        return int(self._owner[self.ctx.index((g[0] % q, g[1] % q))])

    @property
    def element_nodes(self) -> np.ndarray:
        """Node id for every element index x*p^n + y."""
        return self._owner

    def node_by_descriptor(self, text: str) -> int:
        try:
            return self._by_descriptor[text.strip().replace(" ", "")]
        except KeyError:
            raise ValueError(f"unknown node descriptor {text!r} for {self!r}") from None

    def descriptor(self, f: int) -> str:
        return self.nodes[f].descriptor

    def orbit_generators(self, f: int) -> frozenset:
        ctx = self.ctx
        gen, l = self.nodes[f].generator, self.nodes[f].length
        if l == 0:
            return frozenset({(0, 0)})
        return frozenset(ctx.scale(k, gen) for k in range(ctx.p**l) if k % ctx.p)

    def subgroup_elements(self, f: int) -> frozenset:
        gen = self.nodes[f].generator
        return frozenset(self.ctx.scale(k, gen) for k in range(self.size(f)))

    def ancestor_at(self, f: int, length: int) -> int:
        while self.nodes[f].length > length:
            f = self.nodes[f].father
        return f

    def is_ancestor(self, a: int, f: int) -> bool:
        """True when subgroup a is contained in subgroup f."""
        la = self.nodes[a].length
        return la <= self.nodes[f].length and self.ancestor_at(f, la) == a

    def descendants(self, f: int, depth: int) -> List[int]:
        """Des_depth(f): nodes ``depth`` levels below f (Des_0 is {f})."""
        front = [f]
        for _ in range(depth):
            front = [s for x in front for s in self.nodes[x].sons]
        return front

    def blocks(self, level: Optional[int] = None) -> List[int]:
        """Fathers of all blocks, optionally only blocks lying at ``level``."""
        if level is None:
            return list(self.internal_nodes())
        if level < 1 or level > self.ctx.n:
            return []
        return list(self.levels[level - 1])

    @cached_property
    def full_set(self) -> "OrbitSubset":
        return OrbitSubset.of(range(1, len(self.nodes)))

    def level_set(self, level: int) -> "OrbitSubset":
        return OrbitSubset.of(self.levels[level]) if level else OrbitSubset()

    def complement(self, s: "OrbitSubset") -> "OrbitSubset":
        return self.full_set ^ s

    def support(self, s: "OrbitSubset") -> frozenset:
        """The connection set: union of the generator orbits of s."""
        out: set = set()
        for f in s:
            out |= self.orbit_generators(f)
        return frozenset(out)

    def subset_from_elements(self, elements: Iterable[Element]) -> "OrbitSubset":
        """Orbit subset with exactly this element support, or ValueError."""
        elements = frozenset(elements)
        ids = {self.node_of(g) for g in elements}
        if 0 in ids:
            raise ValueError("connection set contains the identity")
        s = OrbitSubset.of(ids)
        if self.support(s) != elements:
            raise ValueError("element set is not a union of generator orbits")
        return s

    @cached_property
    def quotient_tree(self) -> "DeltaTree":
        return DeltaTree(self.ctx.quotient())


_TREES: dict = {}


def build_delta(ctx: GroupContext) -> DeltaTree:
    """Cached tree for a context; trees are immutable once built."""
    key = (ctx.p, ctx.n)
    if key not in _TREES:
        _TREES[key] = DeltaTree(ctx)
    return _TREES[key]


def delta_tree(p: int, n: int) -> DeltaTree:
    return build_delta(make_context(p, n))


def orbit_generators(tree: DeltaTree, f: int) -> frozenset:
    return tree.orbit_generators(f)


def intersect_cyclic(tree: DeltaTree, f: int, k: int) -> int:
    """F intersect K, the deepest common ancestor of the two nodes."""
    lf, lk = tree.length(f), tree.length(k)
    if lf > lk:
        f = tree.ancestor_at(f, lk)
    elif lk > lf:
        k = tree.ancestor_at(k, lf)
    while f != k:
        f, k = tree.father(f), tree.father(k)
    return f


def nabla_dual(tree: DeltaTree, f: int) -> CocyclicRep:
    """The cocyclic subgroup H with H^Delta = F."""
    nd = tree.nodes[f]
    ctx = tree.ctx
    p, n, q = ctx.p, ctx.n, ctx.modulus
    if nd.kind == "E":
        pair = ((1, 0), (0, 1))
    elif nd.kind == "A":
        pair = ((1, nd.param % q), (0, p ** (n - nd.m) % q))
    else:
        pair = ((nd.param * p % q, 1), (p ** (n - nd.m) % q, 0))
    return CocyclicRep(ctx, f, nd.kind, nd.m, nd.param, pair)


def delta_of(tree: DeltaTree, elements: frozenset) -> int:
    """H^Delta = p^m H for a cocyclic H given by its element set."""
    ctx = tree.ctx
    size = len(elements)
    m = 0
    while ctx.p ** (ctx.n + m) < size:
        m += 1
    if ctx.p ** (ctx.n + m) != size:
        raise ValueError("not a cocyclic subgroup: order is not p^(n+m)")
    image = {ctx.scale(ctx.p**m, g) for g in elements}
    best = max(image, key=ctx.length_of)
    f = tree.node_of(best)
    if tree.subgroup_elements(f) != image:
        raise ValueError("p^m H is not cyclic")
    return f


def cocyclic_contains(tree: DeltaTree, k: int, f: int) -> bool:
    """F is contained in K^nabla (the containment criterion on lengths)."""
    n = tree.ctx.n
    return tree.length(f) - tree.length(intersect_cyclic(tree, f, k)) <= n - tree.length(k)


def phi_image(tree: DeltaTree, f: int) -> int:
    """Node of phi(F) in the tree of Z_{p^(n-1)}^2, phi reducing mod p^(n-1)."""
    if tree.ctx.n < 2:
        raise QuotientUndefined("phi needs n >= 2")
    qt = tree.quotient_tree
    return qt.node_of(tree.nodes[f].generator)


def divide_by_p(tree: DeltaTree, f: int, target: DeltaTree) -> int:
    """Map a node of length <= n-1 (so inside pG) to the tree of pG ~ Z_{p^(n-1)}^2."""
    p = tree.ctx.p
    x, y = tree.nodes[f].generator
    if x % p or y % p:
        raise AssertionError(f"{tree.descriptor(f)} does not lie in pG")
    return target.node_of((x // p, y // p))


@dataclass(frozen=True, order=True)
class OrbitSubset:
    """A root-free set of tree nodes, stored as a bitmask over node ids."""

    mask: int = 0

    def __post_init__(self):
        if self.mask < 0:
            raise ValueError("negative mask")
        if self.mask & 1:
            raise ValueError("the trivial subgroup cannot belong to a connection set")

    @classmethod
    def of(cls, ids: Iterable[int]) -> "OrbitSubset":
        mask = 0
        for i in ids:
            mask |= 1 << int(i)
        return cls(mask)

    def __contains__(self, f) -> bool:
        return bool((self.mask >> f) & 1)

    def __iter__(self) -> Iterator[int]:
        m, i = self.mask, 0
        while m:
            if m & 1:
                yield i
            m >>= 1
            i += 1

    def __len__(self) -> int:
        return self.mask.bit_count()

    def __bool__(self) -> bool:
        return self.mask != 0

    def __or__(self, other: "OrbitSubset") -> "OrbitSubset":
        return OrbitSubset(self.mask | other.mask)

    def __and__(self, other: "OrbitSubset") -> "OrbitSubset":
        return OrbitSubset(self.mask & other.mask)

    def __sub__(self, other: "OrbitSubset") -> "OrbitSubset":
        return OrbitSubset(self.mask & ~other.mask)

    def __xor__(self, other: "OrbitSubset") -> "OrbitSubset":
        return OrbitSubset(self.mask ^ other.mask)

    def issubset(self, other: "OrbitSubset") -> bool:
        return self.mask & ~other.mask == 0

    def indicator(self, size: int) -> np.ndarray:
        v = np.zeros(size, dtype=np.int64)
        for i in self:
            v[i] = 1
        return v

    def descriptors(self, tree: DeltaTree) -> List[str]:
        return [tree.descriptor(f) for f in self]


def parse_subset(tree: DeltaTree, lines: Sequence[str]) -> OrbitSubset:
    """Subset from descriptor lines; blank lines and '#' comments are skipped."""
    ids = []
    for line in lines:
        line = line.split("#", 1)[0].strip()
        if line:
            ids.append(tree.node_by_descriptor(line))
    return OrbitSubset.of(ids)
