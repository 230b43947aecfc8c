"""Blocks, homogeneous sets and homogenization on the cyclic-subgroup tree.

A block is the full son set of one internal node; blocks are identified by
that father.  A set S is (a_1, ..., a_n)-homogeneous when every node H of
length l < n has exactly a_{l+1} + [H in S] sons in S.
"""

from __future__ import annotations

import random
from itertools import combinations, product
from math import comb
from typing import Iterator, List, Optional, Sequence, Tuple

from .characters import char_on_set
from .group import DeltaTree, OrbitSubset

HomVector = Tuple[int, ...]


class NotABlockSet(ValueError):
    def __init__(self, witness: int):
        super().__init__(f"block under node {witness} is only partially covered")
        self.witness = witness


class NotHomogeneous(ValueError):
    def __init__(self, witness: Tuple[int, ...]):
        super().__init__(f"son counts are not level-constant at nodes {witness}")
        self.witness = witness


class CongruenceFailure(ValueError):
    def __init__(self, level: int, witness: Tuple[int, int]):
        super().__init__(
            f"blocks under nodes {witness} have different residues at level {level}"
        )
        self.level = level
        self.witness = witness


class InvalidVector(ValueError):
    pass


def check_vector(p: int, n: int, a: Sequence[int]) -> HomVector:
    a = tuple(int(x) for x in a)
    if len(a) != n:
        raise InvalidVector(f"vector {a} must have {n} entries")
    if not 0 <= a[0] <= p + 1:
        raise InvalidVector(f"a_1 = {a[0]} outside [0, {p + 1}]")
    for i, x in enumerate(a[1:], start=2):
        if not 0 <= x <= p - 1:
            raise InvalidVector(f"a_{i} = {x} outside [0, {p - 1}]")
    return a


def all_vectors(p: int, n: int) -> Iterator[HomVector]:
    yield from product(range(p + 2), *[range(p)] * (n - 1))


def blocks_of(tree: DeltaTree, s: OrbitSubset) -> List[int]:
    """Fathers of the blocks whose union is S; NotABlockSet otherwise."""
    out = []
    for h in tree.internal_nodes():
        hit = sum(1 for f in tree.sons(h) if f in s)
        if hit == len(tree.sons(h)):
            out.append(h)
        elif hit:
            raise NotABlockSet(h)
    return out


def block_set(tree: DeltaTree, fathers) -> OrbitSubset:
    return OrbitSubset.of(f for h in fathers for f in tree.sons(h))


def is_block_set(tree: DeltaTree, s: OrbitSubset) -> bool:
    try:
        blocks_of(tree, s)
    except NotABlockSet:
        return False
    return True


def block_equivalent(tree: DeltaTree, a: OrbitSubset, b: OrbitSubset) -> bool:
    return is_block_set(tree, a ^ b)


def homogeneity_vector(tree: DeltaTree, s: OrbitSubset) -> HomVector:
    p, n = tree.ctx.p, tree.ctx.n
    a = []
    for level in range(n):
        seen: Optional[Tuple[int, int]] = None
        for h in tree.levels[level]:
            c = sum(1 for f in tree.sons(h) if f in s) - (h in s)
            if seen is None:
                seen = (h, c)
            elif c != seen[1]:
                raise NotHomogeneous((seen[0], h))
        h, c = seen
        upper = p + 1 if level == 0 else p - 1
        if not 0 <= c <= upper:
            raise NotHomogeneous((h,))
        a.append(c)
    return tuple(a)


def is_homogeneous(tree: DeltaTree, s: OrbitSubset) -> bool:
    try:
        homogeneity_vector(tree, s)
    except NotHomogeneous:
        return False
    return True


def build_homogeneous(
    tree: DeltaTree, a: Sequence[int], rng: Optional[random.Random] = None
) -> OrbitSubset:
    """One realization of ``a``: first sons in id order, or a random choice."""
    a = check_vector(tree.ctx.p, tree.ctx.n, a)
    chosen = set()
    for level in range(tree.ctx.n):
        for h in tree.levels[level]:
            want = a[level] + (h in chosen)
            sons = tree.sons(h)
            pick = rng.sample(sons, want) if rng is not None else sons[:want]
            chosen.update(pick)
    return OrbitSubset.of(chosen)


def iter_homogeneous(tree: DeltaTree, a: Sequence[int]) -> Iterator[OrbitSubset]:
    """All realizations of ``a`` in tree-descent lexicographic order."""
    a = check_vector(tree.ctx.p, tree.ctx.n, a)
    n = tree.ctx.n

    def descend(level: int, members: OrbitSubset) -> Iterator[OrbitSubset]:
        if level == n:
            yield members
            return
        options = []
        for h in tree.levels[level]:
            want = a[level] + (h in members)
            options.append([OrbitSubset.of(c) for c in combinations(tree.sons(h), want)])
        for pick in product(*options):
            nxt = members
            for part in pick:
                nxt = nxt | part
            yield from descend(level + 1, nxt)

    yield from descend(0, OrbitSubset())


def count_homogeneous(tree: DeltaTree, a: Sequence[int]) -> int:
    p, n = tree.ctx.p, tree.ctx.n
    a = check_vector(p, n, a)
    total = comb(p + 1, a[0])
    inside, outside = a[0], p + 1 - a[0]
    for level in range(1, n):
        x = a[level]
        total *= comb(p, x + 1) ** inside * comb(p, x) ** outside
        nodes = p**level + p ** (level - 1)
        inside = inside * (x + 1) + outside * x
        outside = p * nodes - inside
    return total


def expected_descendant_count(p: int, l: int, m: int, a: Sequence[int]) -> int:
    """A_{l,m}: members of S among Des_{m-l}(F) for F of length l not in S."""
    if not 0 <= l <= m <= len(a):
        raise ValueError(f"need 0 <= l <= m <= n, got l={l}, m={m}")
    if l == m:
        return 0
    if l == 0:
        return a[0] + sum(a[i - 1] * (p ** (i - 1) + p ** (i - 2)) for i in range(2, m + 1))
    return sum(a[i - 1] * p ** (i - l - 1) for i in range(l + 1, m + 1))


def homogenize(tree: DeltaTree, s: OrbitSubset) -> OrbitSubset:
    """The homogeneous set block equivalent to S with the same level-1 slice.

    Level by level from 2 upward, the residue of |S & B| - [father in S^h]
    modulo p must agree for every block B; that residue becomes a_i and
    the blocks that disagree with it exactly are removed or added whole.
    """
    p, n = tree.ctx.p, tree.ctx.n
    out = s & tree.level_set(1)
    for level in range(2, n + 1):
        residue = None
        moves = []
        for h in tree.levels[level - 1]:
            sons = tree.sons(h)
            hit = sum(1 for f in sons if f in s)
            v = hit - (h in out)
            if residue is None:
                residue = (h, v % p)
            elif v % p != residue[1]:
                raise CongruenceFailure(level, (residue[0], h))
            moves.append((h, hit, v))
        for h, hit, v in moves:
            sons = OrbitSubset.of(tree.sons(h))
            if v == p:
                # full block over a non-member father: a_i = 0
                continue
            if v == -1:
                # empty block under a member father: a_i = p - 1
                out = out | sons
                continue
            out = out | (s & sons)
    return out


def complement_vector(p: int, a: Sequence[int]) -> HomVector:
    """Vector of a homogeneous set block equivalent to the complement.

    A zero prefix a_1 = ... = a_{i-1} = 0 (or the full prefix p+1, p-1, ...)
    is a block set in the complement and is dropped (or filled in), which
    shifts the first non-trivial coordinate by one.
    """
    a = check_vector(p, len(a), a)
    n = len(a)
    generic = (p + 1 - a[0],) + tuple(p - 1 - x for x in a[1:])
    if a[0] == 0:
        for i in range(1, n):
            if a[i] != 0:
                return (0,) * i + (p - a[i],) + generic[i + 1:]
    if a[0] == p + 1:
        for i in range(1, n):
            if a[i] != p - 1:
                return (p + 1,) + (p - 1,) * (i - 1) + (p - 2 - a[i],) + generic[i + 1:]
    return generic


def x_min(tree: DeltaTree, s: OrbitSubset, m: int) -> int:
    """Smallest character value of S over the classes of nabla level m."""
    return min(char_on_set(tree, k, s) for k in tree.levels[m])
