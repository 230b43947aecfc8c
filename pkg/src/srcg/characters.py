"""Integer character values of G on generator orbits.

A character class is named by a tree node K: it is the set of irreducible
characters whose kernel is the cocyclic subgroup K^nabla.  The principal
class is the root.  Three independent evaluation routes are provided:

* ``char_orbit``          -- closed three-case formula on tree lengths,
* ``char_orbit_general``  -- Frattini / Moebius / Euler-phi formula with the
                             kernel intersection counted elementwise,
* ``char_orbit_oracle``   -- Moebius inversion over the subgroup chain of F,
                             using nothing but elementwise kernel membership.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List

import numpy as np

from .group import (
    CocyclicRep,
    DeltaTree,
    OrbitSubset,
    intersect_cyclic,
    nabla_dual,
)


def _factor(k: int) -> Dict[int, int]:
    out: Dict[int, int] = {}
    d = 2
    while d * d <= k:
        while k % d == 0:
            out[d] = out.get(d, 0) + 1
            k //= d
        d += 1
    if k > 1:
        out[k] = out.get(k, 0) + 1
    return out


def mobius(k: int) -> int:
    if k < 1:
        raise ValueError("mobius is defined for positive integers")
    f = _factor(k)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def euler_phi(k: int) -> int:
    if k < 1:
        raise ValueError("euler_phi is defined for positive integers")
    out = k
    for prime in _factor(k):
        out = out // prime * (prime - 1)
    return out


def class_level(tree: DeltaTree, k: int) -> int:
    """Nabla level of the class K, taken as the length of K itself."""
    return tree.length(k)


def classes_of_level(tree: DeltaTree, t: int) -> tuple:
    return tree.levels[t]


def char_orbit(tree: DeltaTree, k: int, f: int) -> int:
    if f == tree.root:
        return 1
    p, n = tree.ctx.p, tree.ctx.n
    size = tree.size(f)
    drop = tree.length(f) - tree.length(intersect_cyclic(tree, f, k))
    slack = n - tree.length(k)
    if drop <= slack:
        return size * (p - 1) // p
    if drop == slack + 1:
        return -size // p
    return 0


def char_orbit_general(tree: DeltaTree, h: CocyclicRep, f: int) -> int:
    ctx = tree.ctx
    gen = tree.nodes[f].generator
    size = tree.size(f)
    frattini = size // ctx.p if size > 1 else 1
    inside = sum(1 for j in range(size) if h.contains(ctx.scale(j, gen)))
    mu = mobius(size // inside)
    if mu == 0:
        return 0
    if inside % frattini:
        raise AssertionError("kernel intersection does not contain the Frattini subgroup")
    return frattini * mu * euler_phi(inside // frattini)


@lru_cache(maxsize=None)
def _kernel_elements(tree: DeltaTree, k: int) -> frozenset:
    return nabla_dual(tree, k).elements()


def char_orbit_oracle(tree: DeltaTree, k: int, f: int) -> int:
    ctx = tree.ctx
    kernel = _kernel_elements(tree, k)
    gen = tree.nodes[f].generator
    size = tree.size(f)
    total = 0
    d = 1
    while d <= size:
        # C_d, the order-d subgroup of F, is generated by (|F|/d) * gen
        if ctx.scale(size // d, gen) in kernel:
            total += mobius(size // d) * d
        d *= ctx.p
    return total


@lru_cache(maxsize=None)
def character_matrix(tree: DeltaTree) -> np.ndarray:
    """M[K, F] = chi_K[F] for every class K and node F (read-only)."""
    size = len(tree)
    m = np.empty((size, size), dtype=np.int64)
    for k in range(size):
        for f in range(size):
            m[k, f] = char_orbit(tree, k, f)
    m.setflags(write=False)
    return m


def char_on_set(tree: DeltaTree, k: int, s: OrbitSubset) -> int:
    row = character_matrix(tree)[k]
    return int(sum(row[f] for f in s))


@dataclass(frozen=True)
class CharVector:
    values: np.ndarray  # indexed by class id; values[0] is the principal value

    @property
    def principal(self) -> int:
        return int(self.values[0])

    @property
    def nonprincipal(self) -> np.ndarray:
        return self.values[1:]

    def __getitem__(self, k: int) -> int:
        return int(self.values[k])


def char_table(tree: DeltaTree, s: OrbitSubset) -> CharVector:
    values = character_matrix(tree) @ s.indicator(len(tree))
    values.setflags(write=False)
    return CharVector(values)


def omega_set(tree: DeltaTree, k: int) -> OrbitSubset:
    """Leaves of the tree that do not descend from the level-1 node K."""
    leaves = tree.levels[tree.ctx.n]
    return OrbitSubset.of(f for f in leaves if tree.ancestor_at(f, 1) != k)


def omega_identity_check(tree: DeltaTree, s: OrbitSubset, k: int) -> bool:
    """chi_G[S] - chi_K[S] == p^n |Omega_K & S| for a class K of level 1."""
    if tree.length(k) != 1:
        raise ValueError("the identity is stated for classes of nabla level 1")
    lhs = char_on_set(tree, tree.root, s) - char_on_set(tree, k, s)
    rhs = tree.ctx.modulus * len(omega_set(tree, k) & s)
    return lhs == rhs


def level_values(tree: DeltaTree, s: OrbitSubset) -> List[set]:
    """Distinct character values of S on each nabla level 0..n."""
    vec = char_table(tree, s).values
    return [{int(vec[k]) for k in lev} for lev in tree.levels]
