"""Oracles that do not rely on character theory, and exhaustive searches.

``brute_srg_check`` counts common neighbours on an explicit adjacency
matrix; ``sring_closure_check`` squares the connection set in the group
algebra by counting representations h = s1 + s2.  The searches run the
character test over every orbit subset, or the brute oracle over every
symmetric subset of G.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .characters import character_matrix
from .classifier import (
    NON_TRIVIAL,
    Catalog,
    SrgParams,
    classify,
    params_from_eigs,
    square_type,
)
from .group import DeltaTree, GroupContext, OrbitSubset, delta_tree

log = logging.getLogger(__name__)

ADJACENCY_LIMIT = 2**16
ORBIT_SEARCH_LIMIT = 24
SYMMETRIC_SEARCH_LIMIT = 20
SAMPLE_SEED = 20240601
MIN_SAMPLE = 32


class TooLarge(RuntimeError):
    pass


class NotStronglyRegular(ValueError):
    def __init__(self, message: str, witness: Tuple[int, ...]):
        super().__init__(message)
        self.witness = witness


def _element_coords(ctx: GroupContext) -> Tuple[np.ndarray, np.ndarray]:
    idx = np.arange(ctx.order, dtype=np.int64)
    return idx // ctx.modulus, idx % ctx.modulus


def _support_array(tree: DeltaTree, s: OrbitSubset) -> np.ndarray:
    pts = sorted(tree.support(s))
    return np.array(pts, dtype=np.int64).reshape(-1, 2)


def cayley_adjacency_from_elements(ctx: GroupContext, support: np.ndarray) -> np.ndarray:
    if ctx.order > ADJACENCY_LIMIT:
        raise TooLarge(f"{ctx.order} vertices exceed the adjacency limit {ADJACENCY_LIMIT}")
    q = ctx.modulus
    gx, gy = _element_coords(ctx)
    adj = np.zeros((ctx.order, ctx.order), dtype=bool)
    if len(support):
        tx = (gx[:, None] + support[None, :, 0]) % q
        ty = (gy[:, None] + support[None, :, 1]) % q
        rows = np.repeat(np.arange(ctx.order), len(support))
        adj[rows, (tx * q + ty).ravel()] = True
    return adj


def cayley_adjacency(tree: DeltaTree, s: OrbitSubset) -> np.ndarray:
    """Vertex g is joined to g + x for every x in the connection set."""
    return cayley_adjacency_from_elements(tree.ctx, _support_array(tree, s))


def brute_srg_check(adj: np.ndarray) -> SrgParams:
    """(nu, k, lambda, mu) from common-neighbour counts over all pairs."""
    nu = adj.shape[0]
    if (adj != adj.T).any():
        i, j = map(int, np.argwhere(adj != adj.T)[0])
        raise NotStronglyRegular("adjacency is not symmetric", (i, j))
    if adj.diagonal().any():
        i = int(np.flatnonzero(adj.diagonal())[0])
        raise NotStronglyRegular("graph has a loop", (i,))
    degree = adj.sum(axis=1)
    if (degree != degree[0]).any():
        j = int(np.flatnonzero(degree != degree[0])[0])
        raise NotStronglyRegular("graph is not regular", (0, j))
    a = adj.astype(np.float64)
    common = np.rint(a @ a).astype(np.int64)
    off = ~np.eye(nu, dtype=bool)
    values = {}
    for name, mask in (("lambda", adj & off), ("mu", ~adj & off)):
        counts = common[mask]
        if counts.size == 0:
            values[name] = None
            continue
        if (counts != counts[0]).any():
            pairs = np.argwhere(mask & (common != counts[0]))
            i, j = map(int, pairs[0])
            raise NotStronglyRegular(f"{name} is not constant", (i, j))
        values[name] = int(counts[0])
    k, lam, mu = int(degree[0]), values["lambda"], values["mu"]
    r = s = None
    if lam is not None and mu is not None:
        delta = (lam - mu) ** 2 + 4 * (k - mu)
        root = math.isqrt(delta)
        if root * root == delta:
            r, s = (lam - mu + root) // 2, (lam - mu - root) // 2
    return SrgParams(nu, k, lam, mu, r, s)


def brute_is_trivial(params: SrgParams) -> bool:
    """Disjoint union of cliques (mu = 0) or its complement."""
    nu, k, lam, mu = params.quadruple
    if mu == 0 or (mu is None and lam is None):
        return True
    return lam is not None and nu - 2 * k + lam == 0


def params_agree(a: SrgParams, b: SrgParams) -> bool:
    """Equality of (nu, k, lambda, mu), ignoring counts a degenerate graph leaves undefined."""
    for x, y in zip(a.quadruple, b.quadruple):
        if x is not None and y is not None and x != y:
            return False
    return True


@dataclass(frozen=True)
class ClosureCertificate:
    ok: bool
    alpha: Optional[int] = None
    beta: Optional[int] = None
    gamma: Optional[int] = None
    witness: Optional[int] = None


def _convolve(ctx: GroupContext, left: np.ndarray, right: np.ndarray) -> np.ndarray:
    """Coefficients of (sum of left) * (sum of right) in Z[G], by element index."""
    q = ctx.modulus
    if len(left) == 0 or len(right) == 0:
        return np.zeros(ctx.order, dtype=np.int64)
    sx = (left[:, None, 0] + right[None, :, 0]) % q
    sy = (left[:, None, 1] + right[None, :, 1]) % q
    return np.bincount((sx * q + sy).ravel(), minlength=ctx.order)


def sring_closure_check(tree: DeltaTree, s: OrbitSubset) -> ClosureCertificate:
    """Is S*S = alpha*1 + beta*S + gamma*(G - S - 1)?  Then alpha, beta, gamma = k, lambda, mu."""
    ctx = tree.ctx
    if ctx.order > ADJACENCY_LIMIT:
        raise TooLarge(f"{ctx.order} elements exceed the limit {ADJACENCY_LIMIT}")
    support = _support_array(tree, s)
    q = ctx.modulus
    inverse = {((-x) % q, (-y) % q) for x, y in support.tolist()}
    if inverse != {(x, y) for x, y in support.tolist()}:
        return ClosureCertificate(False)
    counts = _convolve(ctx, support, support)
    in_s = np.zeros(ctx.order, dtype=bool)
    if len(support):
        in_s[support[:, 0] * q + support[:, 1]] = True
    rest = ~in_s
    rest[0] = False
    coeffs = []
    for mask in (in_s, rest):
        vals = counts[mask]
        if vals.size == 0:
            coeffs.append(None)
            continue
        bad = np.flatnonzero(mask & (counts != vals[0]))
        if bad.size:
            return ClosureCertificate(False, witness=int(bad[0]))
        coeffs.append(int(vals[0]))
    return ClosureCertificate(True, int(counts[0]), coeffs[0], coeffs[1])


@dataclass(frozen=True)
class PartitionCertificate:
    ok: bool
    constants: Dict[Tuple[int, int], Tuple[int, ...]] = field(default_factory=dict)
    witness: Optional[Tuple[int, int, int]] = None


def partition_closure_check(tree: DeltaTree, classes: Sequence[OrbitSubset]) -> PartitionCertificate:
    """Is <1, A_1, ..., A_d> closed under multiplication for a partition of G - {e}?

    ``constants[(i, j)]`` lists the coefficient of 1, A_1, ..., A_d in A_i A_j.
    """
    covered = OrbitSubset()
    for c in classes:
        if c & covered:
            raise ValueError("classes overlap")
        covered = covered | c
    if covered != tree.full_set:
        raise ValueError("classes do not cover G - {e}")
    ctx = tree.ctx
    q = ctx.modulus
    supports = [_support_array(tree, c) for c in classes]
    cells = [np.array([0])] + [sup[:, 0] * q + sup[:, 1] for sup in supports]
    constants = {}
    for i, j in product(range(len(classes)), repeat=2):
        counts = _convolve(ctx, supports[i], supports[j])
        row = []
        for l, cell in enumerate(cells):
            vals = counts[cell]
            if (vals != vals[0]).any():
                return PartitionCertificate(False, constants, (i, j, l))
            row.append(int(vals[0]))
        constants[(i, j)] = tuple(row)
    return PartitionCertificate(True, constants)


# ---------------------------------------------------------------- searches


@dataclass(frozen=True)
class SearchEntry:
    mask: int
    k: int
    r: int
    s: int
    params: SrgParams
    trivial: bool

    @property
    def subset(self) -> OrbitSubset:
        return OrbitSubset(self.mask)


@dataclass
class SearchCatalog:
    p: int
    n: int
    space: str
    searched: int
    entries: List[SearchEntry]
    sample_seed: int = SAMPLE_SEED
    sampled: int = 0

    @property
    def nontrivial(self) -> List[SearchEntry]:
        return [e for e in self.entries if not e.trivial]

    @property
    def nontrivial_masks(self) -> frozenset:
        return frozenset(e.mask for e in self.entries if not e.trivial)


def _scan_chunk(matrix: np.ndarray, start: int, stop: int, width: int):
    idx = np.arange(start, stop, dtype=np.int64)
    bits = (idx[:, None] >> np.arange(width, dtype=np.int64)) & 1
    values = bits @ matrix.T
    rest = values[:, 1:]
    lo, hi = rest.min(axis=1), rest.max(axis=1)
    ok = ((rest == lo[:, None]) | (rest == hi[:, None])).all(axis=1)
    return idx[ok], values[ok, 0], hi[ok], lo[ok]


def _stride_sample(items: Sequence, count: int, seed: int) -> List:
    if len(items) <= count:
        return list(items)
    stride = len(items) // count
    offset = seed % stride
    return [items[offset + i * stride] for i in range(count)]


def cross_check(tree: DeltaTree, s: OrbitSubset) -> Tuple[SrgParams, ClosureCertificate]:
    """Brute and closure oracles for one subset (used on samples)."""
    adj = cayley_adjacency(tree, s)
    return brute_srg_check(adj), sring_closure_check(tree, s)


def exhaustive_orbit_search(
    p: int, n: int, workers: Optional[int] = None, sample: int = MIN_SAMPLE, chunk: int = 1 << 15
) -> SearchCatalog:
    """Every root-free orbit subset, decided by the character test."""
    tree = delta_tree(p, n)
    width = len(tree) - 1
    if width > ORBIT_SEARCH_LIMIT:
        raise TooLarge(f"2^{width} orbit subsets exceed the search limit 2^{ORBIT_SEARCH_LIMIT}")
    matrix = character_matrix(tree)[:, 1:]
    total = 1 << width
    ranges = [(a, min(total, a + chunk)) for a in range(0, total, chunk)]
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda r: _scan_chunk(matrix, r[0], r[1], width), ranges))
    else:
        parts = [_scan_chunk(matrix, a, b, width) for a, b in ranges]
    entries = []
    for idx, ks, rs, ss in parts:
        for i, k, r, s in zip(idx.tolist(), ks.tolist(), rs.tolist(), ss.tolist()):
            params = params_from_eigs(tree.ctx, k, r, s)
            entries.append(SearchEntry(i << 1, k, r, s, params, bool({r, s} & {0, -1})))
    entries.sort(key=lambda e: e.mask)
    catalog = SearchCatalog(p, n, "orbit-unions", total, entries)
    checked = _stride_sample(entries, sample, SAMPLE_SEED)
    for e in checked:
        brute, closure = cross_check(tree, e.subset)
        if not params_agree(brute, e.params):
            raise AssertionError(f"brute oracle disagrees on mask {e.mask}: {brute} vs {e.params}")
        if not closure.ok or (closure.alpha, closure.beta, closure.gamma) != (
            brute.k,
            brute.lam if closure.beta is not None else None,
            brute.mu if closure.gamma is not None else None,
        ):
            raise AssertionError(f"closure oracle disagrees on mask {e.mask}: {closure}")
    catalog.sampled = len(checked)
    log.info("orbit search (%d,%d): %d subsets, %d srcg", p, n, total, len(entries))
    return catalog


@dataclass
class SymmetricSearchResult:
    p: int
    n: int
    classes: int
    searched: int
    srcg_sets: List[frozenset]
    params: List[SrgParams]
    non_orbit_unions: List[frozenset]

    @property
    def all_orbit_unions(self) -> bool:
        return not self.non_orbit_unions


def negation_classes(ctx: GroupContext) -> List[Tuple[Tuple[int, int], ...]]:
    seen = set()
    out = []
    for g in ctx.elements():
        if g == (0, 0) or g in seen:
            continue
        pair = tuple(sorted({g, ctx.neg(g)}))
        seen.update(pair)
        out.append(pair)
    return out


def exhaustive_symmetric_search(p: int, n: int) -> SymmetricSearchResult:
    """Every inverse-closed subset of G - {e}, decided by the brute oracle alone."""
    tree = delta_tree(p, n)
    ctx = tree.ctx
    classes = negation_classes(ctx)
    if len(classes) > SYMMETRIC_SEARCH_LIMIT:
        raise TooLarge(f"{len(classes)} inverse classes exceed the limit {SYMMETRIC_SEARCH_LIMIT}")
    found, params, stray = [], [], []
    for bits in range(1 << len(classes)):
        elements = [g for i, c in enumerate(classes) if bits >> i & 1 for g in c]
        support = np.array(elements, dtype=np.int64).reshape(-1, 2)
        try:
            prm = brute_srg_check(cayley_adjacency_from_elements(ctx, support))
        except NotStronglyRegular:
            continue
        es = frozenset(elements)
        found.append(es)
        params.append(prm)
        try:
            tree.subset_from_elements(es)
        except ValueError:
            stray.append(es)
    return SymmetricSearchResult(p, n, len(classes), 1 << len(classes), found, params, stray)


@dataclass
class DiffReport:
    only_in_search: frozenset
    only_in_catalog: frozenset
    unclassified: frozenset

    @property
    def empty(self) -> bool:
        return not self.only_in_search and not self.only_in_catalog

    @property
    def consistent(self) -> bool:
        """Catalog inside the search and every extra survivor labelled UnclassifiedP2."""
        return not self.only_in_catalog and self.only_in_search == self.unclassified


def cross_validate(search: SearchCatalog, catalog: Catalog) -> DiffReport:
    if (search.p, search.n) != (catalog.p, catalog.n):
        raise ValueError("catalogs belong to different groups")
    tree = delta_tree(search.p, search.n)
    a, b = search.nontrivial_masks, catalog.masks
    extra = a - b
    unclassified = frozenset(
        m
        for m in extra
        if (rep := classify(tree, OrbitSubset(m))).verdict == NON_TRIVIAL
        and rep.family.tag == "UnclassifiedP2"
    )
    return DiffReport(frozenset(extra), frozenset(b - a), unclassified)
