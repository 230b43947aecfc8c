"""Deciding, classifying and enumerating strongly regular Cayley graphs.

A root-free subset S of the tree defines the Cayley graph whose connection
set is the union of the generator orbits of S.  The graph is strongly
regular exactly when the non-principal character values of S take at most
two values r > s; the principal value is the valency k.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from itertools import combinations
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from .characters import char_table
from .group import (
    DeltaTree,
    GroupContext,
    OrbitSubset,
    delta_tree,
    divide_by_p,
    phi_image,
)
from .homogeneous import (
    CongruenceFailure,
    HomVector,
    NotABlockSet,
    NotHomogeneous,
    all_vectors,
    block_set,
    blocks_of,
    count_homogeneous,
    homogeneity_vector,
    homogenize,
    iter_homogeneous,
)

log = logging.getLogger(__name__)

LATIN = "Latin"
NEGATIVE_LATIN = "NegativeLatin"
NOT_APPLICABLE = "NotApplicable"

NOT_SRCG = "NotSrcg"
TRIVIAL = "TrivialSrcg"
NON_TRIVIAL = "NonTrivial"

# Catalog generation refuses to materialize more realizations than this
# unless the caller passes an explicit limit.
CATALOG_REALIZATION_LIMIT = 2_000_000


class InconsistentEigenvalues(ValueError):
    pass


class NotSrcgInput(ValueError):
    pass


class WrongContext(ValueError):
    pass


class EvenPrime(ValueError):
    pass


class ContextTooLarge(RuntimeError):
    pass


class ClassificationError(AssertionError):
    """A certified SRCG for p > 2 matched none of the classified families."""


@dataclass(frozen=True)
class SrgParams:
    nu: int
    k: int
    lam: Optional[int]
    mu: Optional[int]
    r: Optional[int] = None
    s: Optional[int] = None
    square_type: str = NOT_APPLICABLE
    q: Optional[int] = None

    @property
    def quadruple(self) -> Tuple[int, int, Optional[int], Optional[int]]:
        return (self.nu, self.k, self.lam, self.mu)

    def feasible(self) -> bool:
        """(nu - k - 1) mu == k (k - 1 - lambda)."""
        if self.lam is None or self.mu is None:
            return True
        return (self.nu - self.k - 1) * self.mu == self.k * (self.k - 1 - self.lam)


@dataclass(frozen=True)
class Spectrum:
    is_srcg: bool
    k: int
    r: Optional[int] = None
    s: Optional[int] = None
    witnesses: Tuple[int, ...] = ()

    @property
    def trivial(self) -> bool:
        return self.is_srcg and bool({self.r, self.s} & {0, -1})

    @property
    def eigenvalues(self) -> Tuple[int, int, int]:
        return (self.k, self.r, self.s)


def srcg_test(tree: DeltaTree, s: OrbitSubset) -> Spectrum:
    vec = char_table(tree, s)
    rest = vec.nonprincipal
    values = sorted({int(v) for v in rest})
    if len(values) > 2:
        picks = tuple(1 + int(np.flatnonzero(rest == v)[0]) for v in values[:3])
        return Spectrum(False, vec.principal, witnesses=picks)
    return Spectrum(True, vec.principal, values[-1], values[0])


def square_type(ctx: GroupContext, k: int, r: int, s: int) -> Tuple[str, Optional[int]]:
    m = ctx.modulus
    if r - s != m:
        return NOT_APPLICABLE, None
    if k == s - s * m:
        return LATIN, -s
    if k == s + s * m + m + m * m:
        return NEGATIVE_LATIN, k // (m + 1)
    return NOT_APPLICABLE, None


def params_from_eigs(ctx: GroupContext, k: int, r: int, s: int) -> SrgParams:
    mu = k + r * s
    lam = mu + r + s
    kind, q = square_type(ctx, k, r, s)
    trivial = bool({r, s} & {0, -1})
    if not trivial and kind == NOT_APPLICABLE:
        raise InconsistentEigenvalues(
            f"eigenvalues ({k}, {r}, {s}) fit neither square type over Z_{ctx.modulus}^2"
        )
    return SrgParams(ctx.order, k, lam, mu, r, s, kind, q)


def _is_subgroup(ctx: GroupContext, elements: frozenset) -> bool:
    q = ctx.modulus
    pts = np.array(sorted(elements), dtype=np.int64).reshape(-1, 2)
    if len(pts) == 0:
        return False
    member = np.zeros(ctx.order, dtype=bool)
    member[pts[:, 0] * q + pts[:, 1]] = True
    sx = (pts[:, None, 0] + pts[None, :, 0]) % q
    sy = (pts[:, None, 1] + pts[None, :, 1]) % q
    return bool(member[sx * q + sy].all())


def is_trivial_by_subgroup(tree: DeltaTree, s: OrbitSubset) -> bool:
    """S + {e} or (G minus S) is a subgroup of G."""
    zero = frozenset({(0, 0)})
    return _is_subgroup(tree.ctx, tree.support(s) | zero) or _is_subgroup(
        tree.ctx, tree.support(tree.complement(s)) | zero
    )


@dataclass(frozen=True)
class Family:
    tag: str
    vector: Optional[HomVector] = None
    inner: Optional["ClassificationReport"] = None
    base: Optional["Family"] = None

    def label(self) -> str:
        if self.tag in ("HomogeneousConstant", "RecursiveCase"):
            return f"{self.tag}({','.join(map(str, self.vector))})"
        if self.tag == "ComplementOf":
            return f"ComplementOf({self.base.label()})"
        return self.tag

    @property
    def root_tag(self) -> str:
        return self.base.root_tag if self.tag == "ComplementOf" else self.tag


@dataclass(frozen=True)
class ClassificationReport:
    verdict: str
    spectrum: Spectrum
    params: Optional[SrgParams] = None
    family: Optional[Family] = None
    vector: Optional[HomVector] = None
    witnesses: Tuple[int, ...] = ()

    @property
    def nontrivial(self) -> bool:
        return self.verdict == NON_TRIVIAL


def _vector_or_none(tree: DeltaTree, s: OrbitSubset) -> Optional[HomVector]:
    try:
        return homogeneity_vector(tree, s)
    except NotHomogeneous:
        return None


def _constant_tail(a: Sequence[int]) -> bool:
    return all(x == a[1] for x in a[1:]) if len(a) > 1 else True


def _quotient_image(tree: DeltaTree, s: OrbitSubset, inner: DeltaTree) -> Optional[OrbitSubset]:
    """Q = phi(S) moved into the tree of phi(pG) ~ Z_{p^(n-2)}^2, S a block set."""
    try:
        fathers = blocks_of(tree, s)
    except NotABlockSet:
        return None
    n = tree.ctx.n
    quotient = tree.quotient_tree
    image = []
    for h in fathers:
        if not 1 <= tree.length(h) <= n - 2:
            return None
        targets = {divide_by_p(quotient, phi_image(tree, f), inner) for f in tree.sons(h)}
        if len(targets) != 1:
            raise AssertionError("a block does not collapse to one node under phi")
        image.append(targets.pop())
    return OrbitSubset.of(image)


def _recursive_family(tree: DeltaTree, s: OrbitSubset) -> Optional[Family]:
    p, n = tree.ctx.p, tree.ctx.n
    if n < 3:
        return None
    try:
        sh = homogenize(tree, s)
    except CongruenceFailure:
        return None
    a = homogeneity_vector(tree, sh)
    if any(a[1 : n - 1]) or a[n - 1] == 0 or not sh.issubset(s):
        return None
    inner = delta_tree(p, n - 2)
    q = _quotient_image(tree, s - sh, inner)
    if q is None:
        return None
    a_n = a[n - 1]
    if n == 3:
        if _vector_or_none(inner, q) != (a_n,):
            return None
        return Family("RecursiveCase", a, inner=classify(inner, q))
    report = classify(inner, q)
    if not report.nontrivial:
        return None
    try:
        qh = homogeneity_vector(inner, homogenize(inner, q))
    except CongruenceFailure:
        return None
    allowed = {
        (0,) * (n - 3) + (a_n,),
        (p,) + (p - 1,) * (n - 4) + (a_n - 1,),
    }
    if qh not in allowed:
        return None
    return Family("RecursiveCase", a, inner=report)


def _match(tree: DeltaTree, s: OrbitSubset) -> Optional[Family]:
    a = _vector_or_none(tree, s)
    if a is not None and _constant_tail(a):
        return Family("HomogeneousConstant", a)
    return _recursive_family(tree, s)


_GAMMA_CACHE: Dict[Tuple[int, int], Dict[str, frozenset]] = {}


def gamma_family(tree: DeltaTree) -> Dict[str, List[OrbitSubset]]:
    """The exceptional p = 2 families and their complements.

    Gamma2 at (2,2): a (2,0)-homogeneous set plus the one level-2 block it
    misses.  Gamma3 at (2,3): a (3,0,0)-homogeneous set plus every level-3
    block it misses.
    """
    p, n = tree.ctx.p, tree.ctx.n
    if (p, n) == (2, 2):
        tag, base = "Gamma2", (2, 0)
    elif (p, n) == (2, 3):
        tag, base = "Gamma3", (3, 0, 0)
    else:
        raise WrongContext(f"no exceptional family over Z_{p**n}^2")
    members = []
    for t in iter_homogeneous(tree, base):
        free = [h for h in tree.levels[n - 1] if not any(f in t for f in tree.sons(h))]
        members.append(t | block_set(tree, free))
    return {tag: members, tag + "c": [tree.complement(x) for x in members]}


def _gamma_lookup(tree: DeltaTree) -> Dict[int, str]:
    key = (tree.ctx.p, tree.ctx.n)
    if key not in _GAMMA_CACHE:
        fams = gamma_family(tree)
        _GAMMA_CACHE[key] = {x.mask: tag for tag, xs in fams.items() for x in xs}
    return _GAMMA_CACHE[key]


def classify(tree: DeltaTree, s: OrbitSubset) -> ClassificationReport:
    spectrum = srcg_test(tree, s)
    if not spectrum.is_srcg:
        return ClassificationReport(NOT_SRCG, spectrum, witnesses=spectrum.witnesses)
    params = params_from_eigs(tree.ctx, spectrum.k, spectrum.r, spectrum.s)
    vector = _vector_or_none(tree, s)
    if spectrum.trivial:
        return ClassificationReport(TRIVIAL, spectrum, params, vector=vector)

    p, n = tree.ctx.p, tree.ctx.n
    family = _match(tree, s)
    if family is None:
        other = _match(tree, tree.complement(s))
        if other is not None:
            family = Family("ComplementOf", base=other)
    if family is None and p == 2 and n in (2, 3):
        tag = _gamma_lookup(tree).get(s.mask)
        if tag is not None:
            family = Family(tag)
    if family is None:
        if p > 2:
            raise ClassificationError(
                f"strongly regular set {s.descriptors(tree)} matches no family"
            )
        family = Family("UnclassifiedP2")
    return ClassificationReport(NON_TRIVIAL, spectrum, params, family, vector)


def paley_vector(ctx: GroupContext) -> HomVector:
    if ctx.p == 2:
        raise EvenPrime("Paley parameters need an odd prime")
    return ((ctx.p + 1) // 2,) + ((ctx.p - 1) // 2,) * (ctx.n - 1)


def paley_params(nu: int) -> Tuple[int, int, int, int]:
    return (nu, (nu - 1) // 2, (nu - 5) // 4, (nu - 1) // 4)


# ---------------------------------------------------------------- duality


def _lambda_sums_equal(ctx: GroupContext, support: np.ndarray, target: int) -> np.ndarray:
    """For every g in G: does sum_{h in S} zeta^(g.h) equal ``target``?

    The sum is an integer polynomial in zeta evaluated at a primitive p^n-th
    root of unity.  c(zeta) = 0 for a coefficient vector c of length p^n iff
    c is constant along each residue class mod p^(n-1), because the
    cyclotomic polynomial is Phi_p(x^(p^(n-1))).
    """
    q, p = ctx.modulus, ctx.p
    idx = np.arange(ctx.order)
    gx, gy = idx // q, idx % q
    exps = (gx[:, None] * support[None, :, 0] + gy[:, None] * support[None, :, 1]) % q
    rows = np.repeat(idx, support.shape[0])
    counts = np.bincount(rows * q + exps.ravel(), minlength=ctx.order * q)
    counts = counts.reshape(ctx.order, q)
    counts[:, 0] -= target
    folded = counts.reshape(ctx.order, p, q // p)
    return (folded == folded[:, :1, :]).all(axis=(1, 2))


def dual_set(tree: DeltaTree, s: OrbitSubset) -> OrbitSubset:
    """S+ for the pairing lambda(g, h) = zeta^(g1 h1 + g2 h2)."""
    spectrum = srcg_test(tree, s)
    if not spectrum.is_srcg or spectrum.trivial:
        raise NotSrcgInput("the dual is defined for non-trivial strongly regular sets")
    support = np.array(sorted(tree.support(s)), dtype=np.int64).reshape(-1, 2)
    hits = _lambda_sums_equal(tree.ctx, support, spectrum.r)
    hits[0] = False
    elements = [tree.ctx.element(int(i)) for i in np.flatnonzero(hits)]
    return tree.subset_from_elements(elements)


# ---------------------------------------------------------------- catalog


@dataclass
class CatalogSummary:
    p: int
    n: int
    total: int = 0
    families: Counter = field(default_factory=Counter)
    parameters: Counter = field(default_factory=Counter)
    truncated: bool = False


@dataclass
class Catalog:
    p: int
    n: int
    entries: List[Tuple[OrbitSubset, ClassificationReport]]
    summary: CatalogSummary

    @property
    def masks(self) -> frozenset:
        return frozenset(s.mask for s, _ in self.entries)


def _lift_map(tree: DeltaTree, inner: DeltaTree) -> Dict[int, int]:
    """Node of the phi(pG) tree -> father of the block of G that maps onto it."""
    quotient = tree.quotient_tree
    out = {}
    for l in range(1, tree.ctx.n - 1):
        for h in tree.levels[l]:
            son = tree.sons(h)[0]
            out[divide_by_p(quotient, phi_image(tree, son), inner)] = h
    return out


def _recursive_candidates(tree: DeltaTree) -> Iterator[OrbitSubset]:
    p, n = tree.ctx.p, tree.ctx.n
    inner = delta_tree(p, n - 2)
    lift = _lift_map(tree, inner)
    for a_n in range(1, p):
        if n == 3:
            inner_sets = [OrbitSubset.of(c) for c in combinations(inner.levels[1], a_n)]
        else:
            allowed = {(0,) * (n - 3) + (a_n,), (p,) + (p - 1,) * (n - 4) + (a_n - 1,)}
            inner_sets = [
                q
                for q, rep in enumerate_catalog(p, n - 2).entries
                if homogeneity_vector(inner, homogenize(inner, q)) in allowed
            ]
        for a_1 in range(p + 2):
            base = (a_1,) + (0,) * (n - 2) + (a_n,)
            for sh in iter_homogeneous(tree, base):
                for q in inner_sets:
                    extra = block_set(tree, (lift[x] for x in q))
                    if not (extra & sh):
                        yield sh | extra


def _family_candidates(tree: DeltaTree) -> Iterator[OrbitSubset]:
    p, n = tree.ctx.p, tree.ctx.n
    for a in all_vectors(p, n):
        if _constant_tail(a):
            yield from iter_homogeneous(tree, a)
    if n >= 3:
        yield from _recursive_candidates(tree)
    if p == 2 and n in (2, 3):
        for xs in gamma_family(tree).values():
            yield from xs


def _dedupe(items: Iterable[OrbitSubset]) -> Iterator[OrbitSubset]:
    seen = set()
    for s in items:
        if s.mask not in seen:
            seen.add(s.mask)
            yield s


def enumerate_catalog(
    p: int,
    n: int,
    emit: Optional[Callable[[OrbitSubset, ClassificationReport], None]] = None,
    limit: Optional[int] = None,
) -> Catalog:
    """Every non-trivial SRCG produced by the classified families.

    Candidates are the constant-tail homogeneous sets, the recursive family
    for n >= 3, the exceptional p = 2 sets and all their complements; each
    is certified by the character test before it is kept.  Full runs are
    sorted by subset mask; capped runs keep generation order.
    """
    tree = delta_tree(p, n)
    planned = sum(count_homogeneous(tree, a) for a in all_vectors(p, n) if _constant_tail(a))
    if limit is None and planned > CATALOG_REALIZATION_LIMIT:
        raise ContextTooLarge(
            f"{planned} homogeneous realizations over Z_{p**n}^2; pass a limit"
        )
    if limit is None:
        masks = set()
        for s in _family_candidates(tree):
            masks.add(s.mask)
            masks.add(tree.complement(s).mask)
        ordered: Iterable[OrbitSubset] = (OrbitSubset(m) for m in sorted(masks))
    else:
        # a capped run streams in generation order instead of materializing everything
        ordered = _dedupe(x for s in _family_candidates(tree) for x in (s, tree.complement(s)))
    summary = CatalogSummary(p, n)
    entries = []
    for s in ordered:
        spectrum = srcg_test(tree, s)
        if not spectrum.is_srcg or spectrum.trivial:
            continue
        if limit is not None and len(entries) >= limit:
            summary.truncated = True
            break
        report = classify(tree, s)
        entries.append((s, report))
        summary.families[report.family.root_tag] += 1
        summary.parameters[report.params.quadruple] += 1
        if emit is not None:
            emit(s, report)
    summary.total = len(entries)
    return Catalog(p, n, entries, summary)
