"""graph6 and edge-list writers, and the line-delimited JSON catalog records."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass
from typing import Iterable, Iterator, List, Optional, TextIO

import numpy as np

from .classifier import ClassificationReport, SrgParams
from .group import DeltaTree, OrbitSubset, delta_tree

GRAPH6_HEADER = b">>graph6<<"
_SIX_BITS = np.array([32, 16, 8, 4, 2, 1], dtype=np.uint8)


def _graph6_size(n: int) -> bytes:
    if n < 0:
        raise ValueError("negative vertex count")
    if n <= 62:
        return bytes([63 + n])
    if n <= 258047:
        return bytes([126] + [63 + ((n >> shift) & 63) for shift in (12, 6, 0)])
    return bytes([126, 126] + [63 + ((n >> shift) & 63) for shift in (30, 24, 18, 12, 6, 0)])


def to_graph6(adj: np.ndarray, header: bool = False) -> bytes:
    """graph6 line for a simple graph, newline-terminated.

    Bits are the upper triangle taken column by column, (0,1), (0,2), (1,2),
    (0,3), ..., padded with zeros to a multiple of six.
    """
    n = adj.shape[0]
    rows, cols = np.tril_indices(n, -1)
    bits = np.asarray(adj, dtype=bool).T[rows, cols].astype(np.uint8)
    pad = (-len(bits)) % 6
    bits = np.concatenate([bits, np.zeros(pad, dtype=np.uint8)])
    body = (bits.reshape(-1, 6) @ _SIX_BITS + 63).astype(np.uint8).tobytes()
    return (GRAPH6_HEADER if header else b"") + _graph6_size(n) + body + b"\n"


def graph6_length(n: int) -> int:
    """Byte length of the graph6 line for n vertices, newline excluded."""
    return len(_graph6_size(n)) + (n * (n - 1) // 2 + 5) // 6


def edge_lines(adj: np.ndarray) -> Iterator[str]:
    rows, cols = np.nonzero(np.triu(adj, 1))
    for u, v in zip(rows.tolist(), cols.tolist()):
        yield f"{u} {v}"


@dataclass(frozen=True)
class CatalogRecord:
    p: int
    n: int
    subset: List[str]
    vector: Optional[List[int]]
    family: str
    nu: int
    k: int
    # ``lambda`` is a keyword, so the field is spelled lam and renamed on the wire
    lam: Optional[int]
    mu: Optional[int]
    r: Optional[int]
    s: Optional[int]
    trivial: bool

    def to_json(self) -> str:
        data = asdict(self)
        data["lambda"] = data.pop("lam")
        keys = ["p", "n", "subset", "vector", "family", "nu", "k", "lambda", "mu", "r", "s", "trivial"]
        return json.dumps({key: data[key] for key in keys}, separators=(",", ":"))

    @classmethod
    def from_json(cls, line: str) -> "CatalogRecord":
        data = json.loads(line)
        try:
            data["lam"] = data.pop("lambda")
            rec = cls(**data)
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed catalog record: {exc}") from None
        tree = delta_tree(rec.p, rec.n)
        # descriptors must name real nodes of the tree
        rec.to_subset(tree)
        return rec

    def to_subset(self, tree: Optional[DeltaTree] = None) -> OrbitSubset:
        tree = tree or delta_tree(self.p, self.n)
        return OrbitSubset.of(tree.node_by_descriptor(d) for d in self.subset)


def _family_name(report: ClassificationReport) -> str:
    if report.family is not None:
        return report.family.label()
    return report.verdict


def record_from_report(tree: DeltaTree, s: OrbitSubset, report: ClassificationReport) -> CatalogRecord:
    prm: Optional[SrgParams] = report.params
    spectrum = report.spectrum
    return CatalogRecord(
        p=tree.ctx.p,
        n=tree.ctx.n,
        subset=s.descriptors(tree),  # node id order
        vector=list(report.vector) if report.vector is not None else None,
        family=_family_name(report),
        nu=tree.ctx.order,
        k=spectrum.k,
        lam=prm.lam if prm else None,
        mu=prm.mu if prm else None,
        r=spectrum.r,
        s=spectrum.s,
        trivial=bool(spectrum.trivial),
    )


def write_records(records: Iterable[CatalogRecord], out: TextIO) -> int:
    count = 0
    for rec in records:
        out.write(rec.to_json() + "\n")
        count += 1
    return count


def read_records(lines: Iterable[str]) -> Iterator[CatalogRecord]:
    for line in lines:
        if line.strip() and not line.lstrip().startswith("#"):
            yield CatalogRecord.from_json(line)
