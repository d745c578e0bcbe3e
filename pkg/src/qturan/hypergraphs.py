"""Uniform hypergraphs: canonical storage, shadows, links, partitions,
file I/O, and a derandomized reduction to balanced k-partite subgraphs.

A hypergraph is stored canonically: every edge is a strictly
increasing vertex tuple, and the edge list itself is strictly
lex-increasing.  Equality and hashing are structural because of this.
Bitmask views of the edges are precomputed since almost everything
downstream lives on intersection popcounts.

The k-partite reduction implements the classical averaging argument:
a uniformly random balanced k-coloring makes an edge transversal
(one vertex per class) with probability k! * prod(q_i) / (n)_k, which
is at least k!/k^k.  The greedy here derandomizes that by conditional
expectations, so the output always keeps at least ceil(k!/k^k * m)
edges, for every seed.  The seed only breaks score ties.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from itertools import combinations
from math import factorial
from typing import Iterable, Mapping, Optional, Sequence

from .errors import InvariantViolation, ParameterError, ParseError, StructureError

Edge = tuple[int, ...]


def mask_of(edge: Iterable[int]) -> int:
    """Vertex set as a bitmask."""
    m = 0
    for v in edge:
        m |= 1 << v
    return m


def bits_of(mask: int) -> Edge:
    """Inverse of mask_of, ascending."""
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return tuple(out)


@dataclass(frozen=True)
class Hypergraph:
    """k-uniform hypergraph on vertex set {0, ..., n-1}.

    Construct via from_edges unless the input is already canonical.
    meta is a free-form annotation dict; it never affects equality.
    """

    n: int
    k: int
    edges: tuple[Edge, ...]
    meta: Optional[Mapping] = field(default=None, compare=False, repr=False)
    masks: tuple[int, ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not isinstance(self.n, int) or not isinstance(self.k, int):
            raise StructureError("n and k must be ints")
        if self.n < 0 or self.k < 1:
            raise StructureError(f"bad dimensions n={self.n} k={self.k}")
        prev = None
        masks = []
        for e in self.edges:
            if len(e) != self.k:
                raise StructureError(f"edge {e} is not {self.k}-uniform")
            if any(not isinstance(v, int) or v < 0 or v >= self.n for v in e):
                raise StructureError(f"edge {e} has vertices outside [0, {self.n})")
            if any(e[i] >= e[i + 1] for i in range(self.k - 1)):
                raise StructureError(f"edge {e} is not strictly increasing")
            if prev is not None and e <= prev:
                raise StructureError("edge list is not strictly lex-increasing")
            prev = e
            masks.append(mask_of(e))
        object.__setattr__(self, "masks", tuple(masks))

    @classmethod
    def from_edges(cls, n: int, k: int, edges: Iterable[Iterable[int]],
                   meta: Optional[Mapping] = None) -> "Hypergraph":
        """Normalize and validate: sorts vertices, dedups and sorts edges."""
        norm = set()
        for e in edges:
            t = tuple(sorted(e))
            if len(set(t)) != len(t):
                raise StructureError(f"edge {tuple(e)} repeats a vertex")
            norm.add(t)
        return cls(n=n, k=k, edges=tuple(sorted(norm)), meta=meta)

    @property
    def m(self) -> int:
        return len(self.edges)

    def with_meta(self, meta: Mapping) -> "Hypergraph":
        return Hypergraph(n=self.n, k=self.k, edges=self.edges, meta=meta)


@dataclass(frozen=True)
class VertexSetT:
    """A sorted set of vertices, used for shadow elements and link sets."""

    members: Edge

    def __post_init__(self):
        ms = self.members
        if any(ms[i] >= ms[i + 1] for i in range(len(ms) - 1)):
            raise StructureError(f"vertex set {ms} is not strictly increasing")
        if ms and ms[0] < 0:
            raise StructureError("negative vertex index")

    @classmethod
    def of(cls, vs: Iterable[int]) -> "VertexSetT":
        return cls(members=tuple(sorted(set(vs))))


def shadow(h: Hypergraph, s: int) -> Hypergraph:
    """The s-uniform hypergraph of all s-subsets of edges of h."""
    if not 1 <= s <= h.k:
        raise ParameterError(f"shadow size {s} outside [1, {h.k}]")
    out = set()
    for e in h.edges:
        out.update(combinations(e, s))
    return Hypergraph(n=h.n, k=s, edges=tuple(sorted(out)))


def link(h: Hypergraph, T) -> Hypergraph:
    """The (k-|T|)-uniform hypergraph { e - T : T subset of e in E(h) }."""
    tset = frozenset(T.members if isinstance(T, VertexSetT) else T)
    if any(not isinstance(v, int) or v < 0 or v >= h.n for v in tset):
        raise ParameterError("link set has vertices outside the graph")
    if len(tset) >= h.k:
        raise ParameterError(f"link set size {len(tset)} must be < k={h.k}")
    tmask = mask_of(tset)
    out = []
    for e, em in zip(h.edges, h.masks):
        if em & tmask == tmask:
            out.append(tuple(v for v in e if v not in tset))
    return Hypergraph(n=h.n, k=h.k - len(tset), edges=tuple(sorted(out)))


@dataclass(frozen=True)
class Partition:
    """Ordered partition of {0, ..., n-1} into disjoint classes."""

    parts: tuple[Edge, ...]
    balanced: bool = False

    def __post_init__(self):
        seen = set()
        for p in self.parts:
            for v in p:
                if v in seen:
                    raise StructureError(f"vertex {v} in two classes")
                seen.add(v)
        if seen and seen != set(range(max(seen) + 1)):
            raise StructureError("classes do not cover an initial segment")
        if self.balanced and self.parts:
            sizes = [len(p) for p in self.parts]
            if max(sizes) - min(sizes) > 1:
                raise StructureError("balanced flag set but class sizes differ by > 1")

    @classmethod
    def contiguous(cls, n: int, k: int) -> "Partition":
        """k classes of consecutive vertices, sizes n//k or n//k + 1."""
        if k < 1 or n < 0:
            raise ParameterError(f"bad partition shape n={n} k={k}")
        quota = [n // k + (1 if i < n % k else 0) for i in range(k)]
        parts = []
        at = 0
        for q in quota:
            parts.append(tuple(range(at, at + q)))
            at += q
        return cls(parts=tuple(parts), balanced=True)

    @property
    def n(self) -> int:
        return sum(len(p) for p in self.parts)

    @property
    def k(self) -> int:
        return len(self.parts)

    def part_index(self) -> dict[int, int]:
        return {v: i for i, p in enumerate(self.parts) for v in p}


def _elementary_symmetric(values: Sequence[int], u: int) -> int:
    # coefficient of x^u in prod (1 + r x), truncated at degree u
    coeffs = [0] * (u + 1)
    coeffs[0] = 1
    for r in values:
        for d in range(u, 0, -1):
            coeffs[d] += coeffs[d - 1] * r
    return coeffs[u]


def kpartite_reduce(h: Hypergraph, seed: int = 0) -> tuple[Partition, Hypergraph]:
    """Balanced k-partition keeping at least ceil(k!/k^k * m) transversal edges.

    Greedy over vertices by conditional expectation.  All scores are
    exact integers: the survival probability of an edge with u open
    slots is u! * e_u(free class quotas) / (R)_u, and putting every
    edge over the common scale (R)_U with U = min(k, R) lets classes
    be compared without rationals.  Ties go to the seeded RNG, which
    is the only thing the seed influences; the floor holds regardless.
    """
    k = h.k
    if h.n < k:
        raise ParameterError(f"n={h.n} < k={k}: no balanced transversal partition")
    quota = [h.n // k + (1 if i < h.n % k else 0) for i in range(k)]
    rng = random.Random(seed)

    # per-edge state: classes already hit (bitmask), open slots, alive flag
    used = [0] * h.m
    left = [k] * h.m
    alive = [True] * h.m
    edge_mask = list(h.masks)

    assignment = [-1] * h.n
    remaining = h.n
    for v in range(h.n):
        r_after = remaining - 1
        cap = min(k, r_after)
        vbit = 1 << v
        best_score = -1
        best_parts: list[int] = []
        for c in range(k):
            if quota[c] == 0:
                continue
            quota[c] -= 1
            cbit = 1 << c
            score = 0
            for idx in range(h.m):
                if not alive[idx]:
                    continue
                eu, el = used[idx], left[idx]
                if edge_mask[idx] & vbit:
                    if eu & cbit:
                        continue  # this choice kills the edge
                    eu |= cbit
                    el -= 1
                if el == 0:
                    term = 1
                    for j in range(cap):
                        term *= r_after - j
                else:
                    free = [quota[i] for i in range(k) if not eu >> i & 1]
                    es = _elementary_symmetric(free, el)
                    if es == 0:
                        continue
                    term = factorial(el) * es
                    for j in range(el, cap):
                        term *= r_after - j
                score += term
            quota[c] += 1
            if score > best_score:
                best_score = score
                best_parts = [c]
            elif score == best_score:
                best_parts.append(c)
        c = best_parts[0] if len(best_parts) == 1 else rng.choice(best_parts)
        assignment[v] = c
        quota[c] -= 1
        remaining -= 1
        cbit = 1 << c
        for idx in range(h.m):
            if alive[idx] and edge_mask[idx] & vbit:
                if used[idx] & cbit:
                    alive[idx] = False
                else:
                    used[idx] |= cbit
                    left[idx] -= 1

    kept = tuple(e for idx, e in enumerate(h.edges) if alive[idx] and left[idx] == 0)
    floor = -(-factorial(k) * h.m // k ** k)
    if len(kept) < floor:
        raise InvariantViolation(
            f"kept {len(kept)} transversal edges, guarantee was {floor}")
    parts = tuple(tuple(v for v in range(h.n) if assignment[v] == i)
                  for i in range(k))
    part = Partition(parts=parts, balanced=True)
    sub = Hypergraph(n=h.n, k=k, edges=kept,
                     meta={"reduction": "balanced-kpartite", "seed": seed,
                           "kept": len(kept), "floor": floor})
    return part, sub


# ---------------------------------------------------------------- file I/O
#
# Text format: a header line "k n m", then m lines of k vertices each.
# Lines starting with '#' and blank lines are ignored.  Vertices within
# a line must be strictly increasing; the edge list itself may come in
# any order and is sorted on load.  Writers always emit canonical order.

def write_hg(h: Hypergraph, path: str) -> None:
    with open(path, "w") as f:
        f.write(f"{h.k} {h.n} {h.m}\n")
        for e in h.edges:
            f.write(" ".join(map(str, e)) + "\n")


def read_hg(path: str) -> Hypergraph:
    header = None
    edges: list[Edge] = []
    seen: set[Edge] = set()
    k = n = m = 0
    with open(path) as f:
        for lineno, raw in enumerate(f, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            try:
                vals = [int(tok) for tok in line.split()]
            except ValueError:
                raise ParseError(f"{path}:{lineno}: non-integer token") from None
            if header is None:
                if len(vals) != 3:
                    raise ParseError(f"{path}:{lineno}: header needs 'k n m'")
                k, n, m = vals
                if k < 1 or n < 0 or m < 0:
                    raise ParseError(f"{path}:{lineno}: bad header values")
                header = vals
                continue
            if len(edges) >= m:
                raise ParseError(f"{path}:{lineno}: more than {m} edge lines")
            if len(vals) != k:
                raise ParseError(f"{path}:{lineno}: expected {k} vertices")
            if any(vals[i] >= vals[i + 1] for i in range(k - 1)):
                raise ParseError(f"{path}:{lineno}: vertices not strictly increasing")
            if vals[0] < 0 or vals[-1] >= n:
                raise ParseError(f"{path}:{lineno}: vertex outside [0, {n})")
            e = tuple(vals)
            if e in seen:
                raise ParseError(f"{path}:{lineno}: duplicate edge")
            seen.add(e)
            edges.append(e)
    if header is None:
        raise ParseError(f"{path}: empty file")
    if len(edges) != m:
        raise ParseError(f"{path}: header promises {m} edges, found {len(edges)}")
    try:
        return Hypergraph(n=n, k=k, edges=tuple(sorted(edges)))
    except StructureError as exc:
        raise ParseError(f"{path}: {exc}") from None


def write_hg_json(h: Hypergraph, path: str) -> None:
    doc = {"k": h.k, "n": h.n, "edges": [list(e) for e in h.edges]}
    if h.meta is not None:
        doc["meta"] = dict(h.meta)
    with open(path, "w") as f:
        json.dump(doc, f, indent=1)
        f.write("\n")


def read_hg_json(path: str) -> Hypergraph:
    with open(path) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as exc:
            raise ParseError(f"{path}: {exc}") from None
    if not isinstance(doc, dict) or not {"k", "n", "edges"} <= doc.keys():
        raise ParseError(f"{path}: need keys k, n, edges")
    try:
        return Hypergraph.from_edges(n=doc["n"], k=doc["k"], edges=doc["edges"],
                                     meta=doc.get("meta"))
    except (StructureError, TypeError) as exc:
        raise ParseError(f"{path}: {exc}") from None


def save_hypergraph(h: Hypergraph, path: str) -> None:
    if path.endswith(".json"):
        write_hg_json(h, path)
    else:
        write_hg(h, path)


def load_hypergraph(path: str) -> Hypergraph:
    if path.endswith(".json"):
        return read_hg_json(path)
    return read_hg(path)
