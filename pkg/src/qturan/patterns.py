"""Forbidden configurations: generators, certificate-producing
detectors, and the structural audits built on top of them.

The two pattern families are Q(k, r) -- r edges of the form
A u (B - {b_i}) u {c_i} over disjoint A, B, C with |A| = k - r and
|B| = |C| = r -- and I(k, i), a pair of edges meeting in exactly i
vertices.

Detection strategy for Q copies.  Any two edges of a copy meet in
exactly k-2 vertices, so candidates live in the "tight-pair graph"
on edge ids (adjacent iff the intersection has size exactly k-2).
More generally any d >= 2 edges of a copy intersect in exactly k-d
vertices and cover exactly k+d, which gives exact (not just bounded)
pruning conditions at every search depth; they hold for every subset
of a genuine copy, so pruning with them never loses one.  A clique
surviving to depth r is then decomposed: A is the common core, and
the remaining vertices must split by coverage count into B (count
r-1) and C (count 1) with a consistent b_i/c_i pairing per edge.
The decomposition is always validated; pairwise tightness alone does
not imply the configuration.

Detectors return the lexicographically first certificate by edge-id
tuple.  Tight-pair enumeration groups edges by shared (k-2)-subsets;
for large inputs the grouping and the triangle join (r = 3) run on
sorted integer arrays instead of dicts.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np

from .errors import InvariantViolation, ParameterError, StructureError
from .hypergraphs import Edge, Hypergraph, Partition, bits_of, mask_of

_DICT_INCIDENCE_CAP = 1_500_000  # grouping entries before switching to arrays
_TRIANGLE_JOIN_MIN_PAIRS = 200_000
_JOIN_CHUNK = 4_000_000


@dataclass(frozen=True)
class QPattern:
    k: int
    r: int

    def __post_init__(self):
        if not 2 <= self.r <= self.k:
            raise ParameterError(f"Q pattern needs 2 <= r <= k, got k={self.k} r={self.r}")

    @property
    def label(self) -> str:
        return f"Q:{self.k}:{self.r}"


@dataclass(frozen=True)
class IPattern:
    k: int
    i: int

    def __post_init__(self):
        if not 0 <= self.i < self.k:
            raise ParameterError(f"I pattern needs 0 <= i < k, got k={self.k} i={self.i}")

    @property
    def label(self) -> str:
        return f"I:{self.k}:{self.i}"


def generate_Q(k: int, r: int) -> Hypergraph:
    """Canonical Q(k, r): A = {0..k-r-1}, B = {k-r..k-1}, C = {k..k+r-1}."""
    pat = QPattern(k=k, r=r)
    A = tuple(range(k - r))
    B = tuple(range(k - r, k))
    C = tuple(range(k, k + r))
    edges = []
    for i in range(r):
        edges.append(A + B[:i] + B[i + 1:] + (C[i],))
    return Hypergraph.from_edges(n=k + r, k=k, edges=edges,
                                 meta={"pattern": pat.label})


def generate_I(k: int, i: int) -> Hypergraph:
    """Canonical I(k, i): edges {0..k-1} and {0..i-1} u {k..2k-i-1}."""
    pat = IPattern(k=k, i=i)
    e1 = tuple(range(k))
    e2 = tuple(range(i)) + tuple(range(k, 2 * k - i))
    return Hypergraph.from_edges(n=2 * k - i, k=k, edges=[e1, e2],
                                 meta={"pattern": pat.label})


@dataclass(frozen=True)
class QEmbedding:
    """A certified copy: edge_ids[i] must equal A u (B - {B[i]}) u {C[i]}."""

    edge_ids: tuple[int, ...]
    A: Edge
    B: tuple[int, ...]
    C: tuple[int, ...]

    def validate(self, host: Hypergraph) -> None:
        r = len(self.edge_ids)
        if r < 2 or len(self.B) != r or len(self.C) != r:
            raise StructureError("embedding arity mismatch")
        if len(self.A) + r != host.k:
            raise StructureError("embedding core size inconsistent with uniformity")
        seen = set(self.A) | set(self.B) | set(self.C)
        if len(seen) != len(self.A) + 2 * r:
            raise StructureError("A, B, C are not pairwise disjoint")
        if len(set(self.edge_ids)) != r:
            raise StructureError("repeated edge id")
        for i, eid in enumerate(self.edge_ids):
            if not 0 <= eid < host.m:
                raise StructureError(f"edge id {eid} out of range")
            want = tuple(sorted(self.A + self.B[:i] + self.B[i + 1:] + (self.C[i],)))
            if host.edges[eid] != want:
                raise StructureError(
                    f"edge {eid} is {host.edges[eid]}, embedding demands {want}")

    def to_json(self) -> dict:
        k = len(self.A) + len(self.B)
        return {"pattern": f"Q:{k}:{len(self.B)}",
                "edges": list(self.edge_ids),
                "A": list(self.A), "B": list(self.B), "C": list(self.C)}


# ------------------------------------------------------- pair enumeration

def _mask_columns(h: Hypergraph) -> np.ndarray:
    """Edge bitmasks as (m, ceil(n/64)) uint64 for vectorized popcounts."""
    ncols = max(1, (h.n + 63) // 64)
    cols = np.empty((h.m, ncols), dtype=np.uint64)
    low = (1 << 64) - 1
    for i, msk in enumerate(h.masks):
        for c in range(ncols):
            cols[i, c] = (msk >> (64 * c)) & low
    return cols


def _overlap_pair_keys(h: Hypergraph, t: int) -> np.ndarray:
    """Sorted unique packed keys a*m+b (a < b) with |e_a & e_b| >= t, t >= 1.

    Groups edges by their t-subsets; edges meeting in >= t vertices share
    at least one group.  Group scanning is dict-based while the incidence
    count stays small, otherwise packed keys are sorted as one array.
    """
    m = h.m
    if m < 2:
        return np.empty(0, dtype=np.int64)
    n_sub = 1
    for j in range(t):
        n_sub = n_sub * (h.k - j) // (j + 1)
    incidence = m * n_sub
    bpv = max(1, (h.n - 1).bit_length())
    idbits = max(1, (m - 1).bit_length())
    fits = bpv * t + idbits <= 62

    if incidence > _DICT_INCIDENCE_CAP and fits:
        E = np.asarray(h.edges, dtype=np.int64)
        ids = np.arange(m, dtype=np.int64)
        chunks = []
        for ps in combinations(range(h.k), t):
            key = np.zeros(m, dtype=np.int64)
            for p in ps:
                key = (key << bpv) | E[:, p]
            chunks.append((key << idbits) | ids)
        arr = np.concatenate(chunks)
        chunks = None
        arr.sort()
        hi = arr >> idbits
        step = np.flatnonzero(hi[1:] != hi[:-1]) + 1
        starts = np.concatenate([[0], step])
        ends = np.concatenate([step, [len(arr)]])
        lens = ends - starts
        lo = arr & ((1 << idbits) - 1)
        out = []
        two = np.flatnonzero(lens == 2)
        if len(two):
            s = starts[two]
            out.append(lo[s] * m + lo[s + 1])  # within a run ids ascend
        for gi in np.flatnonzero(lens > 2):
            g = lo[starts[gi]:ends[gi]]
            for x, y in combinations(g.tolist(), 2):
                out.append(np.array([x * m + y], dtype=np.int64))
        if not out:
            return np.empty(0, dtype=np.int64)
        keys = np.unique(np.concatenate(out))
        return keys

    groups: dict = {}
    absent = object()
    for idx, e in enumerate(h.edges):
        for sub in combinations(e, t):
            g = groups.get(sub, absent)
            if g is absent:
                groups[sub] = idx
            elif isinstance(g, int):
                groups[sub] = [g, idx]
            else:
                g.append(idx)
    pairs = set()
    for g in groups.values():
        if isinstance(g, list):
            for x, y in combinations(g, 2):
                pairs.add(x * m + y)
    if not pairs:
        return np.empty(0, dtype=np.int64)
    keys = np.fromiter(pairs, dtype=np.int64, count=len(pairs))
    keys.sort()
    return keys


def _tight_pairs(h: Hypergraph, t: int) -> tuple[np.ndarray, np.ndarray]:
    """Edge-id pairs (a, b), a < b, with intersection size exactly t >= 1,
    sorted lexicographically."""
    keys = _overlap_pair_keys(h, t)
    if not len(keys):
        return keys, keys
    a = keys // h.m
    b = keys % h.m
    cols = _mask_columns(h)
    inter = np.zeros(len(a), dtype=np.uint64)
    for c in range(cols.shape[1]):
        inter += np.bitwise_count(cols[a, c] & cols[b, c])
    sel = inter == t
    return a[sel], b[sel]


# ---------------------------------------------------------------- decoding

def _decompose(h: Hypergraph, ids: tuple[int, ...], pat: QPattern) -> Optional[QEmbedding]:
    """Try to read ids as a Q(k, r) copy; None when the structure fails."""
    k, r = pat.k, pat.r
    masks = h.masks
    inter = masks[ids[0]]
    union = 0
    for i in ids:
        inter &= masks[i]
        union |= masks[i]
    if inter.bit_count() != k - r or union.bit_count() != k + r:
        return None

    if r == 2:
        # both non-core vertices of each edge have coverage 1; the pairing
        # (which is b, which is c) is a labeling choice, fixed as min -> c
        p0 = bits_of(masks[ids[0]] & ~inter)
        p1 = bits_of(masks[ids[1]] & ~inter)
        emb = QEmbedding(edge_ids=tuple(ids), A=bits_of(inter),
                         B=(p1[1], p0[1]), C=(p0[0], p1[0]))
        try:
            emb.validate(h)
        except StructureError as exc:
            raise InvariantViolation(f"r=2 decomposition failed validation: {exc}")
        return emb

    b_mask = 0
    c_mask = 0
    for v in bits_of(union & ~inter):
        cover = sum(1 for i in ids if masks[i] >> v & 1)
        if cover == r - 1:
            b_mask |= 1 << v
        elif cover == 1:
            c_mask |= 1 << v
        else:
            return None
    if b_mask.bit_count() != r or c_mask.bit_count() != r:
        return None
    B = []
    C = []
    for i in ids:
        miss = b_mask & ~masks[i]
        hit = c_mask & masks[i]
        if miss.bit_count() != 1 or hit.bit_count() != 1:
            return None
        if masks[i] != (inter | (b_mask ^ miss) | hit):
            return None
        B.append(miss.bit_length() - 1)
        C.append(hit.bit_length() - 1)
    if len(set(B)) != r:
        return None
    emb = QEmbedding(edge_ids=tuple(ids), A=bits_of(inter), B=tuple(B), C=tuple(C))
    try:
        emb.validate(h)
    except StructureError as exc:
        raise InvariantViolation(f"decomposition failed validation: {exc}")
    return emb


def _triangle_join(a: np.ndarray, b: np.ndarray, m: int):
    """Yield (x, y, z), x<y<z, with all three pairs present, in lex order.

    Wedge join on the middle edge: (x,y) and (y,z) rows are matched, then
    (x,z) membership is a binary search in the packed key array.  Chunked
    so the materialized wedge block stays bounded.
    """
    keys = a * m + b
    cnt_out = np.bincount(a, minlength=m).astype(np.int64)
    out_start = np.zeros(m + 1, dtype=np.int64)
    np.cumsum(cnt_out, out=out_start[1:])
    rep = cnt_out[b]
    total = int(rep.sum())
    if total == 0:
        return
    crep = np.cumsum(rep)
    i0 = 0
    while i0 < len(a):
        floor = crep[i0 - 1] if i0 else 0
        i1 = int(np.searchsorted(crep, floor + _JOIN_CHUNK)) + 1
        i1 = min(i1, len(a))
        r_blk = rep[i0:i1]
        tot = int(r_blk.sum())
        if tot == 0:
            i0 = i1
            continue
        xs = np.repeat(a[i0:i1], r_blk)
        base = np.repeat(out_start[b[i0:i1]], r_blk)
        cum = np.zeros(len(r_blk), dtype=np.int64)
        np.cumsum(r_blk[:-1], out=cum[1:])
        offs = np.arange(tot, dtype=np.int64) - np.repeat(cum, r_blk)
        zs = b[base + offs]
        q = xs * m + zs
        pos = np.searchsorted(keys, q)
        pos_c = np.minimum(pos, len(keys) - 1)
        hit = keys[pos_c] == q
        if hit.any():
            ys = np.repeat(b[i0:i1], r_blk)
            for x, y, z in zip(xs[hit].tolist(), ys[hit].tolist(), zs[hit].tolist()):
                yield x, y, z
        i0 = i1


def find_Q_copy(h: Hypergraph, pat: QPattern) -> Optional[QEmbedding]:
    """Lexicographically first Q(k, r) embedding in h, or None iff h is free."""
    if h.k != pat.k:
        raise ParameterError(f"host is {h.k}-uniform, pattern wants {pat.k}")
    k, r = pat.k, pat.r
    if h.m < r:
        return None
    a, b = _tight_pairs(h, k - 2)
    if not len(a):
        return None
    masks = h.masks
    m = h.m

    if r == 2:
        # any tight pair decomposes; pairs arrive lex sorted
        return _decompose(h, (int(a[0]), int(b[0])), pat)

    if r == 3 and len(a) > _TRIANGLE_JOIN_MIN_PAIRS:
        for x, y, z in _triangle_join(a, b, m):
            emb = _decompose(h, (x, y, z), pat)
            if emb is not None:
                return emb
        return None

    adj: list[list[int]] = [[] for _ in range(m)]
    for x, y in zip(a.tolist(), b.tolist()):
        adj[x].append(y)
        adj[y].append(x)
    for row in adj:
        row.sort()
    pair_keys = set((a * m + b).tolist())

    def extend(ids: list[int], inter: int, union: int, cand: list[int]):
        d = len(ids) + 1
        for pos, nxt in enumerate(cand):
            ni = inter & masks[nxt]
            if ni.bit_count() != k - d:
                continue
            nu = union | masks[nxt]
            if nu.bit_count() != k + d:
                continue
            if d == r:
                emb = _decompose(h, tuple(ids) + (nxt,), pat)
                if emb is not None:
                    return emb
                continue
            ncand = [c for c in cand[pos + 1:] if nxt * m + c in pair_keys]
            if len(ncand) < r - d:
                continue
            got = extend(ids + [nxt], ni, nu, ncand)
            if got is not None:
                return got
        return None

    for start in range(m):
        cand = [c for c in adj[start] if c > start]
        if len(cand) < r - 1:
            continue
        got = extend([start], masks[start], masks[start], cand)
        if got is not None:
            return got
    return None


def find_I_copy(h: Hypergraph, pat: IPattern) -> Optional[tuple[int, int]]:
    """Lexicographically first edge-id pair meeting in exactly i vertices."""
    if h.k != pat.k:
        raise ParameterError(f"host is {h.k}-uniform, pattern wants {pat.k}")
    i = pat.i
    if h.m <= 600 or i == 0:
        masks = h.masks
        for x in range(h.m):
            mx = masks[x]
            for y in range(x + 1, h.m):
                if (mx & masks[y]).bit_count() == i:
                    return x, y
        return None
    a, b = _tight_pairs(h, i)
    if len(a):
        return int(a[0]), int(b[0])
    return None


# ------------------------------------------------------------------ D(e)

@dataclass(frozen=True)
class DSet:
    """Part indices where the edge admits a one-vertex swap to another edge."""

    edge_id: int
    D: tuple[int, ...]


def _check_transversal(e: Edge, pidx: dict[int, int], k: int) -> list[int]:
    try:
        parts = [pidx[v] for v in e]
    except KeyError as exc:
        raise StructureError(f"vertex {exc.args[0]} not covered by the partition")
    if len(set(parts)) != k:
        raise StructureError(f"edge {e} is not transversal")
    return parts


def d_set(h: Hypergraph, P: Partition, edge_id: int) -> DSet:
    """D(e) by direct definition: scan all other edges for one-part swaps."""
    if P.k != h.k:
        raise StructureError(f"partition has {P.k} classes, hypergraph is {h.k}-uniform")
    if not 0 <= edge_id < h.m:
        raise ParameterError(f"edge id {edge_id} out of range")
    pidx = P.part_index()
    _check_transversal(h.edges[edge_id], pidx, h.k)
    em = h.masks[edge_id]
    D = set()
    for fid, fm in enumerate(h.masks):
        if fid == edge_id:
            continue
        x = em ^ fm
        if x.bit_count() == 2:
            u, w = bits_of(x)
            pu = pidx.get(u)
            if pu is not None and pu == pidx.get(w):
                D.add(pu)
    return DSet(edge_id=edge_id, D=tuple(sorted(D)))


def _contiguous_bounds(P: Partition) -> Optional[list[tuple[int, int]]]:
    bounds = []
    at = 0
    for part in P.parts:
        if tuple(part) != tuple(range(at, at + len(part))):
            return None
        bounds.append((at, at + len(part)))
        at += len(part)
    return bounds


def all_d_sets(h: Hypergraph, P: Partition) -> list[DSet]:
    """D(e) for every edge at once, by grouping edges on (part, edge - part).

    Two transversal edges differ only inside part j exactly when they land
    in the same group for j, so any group of size >= 2 marks j for all its
    members.  For contiguous partitions the grouping runs per part on
    packed integer arrays; otherwise a dict over tuples does the same.
    """
    if P.k != h.k:
        raise StructureError(f"partition has {P.k} classes, hypergraph is {h.k}-uniform")
    k = h.k
    if h.m == 0:
        return []
    bounds = _contiguous_bounds(P)
    bpv = max(1, (h.n - 1).bit_length())
    idbits = max(1, (h.m - 1).bit_length())
    D: list[set[int]] = [set() for _ in range(h.m)]

    if bounds is not None and bpv * (k - 1) + idbits <= 62 and h.m > 1000:
        E = np.asarray(h.edges, dtype=np.int64)
        for j, (lo_b, hi_b) in enumerate(bounds):
            if not (np.all(E[:, j] >= lo_b) and np.all(E[:, j] < hi_b)):
                # some edge is not transversal; find it for the error message
                for e in h.edges:
                    _check_transversal(e, P.part_index(), k)
                raise StructureError("partition bounds violated")
        ids = np.arange(h.m, dtype=np.int64)
        for j in range(k):
            key = np.zeros(h.m, dtype=np.int64)
            for p in range(k):
                if p != j:
                    key = (key << bpv) | E[:, p]
            arr = (key << idbits) | ids
            arr.sort()
            hi = arr >> idbits
            step = np.flatnonzero(hi[1:] != hi[:-1]) + 1
            starts = np.concatenate([[0], step])
            ends = np.concatenate([step, [len(arr)]])
            lo = arr & ((1 << idbits) - 1)
            for gi in np.flatnonzero(ends - starts > 1):
                for eid in lo[starts[gi]:ends[gi]].tolist():
                    D[eid].add(j)
        return [DSet(edge_id=i, D=tuple(sorted(D[i]))) for i in range(h.m)]

    pidx = P.part_index()
    groups: dict = {}
    for idx, e in enumerate(h.edges):
        parts = _check_transversal(e, pidx, k)
        for j in parts:
            rest = tuple(v for v in e if pidx[v] != j)
            groups.setdefault((j, rest), []).append(idx)
    for (j, _), g in groups.items():
        if len(g) > 1:
            for eid in g:
                D[eid].add(j)
    return [DSet(edge_id=i, D=tuple(sorted(D[i]))) for i in range(h.m)]


# ----------------------------------------------------------------- audit

@dataclass(frozen=True)
class AuditReport:
    """Unique-containment and clique-decomposition audit of the (k-1)-shadow."""

    ok: bool
    unique_containment: bool
    multi_covered: tuple[Edge, ...]
    cliques: tuple[Edge, ...]
    extra_cliques: tuple[Edge, ...]

    def to_json(self) -> dict:
        return {"pass": self.ok,
                "unique_containment": self.unique_containment,
                "multi_covered": [list(f) for f in self.multi_covered],
                "extra_cliques": [list(w) for w in self.extra_cliques],
                "clique_count": len(self.cliques)}


def shadow_clique_audit(h: Hypergraph) -> AuditReport:
    """Check that every (k-1)-shadow element lies in exactly one edge and
    that the k-sets spanning a complete (k-1)-shadow are exactly the edges.

    Candidate cliques are unions f u {v} of a shadow element and a larger
    vertex: every clique contains its own max-removed prefix, so each is
    met exactly once and the work is bounded by |shadow| * n.
    """
    if h.k < 2:
        raise ParameterError("audit needs k >= 2")
    counts: Counter = Counter()
    for e in h.edges:
        counts.update(combinations(e, h.k - 1))
    multi = tuple(sorted(f for f, c in counts.items() if c > 1))
    edge_set = set(h.edges)
    cliques: list[Edge] = []
    for f in sorted(counts):
        for v in range(f[-1] + 1, h.n):
            for j in range(h.k - 1):
                sub = f[:j] + f[j + 1:] + (v,)
                if sub not in counts:
                    break
            else:
                cliques.append(f + (v,))
    extra = tuple(w for w in cliques if w not in edge_set)
    ok = not multi and set(cliques) == edge_set
    return AuditReport(ok=ok, unique_containment=not multi, multi_covered=multi,
                       cliques=tuple(cliques), extra_cliques=extra)
