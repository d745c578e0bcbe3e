"""Exact Turán-type search: the most edges an n-vertex k-uniform
hypergraph can carry while avoiding every member of a forbidden family.

The search is an include-first DFS over candidate edges in lex order.
Freeness is maintained incrementally: each family member gets a checker
that answers "does adding this edge complete a copy", so a node costs
far less than re-scanning the whole board.  Because any copy has a
latest edge in insertion order, anchored checks are complete.

Symmetry: relabeling vertices permutes candidate edges, so a nonempty
optimum can always be assumed to contain the lex-first candidate.  The
search forces it and halves the tree.  Include-first order plus
recording on strict improvement makes the final witness the
lexicographically least optimum.

Budgets do not raise here: a search that runs out of nodes returns its
best lower bound with budget_hit set, and downstream reports mark such
values as uncertified.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, permutations
from math import comb
from types import SimpleNamespace
from typing import Iterable, Optional, Sequence

from .errors import InvariantViolation, ParameterError
from .hypergraphs import Hypergraph, mask_of
from .numbers import behrend_good_set, greedy_packing, max_good_set
from .constructions import prime_select
from .patterns import (IPattern, QPattern, _decompose, find_I_copy,
                       find_Q_copy, generate_Q)

DEFAULT_SEARCH_BUDGET = 5_000_000


@dataclass(frozen=True)
class ForbiddenFamily:
    """k-uniform patterns to avoid, deduplicated by edge set.

    A label of the form bes:k:v:e switches the search to the span rule
    (any e edges on at most v vertices) instead of per-member matching;
    bes_family builds such families with members attached for reference.
    """

    k: int
    members: tuple[Hypergraph, ...]
    label: str = ""

    def __post_init__(self):
        if not self.members:
            raise ParameterError("forbidden family needs at least one member")
        seen = set()
        kept = []
        for h in self.members:
            if h.k != self.k:
                raise ParameterError(
                    f"member uniformity {h.k} does not match family k={self.k}")
            if h.edges not in seen:
                seen.add(h.edges)
                kept.append(h)
        object.__setattr__(self, "members", tuple(kept))
        if not self.label:
            names = [(h.meta or {}).get("pattern", f"member{i}")
                     for i, h in enumerate(kept)]
            object.__setattr__(self, "label", "+".join(names))


@dataclass(frozen=True)
class SearchResult:
    n: int
    k: int
    family: str
    max_edges: int
    witness: tuple[tuple[int, ...], ...]
    nodes: int
    budget_hit: bool

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "family": self.family,
                "max_edges": self.max_edges,
                "witness": [list(e) for e in self.witness],
                "nodes": self.nodes, "budget_hit": self.budget_hit}


@dataclass(frozen=True)
class BESParams:
    k: int
    v: int
    e: int

    def __post_init__(self):
        if self.e < 2:
            raise ParameterError(f"need at least 2 edges, got {self.e}")
        if self.v < self.k:
            raise ParameterError(f"span bound {self.v} below uniformity {self.k}")


# --------------------------------------------------------- checkers

class _SingleEdge:
    """Pattern is one bare edge: nothing can be added."""

    def __init__(self, k):
        pass

    def add(self, edge, mask):
        return False

    def pop(self):
        pass


class _IPair:
    """Two edges meeting in exactly i vertices."""

    def __init__(self, k, i):
        self.i = i
        self.masks = []

    def add(self, edge, mask):
        i = self.i
        for m in self.masks:
            if (m & mask).bit_count() == i:
                return False
        self.masks.append(mask)
        return True

    def pop(self):
        self.masks.pop()


class _QCheck:
    """Copies of the canonical r-edge pattern anchored at the new edge.

    Edges of a copy are pairwise tight and satisfy the exact overlap
    profile (d of them meet in k-d and span k+d), so the DFS walks
    tight neighbor sets under those prunes and hands full id-sets to
    the structural decomposition for the final verdict.
    """

    def __init__(self, k, r):
        self.k = k
        self.r = r
        self.pat = QPattern(k, r)
        self.edges = []
        self.masks = []

    def add(self, edge, mask):
        self.edges.append(edge)
        self.masks.append(mask)
        if len(self.masks) >= self.r and self._copy_at_last():
            self.edges.pop()
            self.masks.pop()
            return False
        return True

    def pop(self):
        self.edges.pop()
        self.masks.pop()

    def _copy_at_last(self):
        k, r, masks = self.k, self.r, self.masks
        new = len(masks) - 1
        nm = masks[new]
        tight = [j for j in range(new)
                 if (masks[j] & nm).bit_count() == k - 2]
        if len(tight) < r - 1:
            return False
        host = SimpleNamespace(n=0, k=k, m=len(self.edges),
                               edges=self.edges, masks=masks)

        def dfs(ids, inter, union, cand):
            d = len(ids)
            if d == r:
                return _decompose(host, tuple(sorted(ids)), self.pat) is not None
            for pos, c in enumerate(cand):
                ni = inter & masks[c]
                if ni.bit_count() != k - d - 1:
                    continue
                nu = union | masks[c]
                if nu.bit_count() != k + d + 1:
                    continue
                ncand = [c2 for c2 in cand[pos + 1:]
                         if (masks[c2] & masks[c]).bit_count() == k - 2]
                if d + 1 < r and len(ncand) < r - d - 1:
                    continue
                if dfs(ids + [c], ni, nu, ncand):
                    return True
            return False

        return dfs([new], nm, nm, tight)


class _SpanRule:
    """Any e edges spanning at most v vertices."""

    def __init__(self, k, v, e):
        self.v = v
        self.e = e
        self.masks = []

    def add(self, edge, mask):
        if len(self.masks) >= self.e - 1 and self._hit(mask):
            return False
        self.masks.append(mask)
        return True

    def pop(self):
        self.masks.pop()

    def _hit(self, mask):
        v, e, masks = self.v, self.e, self.masks

        def dfs(start, union, need):
            if union.bit_count() > v:
                return False
            if need == 0:
                return True
            for j in range(start, len(masks)):
                if dfs(j + 1, union | masks[j], need - 1):
                    return True
            return False

        return dfs(0, mask, e - 1)


class _Generic:
    """Backtracking embedding of an arbitrary pattern, anchored at the
    newest edge.  Distinct pattern edges land on distinct host edges
    automatically since the vertex map is injective."""

    def __init__(self, k, member: Hypergraph):
        self.k = k
        self.pedges = member.edges
        self.edges = []

    def add(self, edge, mask):
        self.edges.append(edge)
        if self._copy_at_last():
            self.edges.pop()
            return False
        return True

    def pop(self):
        self.edges.pop()

    def _copy_at_last(self):
        new = self.edges[-1]
        for a in range(len(self.pedges)):
            for phi in _edge_maps({}, self.pedges[a], new):
                rest = self.pedges[:a] + self.pedges[a + 1:]
                if self._extend(phi, list(rest)):
                    return True
        return False

    def _extend(self, phi, rest):
        if not rest:
            return True
        # most-constrained pattern edge first
        rest.sort(key=lambda pe: -sum(1 for x in pe if x in phi))
        pe = rest[0]
        for he in self.edges:
            for phi2 in _edge_maps(phi, pe, he):
                if self._extend(phi2, rest[1:]):
                    return True
        return False


def _edge_maps(phi, pe, he):
    """Extensions of the injective vertex map phi sending pattern edge
    pe onto host edge he."""
    hset = set(he)
    fixed = []
    free = []
    for x in pe:
        if x in phi:
            if phi[x] not in hset:
                return
            fixed.append(phi[x])
        else:
            free.append(x)
    used = set(phi.values())
    slots = [u for u in he if u not in fixed and u not in used]
    if len(slots) < len(free):
        return
    if len(fixed) + len(free) != len(pe) or len(set(fixed)) != len(fixed):
        return
    for perm in permutations(slots, len(free)):
        phi2 = dict(phi)
        for x, u in zip(free, perm):
            phi2[x] = u
        yield phi2


def _checker_for(k: int, member: Hypergraph):
    if member.m == 1:
        return _SingleEdge(k)
    if member.m == 2:
        i = len(set(member.edges[0]) & set(member.edges[1]))
        return _IPair(k, i)
    r = member.m
    if 2 <= r <= k and member.edges == generate_Q(k, r).edges:
        return _QCheck(k, r)
    return _Generic(k, member)


def _span_params(label: str) -> Optional[BESParams]:
    parts = label.split(":")
    if len(parts) != 4 or parts[0] != "bes":
        return None
    try:
        return BESParams(k=int(parts[1]), v=int(parts[2]), e=int(parts[3]))
    except ValueError:
        return None


def _build_checkers(fam: ForbiddenFamily):
    bp = _span_params(fam.label)
    if bp is not None:
        return [_SpanRule(fam.k, bp.v, bp.e)]
    return [_checker_for(fam.k, h) for h in fam.members]


class _CheckerStack:
    def __init__(self, checkers):
        self.checkers = checkers

    def push(self, edge, mask) -> bool:
        for ci, c in enumerate(self.checkers):
            if not c.add(edge, mask):
                for c2 in self.checkers[:ci]:
                    c2.pop()
                return False
        return True

    def pop(self):
        for c in self.checkers:
            c.pop()


# --------------------------------------------------------- certification

def _contains_member(h: Hypergraph, member: Hypergraph) -> bool:
    chk = _Generic(h.k, member)
    for e, mk in zip(h.edges, h.masks):
        if not chk.add(e, mk):
            return True
    return False


def _certify_free(h: Hypergraph, fam: ForbiddenFamily) -> None:
    """Independent full-board recheck of a search witness."""
    bp = _span_params(fam.label)
    if bp is not None:
        v, e = bp.v, bp.e
        for es in combinations(h.masks, e):
            u = 0
            for mk in es:
                u |= mk
            if u.bit_count() <= v:
                raise InvariantViolation("witness violates the span rule")
        return
    for member in fam.members:
        r = member.m
        if 2 <= r <= h.k and member.edges == generate_Q(h.k, r).edges:
            if find_Q_copy(h, QPattern(h.k, r)) is not None:
                raise InvariantViolation(f"witness contains Q:{h.k}:{r}")
        elif member.m == 2:
            i = len(set(member.edges[0]) & set(member.edges[1]))
            if find_I_copy(h, IPattern(h.k, i)) is not None:
                raise InvariantViolation(f"witness contains I:{h.k}:{i}")
        elif _contains_member(h, member):
            raise InvariantViolation("witness contains a forbidden member")


# --------------------------------------------------------- search

def ex_exact(n: int, k: int, fam: ForbiddenFamily,
             budget: int = DEFAULT_SEARCH_BUDGET,
             max_candidates: int = 64) -> SearchResult:
    """Exact extremal edge count on n vertices, with lex-least witness.

    Refuses boards with more than max_candidates candidate edges; the
    node budget instead degrades the answer to a flagged lower bound.
    """
    if k < 2 or n < k:
        raise ParameterError(f"need n >= k >= 2, got n={n} k={k}")
    if fam.k != k:
        raise ParameterError(f"family is {fam.k}-uniform, search wants {k}")
    nc = comb(n, k)
    if nc > max_candidates:
        raise ParameterError(
            f"{nc} candidate edges exceed the cap {max_candidates}")
    cands = list(combinations(range(n), k))
    cmasks = [mask_of(e) for e in cands]

    # greedy lower bound, which is also the first DFS leaf
    stack = _CheckerStack(_build_checkers(fam))
    greedy = []
    for i in range(nc):
        if stack.push(cands[i], cmasks[i]):
            greedy.append(i)
    for _ in greedy:
        stack.pop()

    best_size = len(greedy)
    best = tuple(greedy)
    nodes = 0
    budget_hit = False

    if best_size > 0:
        stack = _CheckerStack(_build_checkers(fam))
        chosen: list[int] = []

        def rec(next_idx: int):
            nonlocal best_size, best, nodes, budget_hit
            if budget_hit:
                return
            nodes += 1
            if nodes > budget:
                budget_hit = True
                return
            if len(chosen) > best_size:
                best_size = len(chosen)
                best = tuple(chosen)
            for i in range(next_idx, nc):
                if len(chosen) + (nc - i) <= best_size:
                    return
                if stack.push(cands[i], cmasks[i]):
                    chosen.append(i)
                    rec(i + 1)
                    chosen.pop()
                    stack.pop()
                if budget_hit:
                    return

        # a nonempty optimum can be relabeled to contain candidate 0,
        # and every optimum through 0 is lex-below any optimum without it
        if stack.push(cands[0], cmasks[0]):
            chosen.append(0)
            rec(1)
            chosen.pop()
            stack.pop()

    witness_edges = tuple(cands[i] for i in best)
    wh = Hypergraph(n=n, k=k, edges=witness_edges)
    _certify_free(wh, fam)
    if len(witness_edges) != best_size:
        raise InvariantViolation("witness size disagrees with the optimum")
    return SearchResult(n=n, k=k, family=fam.label, max_edges=best_size,
                        witness=witness_edges, nodes=nodes,
                        budget_hit=budget_hit)


# --------------------------------------------------------- bes families

def _iso_invariant(edges):
    verts = sorted({v for e in edges for v in e})
    deg = {}
    for e in edges:
        for v in e:
            deg[v] = deg.get(v, 0) + 1
    pair = sorted(len(set(a) & set(b))
                  for a, b in combinations(edges, 2))
    return (len(verts), tuple(sorted(deg.values())), tuple(pair))


def _isomorphic(e1, e2) -> bool:
    """Edge-set isomorphism by backtracking on the vertex map."""
    if _iso_invariant(e1) != _iso_invariant(e2):
        return False
    set2 = set(e2)
    verts1 = sorted({v for e in e1 for v in e})

    def deg_profile(edges, v):
        return tuple(sorted(len(e) for e in edges if v in e))

    verts2 = sorted({v for e in e2 for v in e})
    d1 = {v: sum(1 for e in e1 if v in e) for v in verts1}
    d2 = {v: sum(1 for e in e2 if v in e) for v in verts2}

    def rec(i, phi, used):
        if i == len(verts1):
            mapped = {tuple(sorted(phi[x] for x in e)) for e in e1}
            return mapped == set2
        x = verts1[i]
        for u in verts2:
            if u in used or d1[x] != d2[u]:
                continue
            phi[x] = u
            if rec(i + 1, phi, used | {u}):
                return True
            del phi[x]
        return False

    return rec(0, {}, set())


def bes_family(k: int, v: int, e: int) -> ForbiddenFamily:
    """All shapes of e distinct k-edges spanning at most v vertices,
    one representative per isomorphism class, labeled bes:k:v:e.

    Brute enumeration over a ground set of v vertices with invariant
    buckets for the deduplication; guarded to the small range where
    that is affordable.
    """
    bp = BESParams(k=k, v=v, e=e)
    if not 2 <= e <= 4:
        raise ParameterError(f"edge count {e} outside the supported 2..4")
    if not k <= v <= min(3 * k, 9):
        raise ParameterError(
            f"span bound {v} outside the supported {k}..{min(3 * k, 9)}")
    buckets: dict = {}
    reps = []
    for es in combinations(combinations(range(v), k), e):
        verts = sorted({x for ed in es for x in ed})
        remap = {x: i for i, x in enumerate(verts)}
        edges = tuple(sorted(tuple(sorted(remap[x] for x in ed)) for ed in es))
        inv = _iso_invariant(edges)
        bucket = buckets.setdefault(inv, [])
        if any(_isomorphic(edges, other) for other in bucket):
            continue
        bucket.append(edges)
        reps.append(Hypergraph(n=len(verts), k=k, edges=edges,
                               meta={"pattern": f"shape{len(reps)}"}))
    return ForbiddenFamily(k=k, members=tuple(reps), label=f"bes:{bp.k}:{bp.v}:{bp.e}")


# --------------------------------------------------------- reports

@dataclass(frozen=True)
class ChainRow:
    r: int
    value: int
    certified: bool


@dataclass(frozen=True)
class ChainReport:
    n: int
    k: int
    rows: tuple[ChainRow, ...]
    ok: bool

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "ok": self.ok,
                "rows": [{"r": r.r, "value": r.value,
                          "certified": r.certified} for r in self.rows]}


def monotone_chain_check(n: int, k: int,
                         budget: int = DEFAULT_SEARCH_BUDGET) -> ChainReport:
    """Extremal counts along r = 3..k must not decrease, since any r-1
    edges of an r-edge copy already form the next pattern down.

    Values that hit the budget are lower bounds only and are skipped
    by the comparison rather than failing it.
    """
    if k < 3:
        raise ParameterError(f"chain needs k >= 3, got {k}")
    rows = []
    for r in range(3, k + 1):
        fam = ForbiddenFamily(k=k, members=(generate_Q(k, r),))
        res = ex_exact(n, k, fam, budget=budget)
        rows.append(ChainRow(r=r, value=res.max_edges,
                             certified=not res.budget_hit))
    ok = True
    prev: Optional[int] = None
    for row in rows:
        if not row.certified:
            prev = None
            continue
        if prev is not None and row.value < prev:
            ok = False
        prev = row.value
    return ChainReport(n=n, k=k, rows=tuple(rows), ok=ok)


@dataclass(frozen=True)
class TrendRow:
    n: int
    edges: int
    ratio: Fraction
    certified: bool


def density_trend(k: int, fam: ForbiddenFamily, n_range: Sequence[int],
                  budget: int = DEFAULT_SEARCH_BUDGET) -> list[TrendRow]:
    """Extremal density ex(n)/C(n,k) along increasing n.

    The averaged restriction of an extremal board to n-1 vertices keeps
    the density, so certified values must be nonincreasing; an increase
    is a solver bug and raises.
    """
    ns = list(n_range)
    if ns != sorted(ns) or len(set(ns)) != len(ns):
        raise ParameterError("n_range must be strictly increasing")
    rows = []
    prev: Optional[Fraction] = None
    for n in ns:
        res = ex_exact(n, k, fam, budget=budget)
        ratio = Fraction(res.max_edges, comb(n, k))
        certified = not res.budget_hit
        if certified and prev is not None and ratio > prev:
            raise InvariantViolation(
                f"density rose from {prev} to {ratio} at n={n}")
        if certified:
            prev = ratio
        rows.append(TrendRow(n=n, edges=res.max_edges, ratio=ratio,
                             certified=certified))
    return rows


@dataclass(frozen=True)
class GrowthRow:
    n: int
    k: int
    param: int
    edges: int
    reference: int


GROWTH_CSV_HEADER = "n,k,param,edges,reference"


def growth_table(kind: str, k: int, ns: Sequence[int],
                 r: int = 0) -> list[GrowthRow]:
    """Edge counts of a construction family against the n^(k-1) mark.

    modular rows pick the largest usable prime for each n and report
    the family on k*p vertices; split rows need r; star rows are the
    exact C(n-1, k-1) baseline.
    """
    rows = []
    if kind == "modular":
        for n in ns:
            p = prime_select(n, k)
            S = max_good_set(p, k) if p <= 17 else behrend_good_set(p, k)
            na = k * p
            rows.append(GrowthRow(n=na, k=k, param=p,
                                  edges=S.size * p ** (k - 2),
                                  reference=na ** (k - 1)))
    elif kind == "split":
        if not 3 <= r <= k <= 2 * r - 2:
            raise ParameterError(f"split table needs 3 <= r <= k <= 2r-2")
        for n in ns:
            half = n // 2
            pack = greedy_packing(half, r - 1, r - 2)
            edges = pack.size * comb(n - half, k - r + 1)
            rows.append(GrowthRow(n=n, k=k, param=r, edges=edges,
                                  reference=n ** (k - 1)))
    elif kind == "star":
        for n in ns:
            rows.append(GrowthRow(n=n, k=k, param=0,
                                  edges=comb(n - 1, k - 1),
                                  reference=n ** (k - 1)))
    else:
        raise ParameterError(f"unknown growth kind {kind!r}")
    return rows


def growth_csv(rows: Iterable[GrowthRow]) -> str:
    lines = [GROWTH_CSV_HEADER]
    for row in rows:
        lines.append(f"{row.n},{row.k},{row.param},{row.edges},{row.reference}")
    return "\n".join(lines) + "\n"
