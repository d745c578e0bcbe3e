"""Constructions of dense hypergraphs avoiding the target patterns.

Three families, plus the star family used as a baseline:

* modular: k parts of size p; an edge picks one residue per part
  subject to two linear constraints mod p, with the weighted sum
  landing in a k-good set S.  Two residues are forced by the rest,
  so the family has exactly |S| * p^(k-2) edges.  Differences of the
  part weights feed the k-good property, which is what blocks the
  short linear relations a small pattern copy would induce.

* split: the vertex set halves into X and Y; edges are a packing
  block on X (intersections kept below r-2) joined to an arbitrary
  (k-r+1)-set from Y.

* lift: a certified base layer (no tight pair with common tip, no
  full-overlap pattern) crossed with all (r-1)-subsets of a fresh
  vertex set.

Constructors only assemble and count; pattern-freeness of the output
is checked by callers (or the CLI's --verify) through find_Q_copy.
Every constructor hard-asserts its edge count, so a silent collision
in the index algebra cannot pass unnoticed.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from math import comb
from typing import Iterable, Optional, Union

from .errors import BaseNotFreeError, InvariantViolation, ParameterError
from .hypergraphs import Hypergraph
from .numbers import GoodSet, Packing, _is_prime, greedy_packing
from .patterns import IPattern, QPattern, find_I_copy, find_Q_copy


@dataclass(frozen=True)
class ModularConfig:
    """Parameters of the modular family.

    The weight vector m must be pairwise distinct mod p; the first two
    weights solve for the forced coordinates.  Defaults are the
    identity weights 1..k with both constraint levels at 0.
    """

    k: int
    p: int
    S: GoodSet
    alpha: int = 0
    beta: int = 0
    m: tuple[int, ...] = ()

    def __post_init__(self):
        if self.k < 3:
            raise ParameterError(f"modular construction needs k >= 3, got {self.k}")
        if not _is_prime(self.p) or self.p <= self.k:
            raise ParameterError(f"need a prime p > k, got p={self.p} k={self.k}")
        if not isinstance(self.S, GoodSet):
            object.__setattr__(self, "S",
                               GoodSet(p=self.p, k=self.k,
                                       S=tuple(sorted(set(self.S))),
                                       provenance="user"))
        if self.S.p != self.p or self.S.k != self.k:
            raise ParameterError(
                f"good set is for (p={self.S.p}, k={self.S.k}), "
                f"config wants (p={self.p}, k={self.k})")
        if not self.m:
            object.__setattr__(self, "m", tuple(range(1, self.k + 1)))
        if len(self.m) != self.k:
            raise ParameterError(f"need {self.k} weights, got {len(self.m)}")
        if len({mi % self.p for mi in self.m}) != self.k:
            raise ParameterError("weights must be pairwise distinct mod p")
        object.__setattr__(self, "alpha", self.alpha % self.p)
        object.__setattr__(self, "beta", self.beta % self.p)


def construct_modular(cfg: ModularConfig) -> Hypergraph:
    """The k-partite modular family on k*p vertices.

    Vertex part*p + j stands for residue j in part `part` (0-indexed).
    Coordinates x_3..x_k and the target value s range freely; the two
    constraint equations then force x_1 and x_2.
    """
    k, p, m = cfg.k, cfg.p, cfg.m
    inv12 = pow((m[0] - m[1]) % p, p - 2, p)
    edges = []
    for rest in product(range(p), repeat=k - 2):
        r1_base = -sum(rest)
        r2_base = -sum(mi * xi for mi, xi in zip(m[2:], rest))
        for s in cfg.S.S:
            r1 = (cfg.alpha + r1_base) % p
            r2 = (cfg.beta + s + r2_base) % p
            x1 = (r2 - m[1] * r1) * inv12 % p
            x2 = (r1 - x1) % p
            edges.append((x1, p + x2)
                         + tuple((i + 2) * p + xi for i, xi in enumerate(rest)))
    want = cfg.S.size * p ** (k - 2)
    edges = sorted(set(edges))
    if len(edges) != want:
        raise InvariantViolation(
            f"modular family has {len(edges)} edges, expected {want}")
    meta = {"construction": "modular",
            "k": k, "p": p, "alpha": cfg.alpha, "beta": cfg.beta,
            "m": list(m), "S": list(cfg.S.S),
            "goodset_provenance": cfg.S.provenance,
            "layout": {"parts": k, "part_size": p,
                       "rule": "vertex = part*p + residue"},
            "freeness_target": f"Q:{k}:3"}
    return Hypergraph(n=k * p, k=k, edges=tuple(edges), meta=meta)


def modular_membership(cfg: ModularConfig, xs: Iterable[int]) -> Optional[int]:
    """The target value s that residues xs would need, or None.

    None means the sum constraint fails or the weighted sum does not
    land in S; otherwise the edge with these part-residues exists and
    carries value s.
    """
    xs = tuple(xs)
    if len(xs) != cfg.k:
        raise ParameterError(f"need {cfg.k} residues, got {len(xs)}")
    p = cfg.p
    if sum(xs) % p != cfg.alpha:
        return None
    s = (sum(mi * xi for mi, xi in zip(cfg.m, xs)) - cfg.beta) % p
    return s if s in set(cfg.S.S) else None


@dataclass(frozen=True)
class SplitConfig:
    n: int
    k: int
    r: int

    def __post_init__(self):
        if not 3 <= self.r <= self.k <= 2 * self.r - 2:
            raise ParameterError(
                f"need 3 <= r <= k <= 2r-2, got k={self.k} r={self.r}")
        if self.n < 2 * self.k:
            raise ParameterError(f"need n >= 2k = {2 * self.k}, got {self.n}")


def construct_split(cfg: SplitConfig) -> Hypergraph:
    """Packing block on the low half joined to free sets from the top.

    X is the first floor(n/2) vertices and carries a maximal
    (|X|, r-1, r-2)-packing; the other k-r+1 vertices of an edge are
    an arbitrary subset of Y.  Any two edges sharing their X-part are
    free to overlap in Y, while distinct X-parts overlap below r-2.
    """
    n, k, r = cfg.n, cfg.k, cfg.r
    half = n // 2
    pack = greedy_packing(half, r - 1, r - 2)
    ysets = list(combinations(range(half, n), k - r + 1))
    edges = tuple(e1 + e2 for e1 in pack.edges for e2 in ysets)
    want = pack.size * comb(n - half, k - r + 1)
    if len(edges) != want:
        raise InvariantViolation(
            f"split family has {len(edges)} edges, expected {want}")
    meta = {"construction": "split", "n": n, "k": k, "r": r,
            "X_size": half, "packing_size": pack.size,
            "freeness_target": f"Q:{k}:{r}"}
    return Hypergraph(n=n, k=k, edges=edges, meta=meta)


@dataclass(frozen=True)
class LiftConfig:
    """Base layer crossed with a fresh part; k is pinned to 2r-1."""

    r: int
    base: Hypergraph
    n2: int
    k: int = 0

    def __post_init__(self):
        if self.r < 3:
            raise ParameterError(f"lift needs r >= 3, got {self.r}")
        if self.k == 0:
            object.__setattr__(self, "k", 2 * self.r - 1)
        if self.k != 2 * self.r - 1:
            raise ParameterError(f"lift uniformity is 2r-1 = {2 * self.r - 1}")
        if self.base.k != self.r:
            raise ParameterError(
                f"base must be {self.r}-uniform, got {self.base.k}")
        if self.n2 < self.r - 1:
            raise ParameterError(f"need n2 >= r-1 = {self.r - 1}, got {self.n2}")


def construct_lift(cfg: LiftConfig) -> Hypergraph:
    """Certified base edges extended by every (r-1)-set of new vertices.

    The base must avoid both the full-overlap pattern on r edges and
    tight pairs with a common tip; otherwise the certificate is raised
    rather than silently building a bad family.
    """
    r, base, n2 = cfg.r, cfg.base, cfg.n2
    bad_q = find_Q_copy(base, QPattern(r, r))
    if bad_q is not None:
        raise BaseNotFreeError("base layer contains a full-overlap copy",
                               certificate=bad_q)
    bad_i = find_I_copy(base, IPattern(r, r - 1))
    if bad_i is not None:
        raise BaseNotFreeError("base layer contains a tight pair", certificate=bad_i)
    lifted = []
    for e in base.edges:
        for t in combinations(range(n2), r - 1):
            lifted.append(e + tuple(base.n + v for v in t))
    want = base.m * comb(n2, r - 1)
    if len(set(lifted)) != want:
        raise InvariantViolation(
            f"lift has {len(set(lifted))} edges, expected {want}")
    meta = {"construction": "lift", "r": r, "k": cfg.k,
            "base_n": base.n, "base_m": base.m, "n2": n2,
            "freeness_target": f"Q:{cfg.k}:3"}
    return Hypergraph(n=base.n + n2, k=cfg.k, edges=tuple(sorted(lifted)),
                      meta=meta)


def centered_family(n: int, k: int) -> Hypergraph:
    """All k-sets through vertex 0: the C(n-1, k-1) star."""
    if not n > k >= 2:
        raise ParameterError(f"need n > k >= 2, got n={n} k={k}")
    edges = tuple((0,) + rest for rest in combinations(range(1, n), k - 1))
    meta = {"construction": "star", "n": n, "k": k,
            "freeness_target": f"Q:{k}:{k}"}
    return Hypergraph(n=n, k=k, edges=edges, meta=meta)


def prime_select(n: int, k: int) -> int:
    """Largest prime p with k < p <= n // k, for a modular family on
    at most n vertices."""
    if k < 2 or n < 1:
        raise ParameterError(f"need k >= 2 and n >= 1, got n={n} k={k}")
    for p in range(n // k, k, -1):
        if _is_prime(p):
            return p
    raise ParameterError(f"no prime in ({k}, {n // k}] for n={n}, k={k}")
