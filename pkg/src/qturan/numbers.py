"""Number-theoretic and design-theoretic ingredients: k-good subsets
of Z_p, progression-free sets, and (n, r, t)-packings.

A set S in Z_p is k-good when every relation m1+m2+m3 = 0,
m1*s1 + m2*s2 + m3*s3 = 0 (mod p) with coefficients drawn from the
residues of +-{1..k} forces s1 = s2 = s3.  The verifier iterates
coefficient pairs (the third is determined mod p and membership-tested
on residues) and solves for s3 by modular inverse, so the cost is
O(k^2 |S|^2) instead of the naive cube.

The constructive lower bound is a digit-sphere set: integers whose
base-b digits are small and lie on a sum-of-squares sphere.  When the
base is large enough relative to k and the digit bound, the weighted
relations can neither carry between digit columns nor wrap mod p, and
a sphere contains no three-term affine relation; the safe base for
that argument is 4k(M-1)+1 with b^d <= 2p.  Since those conditions
are sufficient but not necessary, the default policy scans a small
parameter grid and keeps the best candidate that the verifier
actually certifies; the chosen policy is recorded in metadata.
Every returned set passes is_k_good, whatever the policy.

All exact searches are lexicographic include-first branch-and-bound:
the first optimum found is the lexicographically least one, and a
node budget turns runaway instances into a loud BudgetError.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb, isqrt
from typing import Iterable, Mapping, Optional

import numpy as np

from .errors import BudgetError, InvariantViolation, ParameterError, StructureError
from .hypergraphs import Hypergraph

DEFAULT_BUDGET = 20_000_000

_PROVENANCES = ("exact", "behrend", "user")


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    if p < 4:
        return True
    if p % 2 == 0:
        return False
    f = 3
    while f * f <= p:
        if p % f == 0:
            return False
        f += 2
    return True


def _signed_rep(res: int, p: int, k: int) -> int:
    # a representative of res in +-{1..k}; prefers the positive one
    return res if res <= k else res - p


def _coeff_residues(p: int, k: int) -> list[int]:
    out = set()
    for v in range(1, k + 1):
        out.add(v % p)
        out.add(-v % p)
    return sorted(out)


@dataclass(frozen=True)
class GoodSetViolation:
    """Certificate that a set is not k-good: the coefficient triple is
    signed in +-{1..k}, both congruences hold mod p, s not all equal."""

    m: tuple[int, int, int]
    s: tuple[int, int, int]

    def validate(self, p: int, k: int) -> None:
        if any(mi == 0 or abs(mi) > k for mi in self.m):
            raise StructureError(f"coefficients {self.m} not in +-1..{k}")
        if any(not 0 <= si < p for si in self.s):
            raise StructureError(f"values {self.s} not residues mod {p}")
        if self.s[0] == self.s[1] == self.s[2]:
            raise StructureError("values all equal: not a violation")
        if sum(self.m) % p != 0:
            raise StructureError("coefficient sum not 0 mod p")
        if sum(mi * si for mi, si in zip(self.m, self.s)) % p != 0:
            raise StructureError("weighted sum not 0 mod p")


def is_k_good(S: Iterable[int], p: int, k: int) -> Optional[GoodSetViolation]:
    """None iff S is k-good in Z_p; otherwise the first violation found.

    Mirrors the detector convention used elsewhere: no certificate
    means the property holds.
    """
    if not _is_prime(p) or not p > k or k < 2:
        raise ParameterError(f"need prime p > k >= 2, got p={p} k={k}")
    vals = sorted(set(S))
    if vals and (vals[0] < 0 or vals[-1] >= p):
        raise ParameterError(f"set elements must lie in 0..{p - 1}")
    if len(vals) < 2:
        return None
    sset = set(vals)
    res = _coeff_residues(p, k)
    rset = set(res)
    for m1 in res:
        for m2 in res:
            m3 = (-m1 - m2) % p
            if m3 not in rset:
                continue
            inv3 = pow(m3, p - 2, p)
            for s1 in vals:
                a = m1 * s1
                for s2 in vals:
                    s3 = (-(a + m2 * s2) * inv3) % p
                    if s3 in sset and not s1 == s2 == s3:
                        v = GoodSetViolation(
                            m=(_signed_rep(m1, p, k), _signed_rep(m2, p, k),
                               _signed_rep(m3, p, k)),
                            s=(s1, s2, s3))
                        v.validate(p, k)
                        return v
    return None


@dataclass(frozen=True)
class GoodSet:
    p: int
    k: int
    S: tuple[int, ...]
    provenance: str
    meta: Optional[Mapping] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        if self.provenance not in _PROVENANCES:
            raise ParameterError(f"provenance must be one of {_PROVENANCES}")
        vals = tuple(sorted(set(self.S)))
        if vals != tuple(self.S):
            raise ParameterError("S must be sorted and duplicate-free")
        bad = is_k_good(self.S, self.p, self.k)
        if bad is not None:
            raise ParameterError(
                f"S is not {self.k}-good mod {self.p}: m={bad.m} s={bad.s}")

    @property
    def size(self) -> int:
        return len(self.S)

    def to_json(self) -> dict:
        doc = {"p": self.p, "k": self.k, "S": list(self.S),
               "provenance": self.provenance}
        if self.meta is not None:
            doc["meta"] = dict(self.meta)
        return doc


def _violation_masks(p: int, k: int) -> list[int]:
    """Bitmasks (over residues) of all distinct violating value-sets."""
    res = _coeff_residues(p, k)
    rset = set(res)
    masks = set()
    for m1 in res:
        for m2 in res:
            m3 = (-m1 - m2) % p
            if m3 not in rset:
                continue
            inv3 = pow(m3, p - 2, p)
            for s1 in range(p):
                a = m1 * s1
                for s2 in range(p):
                    s3 = (-(a + m2 * s2) * inv3) % p
                    if not s1 == s2 == s3:
                        masks.add(1 << s1 | 1 << s2 | 1 << s3)
    return sorted(masks)


def max_good_set(p: int, k: int, budget: int = DEFAULT_BUDGET) -> GoodSet:
    """Lexicographically least maximum k-good subset of Z_p (size s_k(p)).

    Include-first DFS over residues with precomputed violating sets:
    a residue is addable iff no violating set becomes fully contained.
    """
    if not _is_prime(p) or not p > k or k < 2:
        raise ParameterError(f"need prime p > k >= 2, got p={p} k={k}")
    masks = _violation_masks(p, k)
    at = [[] for _ in range(p)]
    for msk in masks:
        for x in range(p):
            if msk >> x & 1:
                at[x].append(msk)

    best_size = 0
    best_mask = 0
    nodes = 0

    def rec(x: int, cur: int, size: int):
        nonlocal best_size, best_mask, nodes
        nodes += 1
        if nodes > budget:
            raise BudgetError(f"max_good_set exceeded {budget} nodes")
        if size > best_size:
            best_size = size
            best_mask = cur
        if x == p or size + (p - x) <= best_size:
            return
        grown = cur | 1 << x
        if all(msk & ~grown for msk in at[x]):
            rec(x + 1, grown, size + 1)
        rec(x + 1, cur, size)

    rec(0, 0, 0)
    S = tuple(x for x in range(p) if best_mask >> x & 1)
    return GoodSet(p=p, k=k, S=S, provenance="exact",
                   meta={"nodes": nodes, "violating_sets": len(masks)})


# ------------------------------------------------------------ digit spheres

def _sphere_sets(p: int, d: int, M: int, b: int) -> list[tuple[int, tuple[int, ...]]]:
    """Digit-sphere candidate sets for one (d, M, b), largest first.

    Returns (radius, elements) pairs sorted by size desc then radius asc.
    Elements are sums digit_j * b^j over digit vectors with a fixed
    square-sum; distinct vectors give distinct values since M <= b.
    """
    spheres: dict[int, list[int]] = {}
    powers = [b ** j for j in range(d)]
    vec = [0] * d
    while True:
        val = sum(v * w for v, w in zip(vec, powers))
        if val < p:
            spheres.setdefault(sum(v * v for v in vec), []).append(val)
        i = 0
        while i < d and vec[i] == M - 1:
            vec[i] = 0
            i += 1
        if i == d:
            break
        vec[i] += 1
    ranked = sorted(spheres.items(), key=lambda kv: (-len(kv[1]), kv[0]))
    return [(r, tuple(sorted(vals))) for r, vals in ranked]


def behrend_good_set(p: int, k: int, dim: Optional[int] = None,
                     base: Optional[int] = None,
                     digits: Optional[int] = None) -> GoodSet:
    """Constructive k-good set from digit vectors on a square-sum sphere.

    With no tuning arguments a small (dim, digits, base) grid is scanned
    and the best verifier-certified sphere wins; ties prefer the smaller
    radius.  Explicit parameters build exactly that configuration and
    fail loudly if it does not verify.  Output is always re-verified.
    """
    if not _is_prime(p) or not p > k or k < 2:
        raise ParameterError(f"need prime p > k >= 2, got p={p} k={k}")
    explicit = [dim, base, digits]
    if any(v is not None for v in explicit):
        if any(v is None for v in explicit):
            raise ParameterError("give all of dim, base, digits, or none")
        if dim < 1 or digits < 2 or base < digits:
            raise ParameterError(f"bad sphere parameters d={dim} b={base} M={digits}")
        for radius, vals in _sphere_sets(p, dim, digits, base):
            if is_k_good(vals, p, k) is None:
                return GoodSet(p=p, k=k, S=vals, provenance="behrend",
                               meta={"policy": "explicit", "dim": dim,
                                     "base": base, "digits": digits,
                                     "radius": radius})
        raise ParameterError(
            f"no sphere of (d={dim}, b={base}, M={digits}) verifies as {k}-good")

    best: Optional[tuple] = None  # (-size, d, M, b, radius, vals)
    # one digit gives singleton spheres, so the grid starts at dim 2
    for d in range(2, 7):
        m_cap = 2
        while (m_cap + 1) ** d <= 4096:
            m_cap += 1
        for M in range(2, m_cap + 1):
            # largest base keeping every element below p
            b_hi = M
            while (M - 1) * ((b_hi + 1) ** d - 1) // b_hi <= p - 1:
                b_hi += 1
            if (M - 1) * (b_hi ** d - 1) // (b_hi - 1) > p - 1:
                continue
            b_safe = 4 * k * (M - 1) + 1
            bases = {b_hi}
            if M <= b_safe <= b_hi and b_safe ** d <= 2 * p:
                bases.add(b_safe)
            for b in sorted(bases):
                for radius, vals in _sphere_sets(p, d, M, b)[:8]:
                    if best is not None and len(vals) <= -best[0]:
                        continue
                    if is_k_good(vals, p, k) is None:
                        cand = (-len(vals), d, M, b, radius, vals)
                        if best is None or cand < best:
                            best = cand
    if best is None:
        return GoodSet(p=p, k=k, S=(0,), provenance="behrend",
                       meta={"policy": "auto", "warning": "degenerate fallback"})
    _, d, M, b, radius, vals = best
    return GoodSet(p=p, k=k, S=vals, provenance="behrend",
                   meta={"policy": "auto", "dim": d, "base": b,
                         "digits": M, "radius": radius})


# ------------------------------------------------------------------ AP-free

def is_ap_free(A: Iterable[int], n: int, k: int) -> Optional[tuple[int, ...]]:
    """None iff A contains no k-term arithmetic progression; else the
    lexicographically first progression (by start, then difference)."""
    if k < 3:
        raise ParameterError(f"progression length must be >= 3, got {k}")
    vals = sorted(set(A))
    if vals and (vals[0] < 1 or vals[-1] > n):
        raise ParameterError(f"set elements must lie in 1..{n}")
    aset = set(vals)
    for a in vals:
        top = (n - a) // (k - 1) if k > 1 else 0
        for diff in range(1, top + 1):
            if all(a + j * diff in aset for j in range(1, k)):
                return tuple(a + j * diff for j in range(k))
    return None


@dataclass(frozen=True)
class APFreeSet:
    n: int
    k: int
    A: tuple[int, ...]

    def __post_init__(self):
        if tuple(sorted(set(self.A))) != tuple(self.A):
            raise ParameterError("A must be sorted and duplicate-free")
        cert = is_ap_free(self.A, self.n, self.k)
        if cert is not None:
            raise ParameterError(f"A contains the progression {cert}")

    @property
    def size(self) -> int:
        return len(self.A)

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "A": list(self.A)}


def max_ap_free(n: int, k: int, budget: int = DEFAULT_BUDGET) -> APFreeSet:
    """Lexicographically least maximum AP_k-free subset of {1..n} (r_k(n))."""
    if k < 3 or n < 0:
        raise ParameterError(f"need k >= 3 and n >= 0, got n={n} k={k}")
    best_size = 0
    best: tuple[int, ...] = ()
    nodes = 0

    def blocked(x: int, cur: set[int]) -> bool:
        # adding x completes a progression iff one of length k ends at x
        d = 1
        while x - (k - 1) * d >= 1:
            if all(x - j * d in cur for j in range(1, k)):
                return True
            d += 1
        return False

    cur: set[int] = set()
    chosen: list[int] = []

    def rec(x: int):
        nonlocal best_size, best, nodes
        nodes += 1
        if nodes > budget:
            raise BudgetError(f"max_ap_free exceeded {budget} nodes")
        if len(chosen) > best_size:
            best_size = len(chosen)
            best = tuple(chosen)
        if x > n or len(chosen) + (n - x + 1) <= best_size:
            return
        if not blocked(x, cur):
            cur.add(x)
            chosen.append(x)
            rec(x + 1)
            chosen.pop()
            cur.discard(x)
        rec(x + 1)

    rec(1)
    return APFreeSet(n=n, k=k, A=best)


# ------------------------------------------------------------------ packings

@dataclass(frozen=True)
class Packing:
    """r-sets on {0..n-1} with pairwise intersections below t."""

    n: int
    r: int
    t: int
    edges: tuple[tuple[int, ...], ...]
    meta: Optional[Mapping] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        n, r, t = self.n, self.r, self.t
        if not n >= r >= t >= 1:
            raise ParameterError(f"need n >= r >= t >= 1, got ({n}, {r}, {t})")
        prev = None
        covered = set()
        for e in self.edges:
            if len(e) != r or any(not 0 <= v < n for v in e) \
                    or any(e[i] >= e[i + 1] for i in range(r - 1)):
                raise StructureError(f"bad packing edge {e}")
            if prev is not None and e <= prev:
                raise StructureError("packing edges not in lex order")
            prev = e
            for sub in combinations(e, t):
                if sub in covered:
                    raise StructureError(
                        f"{t}-set {sub} covered twice: intersections reach {t}")
                covered.add(sub)

    @property
    def size(self) -> int:
        return len(self.edges)

    def to_hypergraph(self) -> Hypergraph:
        return Hypergraph(n=self.n, k=self.r, edges=self.edges,
                          meta={"packing": [self.n, self.r, self.t]})


_NUMBA_MIN_CANDIDATES = 30_000
_pack_kernel = None


def _get_pack_kernel():
    global _pack_kernel
    if _pack_kernel is None:
        from numba import njit

        @njit(cache=True)
        def kernel(n, r, t, binom, patterns, covered, out):
            m = 0
            npat = patterns.shape[0]
            cmb = np.empty(r, dtype=np.int64)
            for i in range(r):
                cmb[i] = i
            while True:
                ok = True
                for pi in range(npat):
                    rank = 0
                    for j in range(t):
                        rank += binom[cmb[patterns[pi, j]], j + 1]
                    if covered[rank]:
                        ok = False
                        break
                if ok:
                    for pi in range(npat):
                        rank = 0
                        for j in range(t):
                            rank += binom[cmb[patterns[pi, j]], j + 1]
                        covered[rank] = True
                    for j in range(r):
                        out[m, j] = cmb[j]
                    m += 1
                i = r - 1
                while i >= 0 and cmb[i] == n - r + i:
                    i -= 1
                if i < 0:
                    break
                cmb[i] += 1
                for j in range(i + 1, r):
                    cmb[j] = cmb[j - 1] + 1
            return m

        _pack_kernel = kernel
    return _pack_kernel


def _greedy_pack_python(n: int, r: int, t: int) -> list[tuple[int, ...]]:
    covered: set = set()
    out = []
    for e in combinations(range(n), r):
        subs = list(combinations(e, t))
        if all(s not in covered for s in subs):
            out.append(e)
            covered.update(subs)
    return out


def greedy_packing(n: int, r: int, t: int) -> Packing:
    """Maximal (n, r, t)-packing by lexicographic greedy.

    Maximality gives the floor size * C(r,t)^2 >= C(n,t), which is
    asserted on every run.  Large instances run a compiled kernel over
    colex ranks of t-subsets; it reproduces the pure scan exactly.
    """
    if not n >= r >= t >= 1:
        raise ParameterError(f"need n >= r >= t >= 1, got ({n}, {r}, {t})")
    if t == r:
        edges = tuple(combinations(range(n), r))
    elif comb(n, r) >= _NUMBA_MIN_CANDIDATES:
        binom = np.zeros((n + 1, t + 2), dtype=np.int64)
        for a in range(n + 1):
            for bb in range(min(a, t + 1) + 1):
                binom[a, bb] = comb(a, bb)
        patterns = np.array(list(combinations(range(r), t)), dtype=np.int64)
        covered = np.zeros(comb(n, t), dtype=np.bool_)
        cap = comb(n, t) // comb(r, t) + 1
        out = np.empty((cap, r), dtype=np.int64)
        size = _get_pack_kernel()(n, r, t, binom, patterns, covered, out)
        edges = tuple(tuple(row) for row in out[:size].tolist())
    else:
        edges = tuple(_greedy_pack_python(n, r, t))
    if len(edges) * comb(r, t) ** 2 < comb(n, t):
        raise InvariantViolation(
            f"greedy packing size {len(edges)} below the maximality floor")
    return Packing(n=n, r=r, t=t, edges=edges, meta={"method": "greedy"})


def exact_max_packing(n: int, r: int, t: int,
                      budget: int = DEFAULT_BUDGET) -> Packing:
    """Maximum (n, r, t)-packing, lexicographically least among maximums.

    Branch-and-bound over candidate r-sets in lex order, seeded with the
    greedy size so optimal-size solutions are recorded immediately.
    """
    if not n >= r >= t >= 1:
        raise ParameterError(f"need n >= r >= t >= 1, got ({n}, {r}, {t})")
    if t == r:
        return Packing(n=n, r=r, t=t, edges=tuple(combinations(range(n), r)),
                       meta={"method": "complete"})
    cands = list(combinations(range(n), r))
    nc = len(cands)
    cmasks = [0] * nc
    for i, e in enumerate(cands):
        mi = 0
        for v in e:
            mi |= 1 << v
        cmasks[i] = mi
    # compat[i]: candidates after i whose intersection with i stays < t
    compat = [0] * nc
    for i in range(nc):
        acc = 0
        for j in range(i + 1, nc):
            if (cmasks[i] & cmasks[j]).bit_count() < t:
                acc |= 1 << j
        compat[i] = acc

    greedy = _greedy_pack_python(n, r, t)
    best_size = len(greedy) - 1
    best: Optional[tuple[int, ...]] = None
    nodes = 0

    def rec(chosen: list[int], avail: int):
        nonlocal best_size, best, nodes
        nodes += 1
        if nodes > budget:
            raise BudgetError(f"exact_max_packing exceeded {budget} nodes")
        if len(chosen) > best_size:
            best_size = len(chosen)
            best = tuple(chosen)
        while avail:
            if len(chosen) + avail.bit_count() <= best_size:
                return
            low = avail & -avail
            x = low.bit_length() - 1
            avail ^= low
            rec(chosen + [x], avail & compat[x])

    rec([], (1 << nc) - 1)
    if best is None:
        # unreachable: the optimum is at least the greedy size
        raise InvariantViolation("packing search recorded no solution")
    edges = tuple(cands[i] for i in best)
    upper = comb(n, t) // comb(r, t)
    if len(edges) > upper:
        raise InvariantViolation(
            f"packing size {len(edges)} exceeds the t-subset bound {upper}")
    return Packing(n=n, r=r, t=t, edges=edges,
                   meta={"method": "exact", "nodes": nodes})
