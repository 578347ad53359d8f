"""Level-k affine weights, the shifted reflection action, alcove reduction,
and automorphisms of the extended diagram.

An affine weight is stored as the integer coordinate vector
(lambda_0, ..., lambda_r); membership at level k means the mark-weighted
coordinate sum equals k.  The shifted action conjugates the linear
reflections by adding one to every coordinate first (the affine Weyl
vector has all coordinates one).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .dynkin import DynkinData, RankMismatch, Weight


class IterationCapExceeded(RuntimeError):
    """Alcove reduction ran past its reflection cap; indicates a bug."""


@dataclass(frozen=True)
class AffineWeight:
    """Affine weight of a fixed level, coordinates lambda_0..lambda_r."""

    level: int
    coords: tuple[int, ...]

    @property
    def rank(self) -> int:
        return len(self.coords) - 1

    def is_dominant(self) -> bool:
        return all(c >= 0 for c in self.coords)

    def classical(self) -> Weight:
        return Weight(self.coords[1:])


@dataclass(frozen=True)
class ReductionResult:
    """Outcome of alcove reduction: a signed dominant representative, or a
    detected stabiliser (``rep is None``) which forces the value zero."""

    rep: AffineWeight | None
    sign: int

    @property
    def is_zero(self) -> bool:
        return self.rep is None


def level_of(coords: tuple[int, ...], dynkin: DynkinData) -> int:
    """Mark-weighted coordinate sum of an affine coordinate vector."""
    if len(coords) != dynkin.rank + 1:
        raise RankMismatch(f"expected {dynkin.rank + 1} coordinates, got {len(coords)}")
    return sum(a * c for a, c in zip(dynkin.marks, coords))


def affinize(weight: Weight, level: int, dynkin: DynkinData) -> AffineWeight:
    """Extend a classical weight by the zeroth coordinate fixing its level.

    The zeroth coordinate may come out negative; such weights are
    legitimate inputs to the shifted action and to alcove reduction.
    """
    if weight.rank != dynkin.rank:
        raise RankMismatch(f"weight rank {weight.rank} != diagram rank {dynkin.rank}")
    lam0 = level - sum(a * c for a, c in zip(dynkin.marks[1:], weight.coords))
    return AffineWeight(level, (lam0, *weight.coords))


def reflect(i: int, w: AffineWeight, dynkin: DynkinData) -> AffineWeight:
    """Fundamental reflection at node i, acting linearly on coordinates."""
    row = dynkin.extended_cartan[i]
    wi = w.coords[i]
    if wi == 0:
        return w
    return AffineWeight(w.level, tuple(c - wi * row[j] for j, c in enumerate(w.coords)))


def shifted_action(word: tuple[int, ...] | list[int], w: AffineWeight,
                   dynkin: DynkinData) -> AffineWeight:
    """Apply s_{i_1} ... s_{i_n} to w under the shifted action.

    Implemented by shifting every coordinate up by one, reflecting, and
    shifting back down.
    """
    mu = [c + 1 for c in w.coords]
    for i in word:
        row = dynkin.extended_cartan[i]
        mi = mu[i]
        if mi:
            mu = [mu[j] - mi * row[j] for j in range(len(mu))]
    return AffineWeight(w.level, tuple(c - 1 for c in mu))


def reduce_to_alcove(w: AffineWeight, dynkin: DynkinData,
                     cap: int = 10**6) -> ReductionResult:
    """Carry w to its dominant representative under the shifted action.

    Greedy loop on mu = w + (1,...,1): a zero coordinate means mu sits on
    a reflection wall, so the value is zero; otherwise reflect at the
    smallest negative coordinate and flip the sign until all coordinates
    are positive.  Positive level guarantees termination; the cap only
    guards against internal bugs.
    """
    if w.level < 1:
        raise ValueError(f"alcove reduction requires level >= 1, got {w.level}")
    n = len(w.coords)
    rows = dynkin.extended_cartan
    mu = [c + 1 for c in w.coords]
    sign = 1
    for _ in range(cap):
        neg = -1
        on_wall = False
        for i, v in enumerate(mu):
            if v == 0:
                on_wall = True
                break
            if v < 0 and neg < 0:
                neg = i
        if on_wall:
            return ReductionResult(rep=None, sign=0)
        if neg < 0:
            rep = AffineWeight(w.level, tuple(v - 1 for v in mu))
            return ReductionResult(rep=rep, sign=sign)
        row = rows[neg]
        mneg = mu[neg]
        mu = [mu[j] - mneg * row[j] for j in range(n)]
        sign = -sign
    raise IterationCapExceeded(f"no dominant representative within {cap} reflections")


@lru_cache(maxsize=None)
def diagram_automorphisms(dynkin: DynkinData) -> tuple[tuple[int, ...], ...]:
    """All node permutations of the extended diagram preserving pairings.

    Backtracking search over at most rank+1 nodes, pruned by the sorted
    row profile of the extended matrix.  Marks are preserved
    automatically by any such permutation.
    """
    c = dynkin.extended_cartan
    n = dynkin.rank + 1
    profile = [tuple(sorted(row)) for row in c]
    found: list[tuple[int, ...]] = []
    perm = [-1] * n
    used = [False] * n

    def extend(i: int) -> None:
        if i == n:
            found.append(tuple(perm))
            return
        for j in range(n):
            if used[j] or profile[j] != profile[i]:
                continue
            if all(c[j][perm[t]] == c[i][t] for t in range(i)):
                perm[i] = j
                used[j] = True
                extend(i + 1)
                used[j] = False
        perm[i] = -1

    extend(0)
    return tuple(sorted(found))


def orbit_of_zero(dynkin: DynkinData) -> frozenset[int]:
    """Nodes reachable from node 0 under extended-diagram automorphisms."""
    return frozenset(p[0] for p in diagram_automorphisms(dynkin))


def apply_automorphism(perm: tuple[int, ...], w: AffineWeight) -> AffineWeight:
    """Permute affine coordinates: node i's coordinate moves to node perm[i]."""
    coords = [0] * len(w.coords)
    for i, c in enumerate(w.coords):
        coords[perm[i]] = c
    return AffineWeight(w.level, tuple(coords))
