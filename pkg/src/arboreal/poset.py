"""The poset of correspondences of a tree: enumeration, order, rank, up-sets.

An element dominates another exactly when the second partition refines the
first: every complement part sits inside a complement part, and every fiber
sits inside a complement part or a fiber.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

from .errors import MismatchedTree
from .trees import (
    Correspondence,
    Tree,
    compose_correspondences,
    identity_correspondence,
    make_correspondence,
    path_tree,
)


def poset_leq(t: Tree, p: Correspondence, p2: Correspondence) -> bool:
    """True iff p >= p2, i.e. the partition of p2 refines the partition of p."""
    if p.tree != t or p2.tree != t:
        raise MismatchedTree("correspondences live on different trees")
    containing: dict[str, tuple[frozenset, bool]] = {}
    for part, is_fiber in p.parts():
        fs = frozenset(part)
        for v in part:
            containing[v] = (fs, is_fiber)
    for part, is_fiber in p2.parts():
        host, host_is_fiber = containing[part[0]]
        if not set(part) <= host:
            return False
        if not is_fiber and host_is_fiber:
            # complement parts may only refine complement parts
            return False
    return True


def dominates_by_composition(t: Tree, p: Correspondence, p2: Correspondence) -> bool:
    """Search for a factoring correspondence on the quotient tree of p2.

    Slow cross-check of poset_leq: p >= p2 iff p = q o p2 for some q.
    """
    if p.tree != t or p2.tree != t:
        raise MismatchedTree("correspondences live on different trees")
    r, _ = p2.quotient
    for q in _enumerate_elements(r):
        if compose_correspondences(q, p2).key == p.key:
            return True
    return False


def _enumerate_elements(t: Tree) -> list[Correspondence]:
    elements = []
    for s in t.connected_subsets():
        s_edges = sorted(t.induced_edges(s))
        m = len(s_edges)
        for mask in range(1 << m):
            k = tuple(s_edges[i] for i in range(m) if mask >> i & 1)
            elements.append(Correspondence(t, s, tuple(sorted(k))))
    return sorted(elements, key=lambda c: c.key)


class ArborealPoset:
    """All correspondences of a tree with the refinement order."""

    def __init__(self, tree: Tree):
        self.tree = tree
        self.elements: tuple[Correspondence, ...] = tuple(_enumerate_elements(tree))
        self._index = {c.key: i for i, c in enumerate(self.elements)}

    def __len__(self):
        return len(self.elements)

    def index_of(self, c: Correspondence) -> int:
        return self._index[c.key]

    @cached_property
    def minimum(self) -> int:
        return self.index_of(identity_correspondence(self.tree))

    @cached_property
    def _up_masks(self) -> list[int]:
        """up[i] has bit j set iff elements[i] <= elements[j]."""
        n = len(self.elements)
        up = [0] * n
        for i in range(n):
            for j in range(n):
                if poset_leq(self.tree, self.elements[j], self.elements[i]):
                    up[i] |= 1 << j
        return up

    def leq(self, i: int, j: int) -> bool:
        """elements[i] <= elements[j] in the closure order."""
        return bool(self._up_masks[i] >> j & 1)

    def up_set(self, i: int) -> list[int]:
        return [j for j in range(len(self.elements)) if self.leq(i, j)]

    def rank(self, i: int) -> int:
        return self.elements[i].rank

    @cached_property
    def covers(self) -> tuple[tuple[int, int], ...]:
        """Hasse diagram as (lower, upper) index pairs."""
        n = len(self.elements)
        down = [0] * n
        for i in range(n):
            for j in range(n):
                if self.leq(j, i):
                    down[i] |= 1 << j
        out = []
        for i in range(n):
            for j in range(n):
                if i != j and self.leq(i, j):
                    between = self._up_masks[i] & down[j] & ~(1 << i) & ~(1 << j)
                    if between == 0:
                        out.append((i, j))
        return tuple(out)

    def to_json(self) -> dict:
        return {
            "tree": self.tree.to_json(),
            "elements": [
                {**c.to_json(), "rank": c.rank} for c in self.elements
            ],
            "minimum": self.minimum,
            "covers": [list(c) for c in self.covers],
        }


def enumerate_poset(t: Tree) -> ArborealPoset:
    return ArborealPoset(t)


def rank(t: Tree, p: Correspondence) -> int:
    if p.tree != t:
        raise MismatchedTree("correspondence lives on a different tree")
    return p.rank


@dataclass(frozen=True)
class UpsetIsomorphism:
    """The bijection q -> q o p from the quotient poset onto the up-set of p."""

    base: Correspondence
    pairs: tuple[tuple[Correspondence, Correspondence], ...]
    bijective: bool
    order_preserving: bool
    order_reflecting: bool

    @property
    def ok(self) -> bool:
        return self.bijective and self.order_preserving and self.order_reflecting


def upset_isomorphism(t: Tree, p: Correspondence) -> UpsetIsomorphism:
    if p.tree != t:
        raise MismatchedTree("correspondence lives on a different tree")
    r, _ = p.quotient
    r_poset = ArborealPoset(r)
    pairs = tuple((q, compose_correspondences(q, p)) for q in r_poset.elements)
    image_keys = [img.key for _, img in pairs]
    up_keys = [c.key for c in ArborealPoset(t).elements if poset_leq(t, c, p)]
    bijective = len(set(image_keys)) == len(image_keys) and set(image_keys) == set(up_keys)
    preserving = True
    reflecting = True
    for q1, img1 in pairs:
        for q2, img2 in pairs:
            lhs = poset_leq(r, q2, q1)
            rhs = poset_leq(t, img2, img1)
            preserving &= (not lhs) or rhs
            reflecting &= (not rhs) or lhs
    return UpsetIsomorphism(p, pairs, bijective, preserving, reflecting)


@dataclass(frozen=True)
class AnIsomorphism:
    """Link elements of the chain tree matched with small subsets of {0..n}."""

    n: int
    pairs: tuple[tuple[Correspondence, frozenset], ...]
    bijective: bool
    order_preserving: bool
    order_reflecting: bool
    count: int

    @property
    def ok(self) -> bool:
        return self.bijective and self.order_preserving and self.order_reflecting


def _separating_subset(tree: Tree, n: int, c: Correspondence) -> frozenset:
    """Indices of chain edges, in the two-ends extension, separating the parts of c.

    The chain v1..vn is extended by virtual end vertices v0 and v(n+1) which
    join the complement; edge i connects v_i and v_{i+1} for i in 0..n.
    """
    part_id: dict[str, tuple[int, bool]] = {}
    for idx, (part, is_fiber) in enumerate(c.parts()):
        for v in part:
            part_id[v] = (idx, is_fiber)
    ids = [part_id[f"v{i}"] for i in range(1, n + 1)]
    # the virtual ends join the adjacent complement part, if there is one
    left = ids[0] if not ids[0][1] else ("L", True)
    right = ids[-1] if not ids[-1][1] else ("R", True)
    seq = [left] + ids + [right]
    return frozenset(i for i in range(n + 1) if seq[i] != seq[i + 1])


def an_poset_isomorphism(n: int) -> AnIsomorphism:
    """Match the punctured chain poset with proper small subsets of {0..n}.

    Each non-minimal correspondence goes to the complement of its separating
    edge set: a nonempty subset of {0..n} with at most n-1 elements, ordered
    by containment compatibly with cell closure.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    tree = path_tree(n)
    poset = ArborealPoset(tree)
    full = frozenset(range(n + 1))
    pairs = []
    for i, c in enumerate(poset.elements):
        if i == poset.minimum:
            continue
        subset = full - _separating_subset(tree, n, c)
        pairs.append((c, subset))
    targets = {
        frozenset(s)
        for s in _nonempty_small_subsets(n)
    }
    image = [s for _, s in pairs]
    bijective = len(set(image)) == len(image) and set(image) == targets
    preserving = True
    reflecting = True
    for c1, s1 in pairs:
        for c2, s2 in pairs:
            lhs = poset_leq(tree, c1, c2)  # c2 <= c1
            rhs = s2 <= s1
            preserving &= (not lhs) or rhs
            reflecting &= (not rhs) or lhs
    return AnIsomorphism(n, tuple(pairs), bijective, preserving, reflecting, len(pairs))


def _nonempty_small_subsets(n: int):
    """All nonempty subsets of {0..n} with at most n-1 elements, enumerated directly."""
    universe = list(range(n + 1))
    out = []
    for mask in range(1, 1 << (n + 1)):
        bits = [universe[i] for i in range(n + 1) if mask >> i & 1]
        if 1 <= len(bits) <= n - 1:
            out.append(tuple(bits))
    return out
