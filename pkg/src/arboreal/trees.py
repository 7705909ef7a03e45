"""Trees, rooted trees, and correspondences (subtree plus contracted edges).

Vertex labels are opaque strings; every derived ordering breaks ties
lexicographically so that all outputs are reproducible.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property
from itertools import product

from .errors import (
    BadEdge,
    CycleDetected,
    Disconnected,
    DisconnectedS,
    EdgeNotInS,
    EmptyS,
    EmptyVertexSet,
    MismatchedTree,
    UnknownVertex,
)

Vertex = str
Edge = tuple[str, str]


def norm_edge(u: Vertex, v: Vertex) -> Edge:
    return (u, v) if u <= v else (v, u)


@dataclass(frozen=True)
class Tree:
    """A nonempty finite connected acyclic graph on string-labeled vertices."""

    vertices: tuple[Vertex, ...]
    edges: tuple[Edge, ...]

    @cached_property
    def adjacency(self) -> dict[Vertex, tuple[Vertex, ...]]:
        adj: dict[Vertex, list[Vertex]] = {v: [] for v in self.vertices}
        for u, v in self.edges:
            adj[u].append(v)
            adj[v].append(u)
        return {v: tuple(sorted(ns)) for v, ns in adj.items()}

    @cached_property
    def _bfs_parents(self) -> dict[Vertex, dict[Vertex, Vertex | None]]:
        out = {}
        for src in self.vertices:
            parent: dict[Vertex, Vertex | None] = {src: None}
            queue = [src]
            while queue:
                u = queue.pop(0)
                for w in self.adjacency[u]:
                    if w not in parent:
                        parent[w] = u
                        queue.append(w)
            out[src] = parent
        return out

    def path(self, u: Vertex, v: Vertex) -> tuple[Vertex, ...]:
        """The unique minimal path from u to v, inclusive of both endpoints."""
        self._check_vertex(u)
        self._check_vertex(v)
        parent = self._bfs_parents[u]
        seq = [v]
        while seq[-1] != u:
            seq.append(parent[seq[-1]])
        return tuple(reversed(seq))

    def distance(self, u: Vertex, v: Vertex) -> int:
        return len(self.path(u, v)) - 1

    def _check_vertex(self, v: Vertex):
        if v not in self.adjacency:
            raise UnknownVertex(f"vertex {v!r} not in tree")

    def has_edge(self, u: Vertex, v: Vertex) -> bool:
        return norm_edge(u, v) in set(self.edges)

    def induced_edges(self, subset) -> tuple[Edge, ...]:
        s = set(subset)
        return tuple(e for e in self.edges if e[0] in s and e[1] in s)

    def is_connected_subset(self, subset) -> bool:
        s = list(dict.fromkeys(subset))
        if not s:
            return False
        sset = set(s)
        seen = {s[0]}
        queue = [s[0]]
        while queue:
            u = queue.pop()
            for w in self.adjacency[u]:
                if w in sset and w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == len(sset)

    def components_of(self, subset) -> tuple[tuple[Vertex, ...], ...]:
        """Connected components of the induced subgraph on `subset`, sorted."""
        remaining = set(subset)
        comps = []
        while remaining:
            start = min(remaining)
            comp = {start}
            queue = [start]
            while queue:
                u = queue.pop()
                for w in self.adjacency[u]:
                    if w in remaining and w not in comp:
                        comp.add(w)
                        queue.append(w)
            remaining -= comp
            comps.append(tuple(sorted(comp)))
        return tuple(sorted(comps))

    def induced_tree(self, subset) -> "Tree":
        s = tuple(sorted(set(subset)))
        if not self.is_connected_subset(s):
            raise DisconnectedS(f"{s} does not induce a connected subgraph")
        return Tree(s, tuple(sorted(self.induced_edges(s))))

    def connected_subsets(self) -> list[tuple[Vertex, ...]]:
        """All nonempty vertex subsets inducing connected subgraphs.

        Enumerated once each by growing from the least vertex of the subset,
        so the cost is proportional to the output; sorted by size then label.
        """
        rank = {v: i for i, v in enumerate(self.vertices)}
        out: list[tuple[Vertex, ...]] = []

        def grow(sub: frozenset, ext: tuple, excluded: frozenset, floor: int):
            out.append(tuple(sorted(sub)))
            while ext:
                u, ext = ext[0], ext[1:]
                fresh = tuple(
                    w
                    for w in self.adjacency[u]
                    if rank[w] > floor and w not in sub and w not in excluded and w not in ext
                )
                grow(sub | {u}, ext + fresh, excluded, floor)
                excluded = excluded | {u}

        for v in self.vertices:
            seed_ext = tuple(w for w in self.adjacency[v] if rank[w] > rank[v])
            grow(frozenset({v}), seed_ext, frozenset(), rank[v])
        return sorted(out, key=lambda t: (len(t), t))

    def to_json(self) -> dict:
        return {"vertices": list(self.vertices), "edges": [list(e) for e in self.edges]}

    def __repr__(self):
        return f"Tree({','.join(self.vertices)}; {len(self.edges)} edges)"


def validate_tree(raw_vertices, raw_edges) -> Tree:
    """Build a Tree from raw vertex and edge lists, rejecting invalid input."""
    vertices = tuple(sorted(dict.fromkeys(str(v) for v in raw_vertices)))
    if not vertices:
        raise EmptyVertexSet("a tree needs at least one vertex")
    vset = set(vertices)
    edges: list[Edge] = []
    seen = set()
    for e in raw_edges:
        pair = tuple(str(x) for x in e)
        if len(pair) != 2:
            raise BadEdge(f"edge {e!r} is not a pair")
        u, v = pair
        if u == v:
            raise BadEdge(f"self-loop at {u!r}")
        if u not in vset or v not in vset:
            raise BadEdge(f"edge {e!r} references undeclared vertices")
        ne = norm_edge(u, v)
        if ne in seen:
            raise BadEdge(f"duplicate edge {ne!r}")
        seen.add(ne)
        edges.append(ne)
    tree = Tree(vertices, tuple(sorted(edges)))
    if not tree.is_connected_subset(vertices):
        raise Disconnected("graph is not connected")
    if len(edges) != len(vertices) - 1:
        raise CycleDetected(f"{len(edges)} edges on {len(vertices)} vertices")
    return tree


def distance(t: Tree, u: Vertex, v: Vertex) -> int:
    return t.distance(u, v)


@dataclass(frozen=True)
class RootedTree:
    """A tree with a distinguished root; vertices are ordered toward the root."""

    tree: Tree
    root: Vertex

    def __post_init__(self):
        if self.root not in self.tree.adjacency:
            raise UnknownVertex(f"root {self.root!r} not in tree")

    @cached_property
    def parent(self) -> dict[Vertex, Vertex | None]:
        return dict(self.tree._bfs_parents[self.root])

    @cached_property
    def depth(self) -> dict[Vertex, int]:
        return {v: self.tree.distance(self.root, v) for v in self.tree.vertices}

    @cached_property
    def children(self) -> dict[Vertex, tuple[Vertex, ...]]:
        out: dict[Vertex, list[Vertex]] = {v: [] for v in self.tree.vertices}
        for v, p in self.parent.items():
            if p is not None:
                out[p].append(v)
        return {v: tuple(sorted(cs)) for v, cs in out.items()}

    def path_to_root(self, v: Vertex) -> tuple[Vertex, ...]:
        """Vertices from v down to the root, inclusive."""
        self.tree._check_vertex(v)
        seq = [v]
        while self.parent[seq[-1]] is not None:
            seq.append(self.parent[seq[-1]])
        return tuple(seq)

    def below(self, v: Vertex) -> frozenset:
        """All vertices b with b <= v in the rooted order."""
        return frozenset(self.path_to_root(v))

    def leq(self, u: Vertex, v: Vertex) -> bool:
        self.tree._check_vertex(u)
        return u in self.below(v)

    def arrows(self) -> tuple[tuple[Vertex, Vertex], ...]:
        """One arrow per non-root vertex, pointing to its parent."""
        return tuple((v, self.parent[v]) for v in self.tree.vertices if v != self.root)

    def to_json(self) -> dict:
        d = self.tree.to_json()
        d["root"] = self.root
        return d

    def __repr__(self):
        return f"RootedTree({','.join(self.tree.vertices)}; root={self.root})"


def rooted_leq(rt: RootedTree, u: Vertex, v: Vertex) -> bool:
    """True iff u lies on the path from v to the root."""
    return rt.leq(u, v)


@dataclass(frozen=True)
class Correspondence:
    """A connected subtree S of T with a contracted edge set K inside S.

    The derived data are the fibers (components of (S, K)), the quotient tree
    R on the fibers, and the components of the complement T minus S.
    """

    tree: Tree
    s_vertices: tuple[Vertex, ...]
    contracted: tuple[Edge, ...]

    @property
    def key(self):
        return (self.s_vertices, self.contracted)

    @cached_property
    def fibers(self) -> tuple[tuple[Vertex, ...], ...]:
        adj: dict[Vertex, list[Vertex]] = {v: [] for v in self.s_vertices}
        for u, v in self.contracted:
            adj[u].append(v)
            adj[v].append(u)
        remaining = set(self.s_vertices)
        comps = []
        while remaining:
            start = min(remaining)
            comp = {start}
            queue = [start]
            while queue:
                u = queue.pop()
                for w in adj[u]:
                    if w not in comp:
                        comp.add(w)
                        queue.append(w)
            remaining -= comp
            comps.append(tuple(sorted(comp)))
        return tuple(sorted(comps))

    @cached_property
    def fiber_of(self) -> dict[Vertex, tuple[Vertex, ...]]:
        return {v: f for f in self.fibers for v in f}

    @cached_property
    def n_parts(self) -> tuple[tuple[Vertex, ...], ...]:
        rest = [v for v in self.tree.vertices if v not in self.fiber_of]
        return self.tree.components_of(rest)

    @staticmethod
    def fiber_label(fiber) -> str:
        return "+".join(fiber)

    @cached_property
    def quotient(self) -> tuple[Tree, dict[Vertex, Vertex]]:
        """The quotient tree R on fiber labels, with the fiber-membership map."""
        labels = {f: self.fiber_label(f) for f in self.fibers}
        q = {v: labels[f] for v, f in self.fiber_of.items()}
        r_edges = set()
        s_set = set(self.s_vertices)
        contracted = set(self.contracted)
        for e in self.tree.edges:
            if e[0] in s_set and e[1] in s_set and e not in contracted:
                r_edges.add(norm_edge(q[e[0]], q[e[1]]))
        r = Tree(tuple(sorted(labels.values())), tuple(sorted(r_edges)))
        return r, q

    @property
    def rank(self) -> int:
        return len(self.tree.vertices) - len(self.fibers)

    @property
    def is_identity(self) -> bool:
        return len(self.s_vertices) == len(self.tree.vertices) and not self.contracted

    def parts(self) -> tuple[tuple[tuple[Vertex, ...], bool], ...]:
        """All partition parts as (vertex tuple, is_fiber) pairs."""
        return tuple((f, True) for f in self.fibers) + tuple((n, False) for n in self.n_parts)

    def to_json(self) -> dict:
        return {"s": list(self.s_vertices), "k": [list(e) for e in self.contracted]}

    def __repr__(self):
        k = ",".join("-".join(e) for e in self.contracted)
        return f"Corr(S={{{','.join(self.s_vertices)}}}, K={{{k}}})"


def make_correspondence(t: Tree, s, k) -> Correspondence:
    """Validate and build a correspondence from a vertex subset and edge subset."""
    s_vertices = tuple(sorted(dict.fromkeys(str(v) for v in s)))
    if not s_vertices:
        raise EmptyS("the subtree S must be nonempty")
    for v in s_vertices:
        if v not in t.adjacency:
            raise UnknownVertex(f"subtree vertex {v!r} not in tree")
    if not t.is_connected_subset(s_vertices):
        raise DisconnectedS(f"{s_vertices} does not induce a connected subgraph")
    s_set = set(s_vertices)
    s_edges = set(t.induced_edges(s_vertices))
    contracted = []
    for e in k:
        pair = tuple(str(x) for x in e)
        if len(pair) != 2:
            raise EdgeNotInS(f"{e!r} is not an edge")
        ne = norm_edge(*pair)
        if ne not in s_edges or ne[0] not in s_set or ne[1] not in s_set:
            raise EdgeNotInS(f"edge {ne!r} is not an edge of the induced subtree")
        contracted.append(ne)
    return Correspondence(t, s_vertices, tuple(sorted(set(contracted))))


def identity_correspondence(t: Tree) -> Correspondence:
    return Correspondence(t, t.vertices, ())


def quotient_tree(c: Correspondence) -> tuple[Tree, dict[Vertex, Vertex]]:
    return c.quotient


def compose_correspondences(outer: Correspondence, inner: Correspondence) -> Correspondence:
    """Compose a correspondence on the quotient tree R of `inner` with `inner`.

    The result lives over inner's ambient tree: its subtree is the union of
    inner fibers selected by outer, and its contracted set merges inner's
    contractions with the tree edges realizing outer's contracted R-edges.
    """
    r, q = inner.quotient
    if outer.tree != r:
        raise MismatchedTree("outer correspondence does not live on the quotient tree")
    chosen = set(outer.s_vertices)
    new_s = tuple(sorted(v for v in inner.s_vertices if q[v] in chosen))
    new_k = {e for e in inner.contracted if q[e[0]] in chosen}
    wanted = {norm_edge(*e) for e in outer.contracted}
    s_set = set(inner.s_vertices)
    for e in inner.tree.edges:
        if e[0] in s_set and e[1] in s_set and e not in inner.contracted:
            if norm_edge(q[e[0]], q[e[1]]) in wanted:
                new_k.add(e)
    return make_correspondence(inner.tree, new_s, sorted(new_k))


# -- small builders and isomorphism-class enumeration -------------------------

def path_tree(n: int) -> Tree:
    """The chain with vertices v1..vn and consecutive edges."""
    verts = [f"v{i}" for i in range(1, n + 1)]
    edges = [(verts[i], verts[i + 1]) for i in range(n - 1)]
    return validate_tree(verts, edges)


def star_tree(k: int, center: str = "c") -> Tree:
    """A star with the given center and k numbered leaves."""
    verts = [center] + [str(i) for i in range(1, k + 1)]
    edges = [(center, str(i)) for i in range(1, k + 1)]
    return validate_tree(verts, edges)


def tree_from_json(data) -> Tree:
    return validate_tree(data["vertices"], data.get("edges", []))


def rooted_tree_from_json(data) -> RootedTree:
    return RootedTree(tree_from_json(data), str(data["root"]))


def correspondence_from_json(t: Tree, data) -> Correspondence:
    return make_correspondence(t, data["s"], data.get("k", []))


def load_tree_file(path):
    """Read a tree JSON file; returns (Tree, root-or-None)."""
    with open(path, "r", encoding="utf-8") as fh:
        data = json.load(fh)
    tree = tree_from_json(data)
    root = data.get("root")
    if root is not None:
        root = str(root)
        if root not in tree.adjacency:
            raise UnknownVertex(f"root {root!r} not in tree")
    return tree, root


def _prufer_decode(seq, n):
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    for x in seq:
        leaf = min(i for i in range(n) if degree[i] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
    u, v = (i for i in range(n) if degree[i] == 1)
    edges.append((u, v))
    return edges


def _labeled_trees(n):
    if n == 1:
        yield []
        return
    if n == 2:
        yield [(0, 1)]
        return
    for seq in product(range(n), repeat=n - 2):
        yield _prufer_decode(list(seq), n)


def _rooted_code(adj, root, parent=None) -> str:
    subs = sorted(_rooted_code(adj, w, root) for w in adj[root] if w != parent)
    return "(" + "".join(subs) + ")"


def _centers(adj):
    verts = set(adj)
    degree = {v: len(adj[v]) for v in verts}
    layer = [v for v in verts if degree[v] <= 1]
    remaining = set(verts)
    while len(remaining) > 2:
        nxt = []
        for v in layer:
            remaining.discard(v)
            for w in adj[v]:
                if w in remaining:
                    degree[w] -= 1
                    if degree[w] == 1:
                        nxt.append(w)
        layer = nxt
    return sorted(remaining)


def _tree_from_rooted_code(code: str) -> tuple[Tree, str]:
    """Rebuild the canonically labeled tree described by a nested-parens code."""
    counter = [0]
    verts: list[str] = []
    edges: list[tuple[str, str]] = []

    def build(pos: int) -> tuple[str, int]:
        label = f"v{counter[0]}"
        counter[0] += 1
        verts.append(label)
        pos += 1  # consume '('
        while code[pos] == "(":
            child, pos = build(pos)
            edges.append((label, child))
        return label, pos + 1  # consume ')'

    root, _ = build(0)
    return validate_tree(verts, edges), root


def free_trees(n: int) -> list[Tree]:
    """One canonically labeled representative per isomorphism class of trees."""
    if n < 1:
        raise ValueError("n must be >= 1")
    codes = set()
    for edge_list in _labeled_trees(n):
        adj = {i: [] for i in range(n)}
        for a, b in edge_list:
            adj[a].append(b)
            adj[b].append(a)
        cs = _centers(adj)
        code = min(_rooted_code(adj, c) for c in cs)
        codes.add(code)
    return [_tree_from_rooted_code(code)[0] for code in sorted(codes)]


def rooted_trees(n: int) -> list[RootedTree]:
    """One representative per isomorphism class of rooted trees on n vertices."""
    out = []
    for tree in free_trees(n):
        adj = {v: list(tree.adjacency[v]) for v in tree.vertices}
        seen = {}
        for v in tree.vertices:
            code = _rooted_code(adj, v)
            if code not in seen:
                seen[code] = v
        for code in sorted(seen):
            out.append(RootedTree(tree, seen[code]))
    return out
