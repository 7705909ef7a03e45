"""The rectilinear model: quadrants, charts, classification, and corays.

A point of the glued space is held in one Euclidean chart (one chart per
vertex, coordinates indexed by the other vertices).  Chart overlaps follow
the path-gluing rule: transporting along the unique path shifts the path
coordinates by one step and requires them all to be nonnegative.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property

from .errors import (
    AxisNotZero,
    BadIndexSet,
    NonpositiveScale,
    NotInChart,
    NotOnHypersurface,
    UnknownVertex,
)
from .trees import Correspondence, RootedTree, Tree, Vertex, make_correspondence


def _sign(x) -> int:
    return (x > 0) - (x < 0)


_SIGN_CHAR = {1: "+", 0: "0", -1: "-"}
_CHAR_SIGN = {"+": 1, "0": 0, "-": -1}


@dataclass(frozen=True)
class SignVector:
    """A stratum label: one sign in {-1, 0, +1} per vertex, in sorted order."""

    vertices: tuple[Vertex, ...]
    signs: tuple[int, ...]

    def __post_init__(self):
        if len(self.vertices) != len(self.signs):
            raise BadIndexSet("one sign per vertex required")

    def of(self, v: Vertex) -> int:
        try:
            return self.signs[self.vertices.index(v)]
        except ValueError:
            raise UnknownVertex(f"vertex {v!r} not indexed") from None

    def leq(self, other: "SignVector") -> bool:
        """Exit order: every coordinate is zero or agrees with the other."""
        return all(a == 0 or a == b for a, b in zip(self.signs, other.signs))

    def as_string(self) -> str:
        return "".join(_SIGN_CHAR[s] for s in self.signs)

    @staticmethod
    def from_string(tree: Tree, text: str) -> "SignVector":
        if len(text) != len(tree.vertices):
            raise BadIndexSet(f"need {len(tree.vertices)} signs, got {len(text)}")
        return SignVector(tree.vertices, tuple(_CHAR_SIGN[ch] for ch in text))

    def __repr__(self):
        return f"SignVector({self.as_string()})"


@dataclass(frozen=True)
class LPoint:
    """A point in the Euclidean chart of one vertex, with exact coordinates."""

    chart: Vertex
    coords: tuple[tuple[Vertex, Fraction], ...]

    @cached_property
    def coord_map(self) -> dict[Vertex, Fraction]:
        return dict(self.coords)

    @staticmethod
    def make(chart: Vertex, mapping) -> "LPoint":
        items = tuple(sorted((str(v), Fraction(x)) for v, x in mapping.items()))
        return LPoint(str(chart), items)

    def to_json(self) -> dict:
        return {
            "chart": self.chart,
            "coords": {v: str(x) for v, x in self.coords},
        }

    def __repr__(self):
        inner = ", ".join(f"{v}={x}" for v, x in self.coords)
        return f"LPoint[{self.chart}]({inner})"


@dataclass(frozen=True)
class Codirection:
    """A coordinate codirection at a stratum, conormal along a vanishing axis."""

    base: SignVector
    axis: Vertex
    sign: int

    def __post_init__(self):
        if self.base.of(self.axis) != 0:
            raise AxisNotZero(f"stratum is not constant zero along {self.axis!r}")
        if self.sign not in (1, -1):
            raise BadIndexSet("sign must be +1 or -1")


def _check_point_index(rt: RootedTree, point) -> dict[Vertex, Fraction]:
    if set(point) != set(rt.tree.vertices):
        raise BadIndexSet("point must be indexed exactly by the vertex set")
    return {v: Fraction(point[v]) for v in rt.tree.vertices}


def in_hypersurface(rt: RootedTree, point) -> bool:
    """Membership in the union of quadrant boundaries, in reduced form."""
    x = _check_point_index(rt, point)
    for alpha in rt.tree.vertices:
        if x[alpha] == 0 and all(x[b] > 0 for b in rt.below(alpha) if b != alpha):
            return True
    return False


def stratum_of(rt: RootedTree, point) -> SignVector:
    x = _check_point_index(rt, point)
    return SignVector(rt.tree.vertices, tuple(_sign(x[v]) for v in rt.tree.vertices))


def _chart_check(t: Tree, p: LPoint):
    if p.chart not in t.adjacency:
        raise UnknownVertex(f"chart {p.chart!r} not in tree")
    if set(p.coord_map) != set(t.vertices) - {p.chart}:
        raise BadIndexSet("chart coordinates must be indexed by the other vertices")


def transport(t: Tree, p: LPoint, target: Vertex) -> LPoint:
    """Express the point in another chart, shifting along the connecting path.

    Raises NotInChart when a path coordinate is negative, i.e. the point lies
    outside the closed quadrant along which the two charts are glued.
    """
    _chart_check(t, p)
    if target not in t.adjacency:
        raise UnknownVertex(f"vertex {target!r} not in tree")
    if target == p.chart:
        return p
    path = t.path(p.chart, target)
    old = p.coord_map
    for v in path[1:]:
        if old[v] < 0:
            raise NotInChart(f"coordinate at {v!r} is negative on the gluing path")
    new = dict(old)
    del new[target]
    for i in range(len(path) - 1):
        new[path[i]] = old[path[i + 1]]
    return LPoint.make(target, new)


def classify(t: Tree, p: LPoint) -> Correspondence:
    """The correspondence of the stratum containing the point.

    The subtree collects the charts containing the point (prefix-nonnegative
    paths); an edge is contracted when its gluing coordinate is positive.
    """
    _chart_check(t, p)
    alpha = p.chart
    x = p.coord_map
    s = {alpha}
    queue = [alpha]
    while queue:
        u = queue.pop()
        for w in t.adjacency[u]:
            if w in s:
                continue
            # only extend outward from the chart vertex
            if t.distance(alpha, w) == t.distance(alpha, u) + 1 and x[w] >= 0:
                s.add(w)
                queue.append(w)
    k = []
    for u, v in t.induced_edges(sorted(s)):
        far = v if t.distance(alpha, v) > t.distance(alpha, u) else u
        if far != alpha and x[far] > 0:
            k.append((u, v))
    return make_correspondence(t, sorted(s), k)


def sample(t: Tree, c: Correspondence, chart: Vertex | None = None) -> LPoint:
    """A canonical point of the stratum of c, with coordinates in {-1, 0, +1}.

    The chart defaults to the least vertex of the subtree.  Fiber-mates of the
    chart sit at +1; entry points of other fibers at 0, their remainder at +1;
    entry points of complement parts at -1, their remainder at 0.
    """
    if c.tree != t:
        raise BadIndexSet("correspondence lives on a different tree")
    alpha = chart if chart is not None else c.s_vertices[0]
    if alpha not in c.fiber_of:
        raise NotInChart(f"chart {alpha!r} is not in the subtree")
    own_fiber = c.fiber_of[alpha]
    coords: dict[Vertex, Fraction] = {}
    for part, is_fiber in c.parts():
        nearest = min(part, key=lambda v: (t.distance(alpha, v), v))
        for v in part:
            if v == alpha:
                continue
            if is_fiber:
                if part == own_fiber:
                    coords[v] = Fraction(1)
                else:
                    coords[v] = Fraction(0) if v == nearest else Fraction(1)
            else:
                coords[v] = Fraction(-1) if v == nearest else Fraction(0)
    return LPoint.make(alpha, coords)


def dilate(p: LPoint, r) -> LPoint:
    r = Fraction(r)
    if r <= 0:
        raise NonpositiveScale(f"scale {r} is not positive")
    return LPoint.make(p.chart, {v: x * r for v, x in p.coords})


def coray_fiber(rt: RootedTree, point) -> tuple[tuple[Vertex, tuple[Codirection, ...]], ...]:
    """All quadrant boundaries through the point with their positive codirections.

    For each vertex a whose quadrant boundary contains the point, lists the
    codirections +dx_b for the vanishing coordinates b <= a.
    """
    x = _check_point_index(rt, point)
    if not in_hypersurface(rt, point):
        raise NotOnHypersurface("point is not on the hypersurface")
    base = stratum_of(rt, point)
    out = []
    for alpha in rt.tree.vertices:
        below = sorted(rt.below(alpha))
        if all(x[b] >= 0 for b in below) and any(x[b] == 0 for b in below):
            rays = tuple(
                Codirection(base, b, 1) for b in below if x[b] == 0
            )
            out.append((alpha, rays))
    return tuple(out)


def front_stratum(rt: RootedTree, p: LPoint) -> SignVector:
    """The sign stratum of the point's front projection.

    The chart of a vertex covers its quadrant boundary by folding along the
    root path: past the deepest negative path coordinate every lower path
    coordinate becomes positive and the fold vertex lands at zero; above the
    fold the path coordinates shift up by one step.  Off-path coordinates
    project identically.
    """
    _chart_check(rt.tree, p)
    path = tuple(reversed(rt.path_to_root(p.chart)))  # root first
    m = len(path)
    x = p.coord_map
    t_coords = [x[path[i]] for i in range(m - 1)]
    signs: dict[Vertex, int] = {}
    fold = None
    for i in range(m - 2, -1, -1):
        if t_coords[i] < 0:
            fold = i
            break
    if fold is None:
        signs[path[0]] = 0
        for i in range(1, m):
            signs[path[i]] = _sign(t_coords[i - 1])
    else:
        for i in range(fold + 1):
            signs[path[i]] = 1
        signs[path[fold + 1]] = 0
        for i in range(fold + 2, m):
            signs[path[i]] = _sign(t_coords[i - 1])
    for v in rt.tree.vertices:
        if v not in signs:
            signs[v] = _sign(x[v])
    return SignVector(rt.tree.vertices, tuple(signs[v] for v in rt.tree.vertices))


def point_from_json(data) -> dict[Vertex, Fraction]:
    return {str(v): Fraction(s) for v, s in data.items()}


def lpoint_from_json(data) -> LPoint:
    return LPoint.make(data["chart"], {v: Fraction(s) for v, s in data["coords"].items()})
