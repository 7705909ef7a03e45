"""Order complexes, exact simplicial homology, and regular-cell certification.

Homology is computed with exact arithmetic only (rationals or a prime field);
reduced conventions throughout, with the empty complex reporting a single
class in degree -1.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

from .errors import DimensionTooHigh
from .linalg import QQ, PrimeField, gf2_rank, sparse_rank
from .poset import ArborealPoset


@dataclass(frozen=True)
class SimplicialComplex:
    """An abstract simplicial complex; simplices are frozensets of labels."""

    vertices: tuple
    simplices: frozenset

    @staticmethod
    def from_simplices(simplices) -> "SimplicialComplex":
        """Close the given simplices downward and collect their vertices."""
        closed = set()
        stack = [frozenset(s) for s in simplices]
        while stack:
            s = stack.pop()
            if not s or s in closed:
                continue
            closed.add(s)
            for v in s:
                stack.append(s - {v})
        verts = tuple(sorted({v for s in closed for v in s}, key=_label_key))
        return SimplicialComplex(verts, frozenset(closed))

    @property
    def dim(self) -> int:
        if not self.simplices:
            return -1
        return max(len(s) for s in self.simplices) - 1

    @cached_property
    def by_dim(self) -> dict[int, list[tuple]]:
        out: dict[int, list[tuple]] = {}
        for s in self.simplices:
            out.setdefault(len(s) - 1, []).append(tuple(sorted(s, key=_label_key)))
        for d in out:
            out[d].sort()
        return out

    def f_counts(self) -> tuple[int, ...]:
        if not self.simplices:
            return ()
        return tuple(len(self.by_dim.get(d, ())) for d in range(self.dim + 1))

    def euler_characteristic(self) -> int:
        return sum((-1) ** d * c for d, c in enumerate(self.f_counts()))

    def is_closed(self) -> bool:
        for s in self.simplices:
            if len(s) >= 2:
                for v in s:
                    if (s - {v}) not in self.simplices:
                        return False
        covered = {v for s in self.simplices for v in s}
        return covered == set(self.vertices)

    def to_json(self) -> dict:
        return {
            "vertices": [_label_str(v) for v in self.vertices],
            "simplices": [
                [_label_str(v) for v in s]
                for d in sorted(self.by_dim)
                for s in self.by_dim[d]
            ],
        }


def _label_key(v):
    return (0, v) if isinstance(v, int) else (1, str(v))


def _label_str(v):
    return v if isinstance(v, str) else str(v)


class ChainComplex:
    """Simplicial chain complex with integer boundary matrices, augmented.

    boundaries[d] maps d-chains to (d-1)-chains; degree -1 is the augmentation
    target, so reduced homology falls out directly.
    """

    def __init__(self, dims: dict[int, int], boundaries: dict[int, dict]):
        self.dims = dims
        self.boundaries = boundaries  # d -> {(row, col): int}

    @staticmethod
    def of(sc: SimplicialComplex) -> "ChainComplex":
        dims = {-1: 1}
        index: dict[int, dict[tuple, int]] = {}
        for d, simplices in sc.by_dim.items():
            dims[d] = len(simplices)
            index[d] = {s: i for i, s in enumerate(simplices)}
        boundaries: dict[int, dict] = {}
        if 0 in dims:
            boundaries[0] = {(0, j): 1 for j in range(dims[0])}
        for d in sorted(dims):
            if d < 1:
                continue
            entries = {}
            lower = index[d - 1]
            for j, s in enumerate(sc.by_dim[d]):
                for i, v in enumerate(s):
                    face = s[:i] + s[i + 1 :]
                    entries[(lower[face], j)] = -1 if i % 2 else 1
            boundaries[d] = entries
        return ChainComplex(dims, boundaries)

    def check_composition(self) -> bool:
        """Boundary-of-boundary vanishes in every degree."""
        for d, upper in self.boundaries.items():
            lower = self.boundaries.get(d - 1)
            if lower is None:
                continue
            acc: dict[tuple, int] = {}
            rows_of = {}
            for (r, c), v in lower.items():
                rows_of.setdefault(c, []).append((r, v))
            for (m, c), v in upper.items():
                for r, w in rows_of.get(m, ()):
                    acc[(r, c)] = acc.get((r, c), 0) + v * w
            if any(x != 0 for x in acc.values()):
                return False
        return True

    def _rank(self, d: int, field) -> int:
        entries = self.boundaries.get(d)
        if not entries:
            return 0
        ncols = self.dims.get(d, 0)
        if isinstance(field, PrimeField) and field.p == 2:
            rows: dict[int, int] = {}
            for (r, c), v in entries.items():
                if v % 2:
                    rows[r] = rows.get(r, 0) ^ (1 << c)
            return gf2_rank(rows.values())
        rows2: dict[int, dict] = {}
        for (r, c), v in entries.items():
            rows2.setdefault(r, {})[c] = field.of(v)
        return sparse_rank(rows2.values(), field)

    def reduced_betti(self, field=QQ) -> dict[int, int]:
        top = max(self.dims)
        out = {}
        ranks = {d: self._rank(d, field) for d in range(0, top + 2)}
        b_minus1 = self.dims[-1] - ranks.get(0, 0)
        if b_minus1:
            out[-1] = b_minus1
        for d in range(0, top + 1):
            nd = self.dims.get(d, 0)
            b = nd - ranks.get(d, 0) - ranks.get(d + 1, 0)
            if b:
                out[d] = b
        return out


def order_complex_of_relation(n: int, leq, skip=()) -> SimplicialComplex:
    """Order complex of the relation leq on range(n), skipping some elements.

    Simplices are the strictly increasing chains; vertex labels are the
    surviving indices, so the result is deterministic.
    """
    skip = set(skip)
    keep = [i for i in range(n) if i not in skip]
    above = {
        i: [j for j in keep if j != i and leq(i, j) and not leq(j, i)]
        for i in keep
    }
    chains: list[tuple] = []

    def grow(chain: tuple):
        chains.append(chain)
        for j in above[chain[-1]]:
            grow(chain + (j,))

    for i in keep:
        grow((i,))
    return SimplicialComplex(tuple(keep), frozenset(frozenset(c) for c in chains))


def order_complex(poset: ArborealPoset, drop_minimum: bool = True) -> SimplicialComplex:
    skip = {poset.minimum} if drop_minimum else set()
    return order_complex_of_relation(len(poset), poset.leq, skip)


def f_vector(poset: ArborealPoset) -> tuple[int, ...]:
    """Link cell counts by dimension: the rank census away from the minimum."""
    counts: dict[int, int] = {}
    for i, c in enumerate(poset.elements):
        if i == poset.minimum:
            continue
        counts[c.rank - 1] = counts.get(c.rank - 1, 0) + 1
    if not counts:
        return ()
    return tuple(counts.get(d, 0) for d in range(max(counts) + 1))


def betti(sc: SimplicialComplex, field=QQ) -> dict[int, int]:
    """Reduced Betti numbers by degree, over an exact coefficient field."""
    return ChainComplex.of(sc).reduced_betti(field)


@dataclass(frozen=True)
class RegularityReport:
    checked: int
    violations: tuple

    @property
    def ok(self) -> bool:
        return not self.violations


def check_cell_regularity(poset: ArborealPoset, field=QQ) -> RegularityReport:
    """Certify each cell boundary homologically.

    For every non-minimal element p of rank r, the order complex of the open
    interval below p must have the reduced homology of a sphere of dimension
    r - 2 (the empty complex, for r = 1, counts via its degree -1 class).
    """
    m = poset.minimum
    violations = []
    checked = 0
    for i in range(len(poset)):
        if i == m:
            continue
        checked += 1
        r = poset.rank(i)
        interval = [
            j
            for j in range(len(poset))
            if j not in (m, i) and poset.leq(j, i)
        ]
        skip = set(range(len(poset))) - set(interval)
        sc = order_complex_of_relation(len(poset), poset.leq, skip)
        found = betti(sc, field)
        if found != {r - 2: 1}:
            violations.append((i, r, found))
    return RegularityReport(checked, tuple(violations))


def check_intersection_property(poset: ArborealPoset) -> bool:
    """Common lower bounds of any two cells are empty or have a unique maximum."""
    m = poset.minimum
    idxs = [i for i in range(len(poset)) if i != m]
    for a in idxs:
        for b in idxs:
            lower = [i for i in idxs if poset.leq(i, a) and poset.leq(i, b)]
            if not lower:
                continue
            tops = [i for i in lower if all(poset.leq(j, i) for j in lower)]
            if len(tops) != 1:
                return False
    return True


def _force_layout(sc: SimplicialComplex, iterations: int = 60):
    """Deterministic spring embedding in 3-space; coordinates are not canonical."""
    verts = list(sc.vertices)
    n = len(verts)
    pos = []
    for i in range(n):
        a = 2 * math.pi * i / max(n, 1)
        pos.append([math.cos(a), math.sin(a), math.sin(2 * a + 1) * 0.5])
    edges = [tuple(sorted(s, key=_label_key)) for s in sc.simplices if len(s) == 2]
    vi = {v: i for i, v in enumerate(verts)}
    for _ in range(iterations):
        force = [[0.0, 0.0, 0.0] for _ in range(n)]
        for i in range(n):
            for j in range(i + 1, n):
                d = [pos[i][k] - pos[j][k] for k in range(3)]
                r2 = sum(x * x for x in d) + 1e-6
                for k in range(3):
                    force[i][k] += 0.2 * d[k] / r2
                    force[j][k] -= 0.2 * d[k] / r2
        for u, v in edges:
            i, j = vi[u], vi[v]
            d = [pos[i][k] - pos[j][k] for k in range(3)]
            for k in range(3):
                force[i][k] -= 0.3 * d[k]
                force[j][k] += 0.3 * d[k]
        for i in range(n):
            for k in range(3):
                pos[i][k] += 0.05 * force[i][k]
    return verts, pos


def export_complex(sc: SimplicialComplex, format: str = "json") -> bytes:
    """Serialize a complex as structured JSON or as an OFF mesh.

    OFF carries the maximal simplices of dimension 1 and 2 as facet lines; a
    3-dimensional complex is exported through its 2-skeleton.  Higher
    dimensions are rejected.
    """
    import json as _json

    if format == "json":
        return (_json.dumps(sc.to_json(), sort_keys=True, indent=1) + "\n").encode()
    if format != "off":
        raise ValueError(f"unknown export format {format!r}")
    if sc.dim > 3:
        raise DimensionTooHigh(f"cannot mesh a {sc.dim}-dimensional complex")
    verts, pos = _force_layout(sc)
    vi = {v: i for i, v in enumerate(verts)}
    triangles = {tuple(sorted(vi[v] for v in s)) for s in sc.simplices if len(s) == 3}
    covered = {
        (t[a], t[b]) for t in triangles for a, b in ((0, 1), (0, 2), (1, 2))
    }
    edges = {tuple(sorted(vi[v] for v in s)) for s in sc.simplices if len(s) == 2}
    faces = sorted(triangles | {e for e in edges if e not in covered})
    lines = ["OFF", f"{len(verts)} {len(faces)} 0"]
    for v in verts:
        x, y, z = pos[vi[v]]
        lines.append(f"{x:.6f} {y:.6f} {z:.6f}")
    for f in faces:
        lines.append(f"{len(f)} " + " ".join(str(i) for i in f))
    return ("\n".join(lines) + "\n").encode()
