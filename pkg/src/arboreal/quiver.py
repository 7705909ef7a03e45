"""Tree-quiver representations, projectives, perfect complexes, restriction.

A rooted tree is read as a quiver with one arrow from each non-root vertex
to its parent.  Morphisms between projectives are one-dimensional exactly
when the vertices are comparable toward the root; perfect complexes keep
their differentials as scalars tagged with such comparable pairs.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import (
    BrokenDifferential,
    MismatchedTree,
    ShapeMismatch,
    TableMismatch,
    UnknownVertex,
)
from .hypersurface import front_stratum, sample
from .linalg import QQ, SparseMat, cochain_cohomology_dims, sparse_rank
from .sheaves import generator_P, rhom, simple_complex, star_poset
from .trees import Correspondence, RootedTree, Vertex


@dataclass(frozen=True)
class TreeQuiver:
    """A rooted tree as a quiver, one arrow per non-root vertex toward its parent."""

    rooted: RootedTree

    @property
    def vertices(self) -> tuple[Vertex, ...]:
        return self.rooted.tree.vertices

    def arrows(self) -> tuple[tuple[Vertex, Vertex], ...]:
        return self.rooted.arrows()

    def leq(self, u: Vertex, v: Vertex) -> bool:
        return self.rooted.leq(u, v)

    def check(self, v: Vertex):
        if v not in self.rooted.tree.adjacency:
            raise UnknownVertex(f"vertex {v!r} not in quiver")


class Representation:
    """Finite-dimensional representation: one space per vertex, one map per arrow."""

    def __init__(self, quiver: TreeQuiver, dims: dict[Vertex, int], maps: dict[Vertex, list]):
        self.quiver = quiver
        self.dims = {v: int(dims.get(v, 0)) for v in quiver.vertices}
        self.maps = {}
        for alpha, parent in quiver.arrows():
            m = maps.get(alpha)
            rows, cols = self.dims[parent], self.dims[alpha]
            if m is None:
                m = [[Fraction(0)] * cols for _ in range(rows)]
            if len(m) != rows or any(len(r) != cols for r in m):
                raise ShapeMismatch(
                    f"arrow map at {alpha!r} must be {rows}x{cols}"
                )
            self.maps[alpha] = [[Fraction(x) for x in row] for row in m]

    def dim_vector(self) -> dict[Vertex, int]:
        return dict(self.dims)

    def to_json(self) -> dict:
        return {
            "dims": dict(self.dims),
            "maps": {a: [[str(x) for x in row] for row in m] for a, m in self.maps.items()},
        }


def simple(q: TreeQuiver, alpha: Vertex) -> Representation:
    q.check(alpha)
    return Representation(q, {alpha: 1}, {})


def projective(q: TreeQuiver, alpha: Vertex) -> Representation:
    """Rank one along the root path of alpha, identities on its arrows."""
    q.check(alpha)
    below = q.rooted.below(alpha)
    dims = {v: 1 for v in below}
    maps = {}
    for a, parent in q.arrows():
        if a in below and parent in below:
            maps[a] = [[Fraction(1)]]
    return Representation(q, dims, maps)


def hom_ext(q: TreeQuiver, M: Representation, N: Representation) -> tuple[int, int]:
    """(dim Hom, dim Ext^1) via the two-term arrow complex; the path algebra of
    a tree quiver is hereditary, so there is nothing beyond Ext^1."""
    if M.quiver.vertices != q.vertices or N.quiver.vertices != q.vertices:
        raise ShapeMismatch("representations live on a different quiver")
    offsets0 = {}
    pos = 0
    for v in q.vertices:
        offsets0[v] = pos
        pos += N.dims[v] * M.dims[v]
    dim0 = pos
    offsets1 = {}
    pos = 0
    for a, parent in q.arrows():
        offsets1[a] = pos
        pos += N.dims[parent] * M.dims[a]
    dim1 = pos
    rows: list[dict] = [dict() for _ in range(dim1)]
    for a, parent in q.arrows():
        nmap = N.maps[a]
        mmap = M.maps[a]
        for r in range(N.dims[parent]):
            for c in range(M.dims[a]):
                row = rows[offsets1[a] + r * M.dims[a] + c]
                # (n_a o phi_a)[r, c]
                for t in range(N.dims[a]):
                    v = nmap[r][t]
                    if v:
                        col = offsets0[a] + t * M.dims[a] + c
                        row[col] = row.get(col, Fraction(0)) + v
                # -(phi_parent o m_a)[r, c]
                for t in range(M.dims[parent]):
                    v = mmap[t][c]
                    if v:
                        col = offsets0[parent] + r * M.dims[parent] + t
                        row[col] = row.get(col, Fraction(0)) - v
    rank = sparse_rank((r for r in rows if r), QQ)
    return dim0 - rank, dim1 - rank


def euler_form(q: TreeQuiver, M: Representation, N: Representation) -> int:
    """dim Hom - dim Ext^1, expressed by dimension vectors alone."""
    total = sum(M.dims[v] * N.dims[v] for v in q.vertices)
    total -= sum(M.dims[a] * N.dims[p] for a, p in q.arrows())
    return total


class PerfectComplex:
    """A bounded complex of sums of projectives with scalar differentials.

    terms[n] lists projective labels; diffs[n][(r, c)] is the coefficient of
    the unique basis morphism from summand c of term n into summand r of
    term n+1, which exists only for comparable labels.
    """

    def __init__(self, quiver: TreeQuiver, terms: dict[int, tuple], diffs: dict[int, dict]):
        self.quiver = quiver
        self.terms = {n: tuple(t) for n, t in terms.items() if t}
        self.diffs = {}
        for n, entries in diffs.items():
            kept = {k: Fraction(v) for k, v in entries.items() if v}
            if kept:
                self.diffs[n] = kept
        self._validate()

    def _validate(self):
        for n, entries in self.diffs.items():
            src = self.terms.get(n, ())
            tgt = self.terms.get(n + 1, ())
            for (r, c), v in entries.items():
                if not (0 <= r < len(tgt) and 0 <= c < len(src)):
                    raise BrokenDifferential(f"entry ({r},{c}) out of range in degree {n}")
                if not self.quiver.leq(src[c], tgt[r]):
                    raise BrokenDifferential(
                        f"entry P_{src[c]} -> P_{tgt[r]} is not an admissible morphism"
                    )
        for n in self.diffs:
            if n + 1 not in self.diffs:
                continue
            prod: dict[tuple, Fraction] = {}
            for (m, c), v in self.diffs[n].items():
                for (r, m2), w in self.diffs[n + 1].items():
                    if m2 == m:
                        prod[(r, c)] = prod.get((r, c), Fraction(0)) + v * w
            if any(x for x in prod.values()):
                raise BrokenDifferential(f"differential does not square to zero at degree {n}")

    def is_zero(self) -> bool:
        return not self.terms

    def degrees(self):
        return sorted(self.terms)

    def minimized(self) -> "PerfectComplex":
        """Cancel invertible diagonal entries until none remain.

        Only entries between equal labels are invertible; pivots are taken in
        (degree, row, col) order so the reduced model is deterministic.
        """
        terms = {n: list(t) for n, t in self.terms.items()}
        diffs = {n: dict(e) for n, e in self.diffs.items()}
        while True:
            pivot = None
            for n in sorted(diffs):
                src = terms.get(n, [])
                tgt = terms.get(n + 1, [])
                candidates = [
                    (r, c)
                    for (r, c), v in diffs[n].items()
                    if v and src[c] == tgt[r]
                ]
                if candidates:
                    pivot = (n, min(candidates))
                    break
            if pivot is None:
                break
            n, (pr, pc) = pivot
            u = diffs[n][(pr, pc)]
            old = diffs[n]
            col_of = {r: v for (r, c), v in old.items() if c == pc}
            row_of = {c: v for (r, c), v in old.items() if r == pr}
            new_entries = {}
            for (r, c), v in old.items():
                if r == pr or c == pc:
                    continue
                corr = v - col_of.get(r, Fraction(0)) * row_of.get(c, Fraction(0)) / u
                if corr:
                    new_entries[(r, c)] = corr
            diffs[n] = new_entries
            if n - 1 in diffs:
                diffs[n - 1] = {
                    (r, c): v for (r, c), v in diffs[n - 1].items() if r != pc
                }
            if n + 1 in diffs:
                diffs[n + 1] = {
                    (r, c): v for (r, c), v in diffs[n + 1].items() if c != pr
                }
            terms[n].pop(pc)
            terms[n + 1].pop(pr)
            diffs[n] = _reindex(diffs[n], pr, pc)
            if n - 1 in diffs:
                diffs[n - 1] = _reindex(diffs[n - 1], pc, None)
            if n + 1 in diffs:
                diffs[n + 1] = _reindex(diffs[n + 1], None, pr)
        return PerfectComplex(self.quiver, {n: tuple(t) for n, t in terms.items()}, diffs)

    def to_json(self) -> dict:
        return {
            "terms": {str(n): list(t) for n, t in sorted(self.terms.items())},
            "diffs": {
                str(n): [[r, c, str(v)] for (r, c), v in sorted(e.items())]
                for n, e in sorted(self.diffs.items())
            },
        }

    def __repr__(self):
        if not self.terms:
            return "PerfectComplex(0)"
        bits = []
        for n in self.degrees():
            bits.append(f"{n}:[" + ",".join(self.terms[n]) + "]")
        return "PerfectComplex(" + " ".join(bits) + ")"


def _reindex(entries: dict, drop_row, drop_col) -> dict:
    out = {}
    for (r, c), v in entries.items():
        nr = r - 1 if drop_row is not None and r > drop_row else r
        nc = c - 1 if drop_col is not None and c > drop_col else c
        out[(nr, nc)] = v
    return out


def one_term(q: TreeQuiver, alpha: Vertex, degree: int = 0) -> PerfectComplex:
    q.check(alpha)
    return PerfectComplex(q, {degree: (alpha,)}, {})


def std_resolution(q: TreeQuiver, M: Representation) -> PerfectComplex:
    """Two-term projective resolution of a representation.

    Degree -1 collects one parent projective per arrow and source basis
    vector; degree 0 one projective per vertex and basis vector.  This is the
    standard hereditary resolution.
    """
    deg0 = []
    pos0 = {}
    for v in q.vertices:
        for i in range(M.dims[v]):
            pos0[(v, i)] = len(deg0)
            deg0.append(v)
    deg1 = []
    pos1 = {}
    for a, parent in q.arrows():
        for i in range(M.dims[a]):
            pos1[(a, i)] = len(deg1)
            deg1.append(parent)
    entries = {}
    for a, parent in q.arrows():
        mmap = M.maps[a]
        for i in range(M.dims[a]):
            col = pos1[(a, i)]
            for j in range(M.dims[parent]):
                v = mmap[j][i]
                if v:
                    entries[(pos0[(parent, j)], col)] = v
            entries[(pos0[(a, i)], col)] = Fraction(-1)
    if not deg1:
        return PerfectComplex(q, {0: tuple(deg0)}, {})
    return PerfectComplex(q, {-1: tuple(deg1), 0: tuple(deg0)}, {-1: entries})


def hom_dims(X: PerfectComplex, Y: PerfectComplex, field=QQ) -> dict[int, int]:
    """Graded dimensions of the morphism complex of two perfect complexes."""
    if X.quiver.vertices != Y.quiver.vertices:
        raise MismatchedTree("complexes live on different quivers")
    q = X.quiver
    index: dict[int, dict] = {}
    for n in set(
        j - i for i in X.terms for j in Y.terms
    ):
        idx = {}
        for i in X.terms:
            for a_pos, a in enumerate(X.terms[i]):
                for b_pos, b in enumerate(Y.terms.get(i + n, ())):
                    if q.leq(a, b):
                        idx[(i, a_pos, b_pos)] = len(idx)
        if idx:
            index[n] = idx
    dims = {n: len(idx) for n, idx in index.items()}
    diffs = {}
    for n in sorted(index):
        src = index[n]
        tgt = index.get(n + 1, {})
        mat = SparseMat(len(tgt), len(src))
        for (i, a_pos, b_pos), col in src.items():
            # d_Y o phi
            for (r, c), v in Y.diffs.get(i + n, {}).items():
                if c == b_pos:
                    row = tgt.get((i, a_pos, r))
                    if row is not None:
                        mat.add_to(row, col, v, field)
            # -(-1)^n phi o d_X
            sign = Fraction(-((-1) ** n))
            for (r, c), v in X.diffs.get(i - 1, {}).items():
                if r == a_pos:
                    row = tgt.get((i - 1, c, b_pos))
                    if row is not None:
                        mat.add_to(row, col, sign * v, field)
        diffs[n] = mat
    return cochain_cohomology_dims(dims, diffs, field)


def sub_quiver(q: TreeQuiver, c: Correspondence) -> TreeQuiver:
    """The induced quiver on the subtree, rooted at its vertex nearest the root."""
    sub_tree = q.rooted.tree.induced_tree(c.s_vertices)
    new_root = min(c.s_vertices, key=lambda v: (q.rooted.depth[v], v))
    return TreeQuiver(RootedTree(sub_tree, new_root))


def quotient_quiver(q: TreeQuiver, c: Correspondence) -> TreeQuiver:
    """The quiver of the quotient tree, rooted at the fiber nearest the root."""
    r, qmap = c.quotient
    anchor = min(c.s_vertices, key=lambda v: (q.rooted.depth[v], v))
    return TreeQuiver(RootedTree(r, qmap[anchor]))


def functor_istar(q: TreeQuiver, c: Correspondence, X: PerfectComplex) -> PerfectComplex:
    """Delete the projectives outside the subtree, keeping all other entries."""
    if c.tree != q.rooted.tree:
        raise MismatchedTree("correspondence lives on a different tree")
    sq = sub_quiver(q, c)
    keep = set(c.s_vertices)
    terms = {}
    keep_pos = {}
    for n, labels in X.terms.items():
        kept = [(p, lab) for p, lab in enumerate(labels) if lab in keep]
        keep_pos[n] = {p: i for i, (p, _) in enumerate(kept)}
        terms[n] = tuple(lab for _, lab in kept)
    diffs = {}
    for n, entries in X.diffs.items():
        new = {}
        for (r, cpos), v in entries.items():
            nr = keep_pos.get(n + 1, {}).get(r)
            nc = keep_pos.get(n, {}).get(cpos)
            if nr is not None and nc is not None:
                new[(nr, nc)] = v
        diffs[n] = new
    try:
        return PerfectComplex(sq, terms, diffs)
    except BrokenDifferential:
        raise
    except Exception as exc:  # pragma: no cover - defensive
        raise BrokenDifferential(str(exc)) from exc


def functor_qshriek(q_s: TreeQuiver, c: Correspondence, X: PerfectComplex) -> PerfectComplex:
    """Relabel each projective by its fiber; contracted morphisms become scalars."""
    r, qmap = c.quotient
    if q_s.rooted.root not in qmap:
        raise MismatchedTree("sub-quiver root is not in the subtree")
    rq = TreeQuiver(RootedTree(r, qmap[q_s.rooted.root]))
    terms = {n: tuple(qmap[lab] for lab in labels) for n, labels in X.terms.items()}
    return PerfectComplex(rq, terms, X.diffs)


def restriction(q: TreeQuiver, c: Correspondence, X: PerfectComplex) -> PerfectComplex:
    """The composite functor: delete outside the subtree, contract fibers, reduce."""
    inner = functor_istar(q, c, X)
    sq = inner.quiver
    return functor_qshriek(sq, c, inner).minimized()


def kernel_vanishing(q: TreeQuiver, c: Correspondence) -> bool:
    """Every generator the restriction is meant to kill becomes acyclic."""
    for alpha in q.vertices:
        if alpha not in set(c.s_vertices):
            if not restriction(q, c, one_term(q, alpha)).is_zero():
                return False
    contracted = set(c.contracted)
    for alpha, parent in q.arrows():
        if tuple(sorted((alpha, parent))) in contracted:
            res = restriction(q, c, std_resolution(q, simple(q, alpha)))
            if not res.is_zero():
                return False
    return True


@dataclass
class LocalCompareReport:
    correspondence: Correspondence
    stratum: str
    table_sheaf: dict
    table_quiver: dict
    simples_vanish: bool

    @property
    def ok(self) -> bool:
        return self.table_sheaf == self.table_quiver and self.simples_vanish


def local_model_compare(rt: RootedTree, c: Correspondence) -> LocalCompareReport:
    """Compare the microlocal model near a cell with the quotient-quiver model.

    The sheaf side restricts the generators to the open star of the front
    stratum of a sample point; the module side applies the restriction
    functor.  Tables of graded hom dimensions must agree under matching a
    subtree generator with the projective of its fiber.
    """
    tree = rt.tree
    q = TreeQuiver(rt)
    pt = sample(tree, c)
    sigma = front_stratum(rt, pt)
    star = star_poset(tree, sigma)
    gens = {}
    for gamma in c.s_vertices:
        gens[gamma] = generator_P(rt, gamma).restrict(star)
    table_sheaf = {}
    for ga in c.s_vertices:
        for gb in c.s_vertices:
            table_sheaf[(ga, gb)] = rhom(gens[ga], gens[gb])
    table_quiver = {}
    images = {gamma: restriction(q, c, one_term(q, gamma)) for gamma in c.s_vertices}
    for ga in c.s_vertices:
        for gb in c.s_vertices:
            table_quiver[(ga, gb)] = hom_dims(images[ga], images[gb])
    contracted = set(c.contracted)
    simples_vanish = True
    for alpha, parent in q.arrows():
        if tuple(sorted((alpha, parent))) in contracted:
            sc = simple_complex(rt, alpha).restrict(star)
            if sc.support():
                nonzero = any(sc.stalk_cohomology(i) for i in sc.support())
                if nonzero:
                    simples_vanish = False
    report = LocalCompareReport(
        c, sigma.as_string(), table_sheaf, table_quiver, simples_vanish
    )
    if not report.ok:
        bad = [
            pair
            for pair in table_sheaf
            if table_sheaf[pair] != table_quiver.get(pair)
        ]
        raise TableMismatch(
            f"local tables differ at {bad[:3]} for {c!r} (stratum {sigma.as_string()})"
            if bad
            else f"contracted simples do not vanish near {c!r}"
        )
    return report


def corner_hom_pattern(q: TreeQuiver, c: Correspondence, representatives: dict) -> dict:
    """Hom dimensions between chosen fiber representatives, for sanity checks.

    The corner of the path algebra at one representative per fiber matches
    the quotient quiver exactly when each representative is the root-nearest
    vertex of its fiber.
    """
    out = {}
    for fa, va in representatives.items():
        for fb, vb in representatives.items():
            out[(fa, fb)] = 1 if q.leq(va, vb) else 0
    return out
