"""Constructible sheaves on the sign stratification, as exit-poset functors.

Strata are sign vectors ordered by generization; a sheaf is a functor
assigning a stalk to each stratum and a map to each exit (generization)
relation.  Derived Homs are computed by the normalized bar complex over
strict chains of the poset, and derived sections over an open (up-closed)
union of strata by the same complex against the constant functor.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product

from .errors import (
    NotAChainMap,
    NotComparable,
    NotInSpan,
    NotUpClosed,
    RootHasNoParent,
    UnknownVertex,
)
from .hypersurface import Codirection, SignVector
from .linalg import (
    QQ,
    SparseMat,
    cochain_cohomology_dims,
    cochain_map_iso_on_cohomology,
    solve,
)
from .trees import RootedTree, Tree, Vertex

Signs = tuple[int, ...]


def _signs_leq(a: Signs, b: Signs) -> bool:
    return all(x == 0 or x == y for x, y in zip(a, b))


@lru_cache(maxsize=None)
def _full_chains(n: int) -> tuple[tuple[int, ...], ...]:
    elements = list(product((-1, 0, 1), repeat=n))
    above = [
        [j for j, b in enumerate(elements) if j != i and _signs_leq(a, b)]
        for i, a in enumerate(elements)
    ]
    chains: list[tuple[int, ...]] = []

    def grow(chain):
        chains.append(chain)
        for j in above[chain[-1]]:
            grow(chain + (j,))

    for i in range(len(elements)):
        grow((i,))
    return tuple(chains)


class StratumPoset:
    """A set of sign strata with the exit order (zero entries may open up)."""

    def __init__(self, tree: Tree, elements: tuple[Signs, ...]):
        self.tree = tree
        self.elements = elements
        self.index = {e: i for i, e in enumerate(elements)}
        self._chains = None

    def __len__(self):
        return len(self.elements)

    def leq(self, i: int, j: int) -> bool:
        return _signs_leq(self.elements[i], self.elements[j])

    def sign_vector(self, i: int) -> SignVector:
        return SignVector(self.tree.vertices, self.elements[i])

    @property
    def is_full(self) -> bool:
        return len(self.elements) == 3 ** len(self.tree.vertices)

    def cover_pairs(self) -> list[tuple[int, int]]:
        """Single-coordinate openings that stay inside the poset."""
        out = []
        for i, e in enumerate(self.elements):
            for pos, s in enumerate(e):
                if s != 0:
                    continue
                for t in (-1, 1):
                    f = e[:pos] + (t,) + e[pos + 1 :]
                    j = self.index.get(f)
                    if j is not None:
                        out.append((i, j))
        return out

    def chains(self) -> tuple[tuple[int, ...], ...]:
        """All strict ascending chains, including singletons."""
        if self.is_full:
            return _full_chains(len(self.tree.vertices))
        if self._chains is None:
            above = [
                [j for j in range(len(self.elements)) if j != i and self.leq(i, j)]
                for i in range(len(self.elements))
            ]
            chains: list[tuple[int, ...]] = []

            def grow(chain):
                chains.append(chain)
                for j in above[chain[-1]]:
                    grow(chain + (j,))

            for i in range(len(self.elements)):
                grow((i,))
            self._chains = tuple(chains)
        return self._chains

    def subposet(self, members) -> "StratumPoset":
        keep = tuple(e for e in self.elements if e in set(members))
        return StratumPoset(self.tree, keep)

    def is_up_closed(self, members) -> bool:
        return self._up_closed(set(members))

    def _up_closed(self, mset) -> bool:
        for e in mset:
            for f in self.elements:
                if _signs_leq(e, f) and f not in mset:
                    return False
        return True


@lru_cache(maxsize=None)
def full_poset(tree: Tree) -> StratumPoset:
    elements = tuple(product((-1, 0, 1), repeat=len(tree.vertices)))
    return StratumPoset(tree, elements)


def star_poset(tree: Tree, sigma: SignVector) -> StratumPoset:
    base = full_poset(tree)
    if all(s == 0 for s in sigma.signs):
        return base
    keep = tuple(e for e in base.elements if _signs_leq(sigma.signs, e))
    return StratumPoset(tree, keep)


Matrix = list


def _mat(rows: int, cols: int, fill=Fraction(0)) -> Matrix:
    return [[fill] * cols for _ in range(rows)]


def _mat_mul(a: Matrix, b: Matrix) -> Matrix:
    rows = len(a)
    mid = len(b)
    cols = len(b[0]) if b else 0
    out = _mat(rows, cols)
    for i in range(rows):
        for j in range(mid):
            x = a[i][j]
            if x:
                for c in range(cols):
                    if b[j][c]:
                        out[i][c] += x * b[j][c]
    return out


def _mat_eq(a: Matrix, b: Matrix) -> bool:
    if len(a) != len(b):
        return False
    return all(ra == rb for ra, rb in zip(a, b))


class ExitFunctor:
    """Stalks and generization maps over a stratum poset, in one degree."""

    def __init__(self, poset: StratumPoset, dims: tuple[int, ...], cover_maps: dict):
        self.poset = poset
        self.dims = dims
        self.cover_maps = cover_maps  # (i, j) -> matrix dims[j] x dims[i]

    def map(self, i: int, j: int) -> Matrix:
        """The generization map from stratum i to stratum j >= i."""
        if self.dims[i] == 0 or self.dims[j] == 0:
            return _mat(self.dims[j], self.dims[i])
        if i == j:
            return [[Fraction(int(r == c)) for c in range(self.dims[i])] for r in range(self.dims[i])]
        a = self.poset.elements[i]
        b = self.poset.elements[j]
        cur = i
        acc = None
        for pos in range(len(a)):
            if a[pos] == b[pos]:
                continue
            nxt_signs = self.poset.elements[cur][:pos] + (b[pos],) + self.poset.elements[cur][pos + 1 :]
            nxt = self.poset.index[nxt_signs]
            step = self.cover_maps.get((cur, nxt), _mat(self.dims[nxt], self.dims[cur]))
            acc = step if acc is None else _mat_mul(step, acc)
            cur = nxt
        return acc if acc is not None else _mat(self.dims[j], self.dims[i])

    def support(self) -> set[int]:
        return {i for i, d in enumerate(self.dims) if d}

    def check_functorial(self) -> bool:
        """Commutativity of all two-step opening squares."""
        n = len(self.poset.elements)
        for i in range(n):
            e = self.poset.elements[i]
            zero_positions = [p for p, s in enumerate(e) if s == 0]
            for pi in range(len(zero_positions)):
                for pj in range(pi + 1, len(zero_positions)):
                    for si in (-1, 1):
                        for sj in (-1, 1):
                            p1, p2 = zero_positions[pi], zero_positions[pj]
                            f = list(e)
                            f[p1], f[p2] = si, sj
                            j = self.poset.index.get(tuple(f))
                            if j is None:
                                continue
                            m1 = list(e)
                            m1[p1] = si
                            m2 = list(e)
                            m2[p2] = sj
                            k1 = self.poset.index.get(tuple(m1))
                            k2 = self.poset.index.get(tuple(m2))
                            if k1 is None or k2 is None:
                                continue
                            via1 = _mat_mul(self.map(k1, j), self.map(i, k1))
                            via2 = _mat_mul(self.map(k2, j), self.map(i, k2))
                            if not _mat_eq(via1, via2):
                                return False
        return True

    def restrict(self, sub: StratumPoset) -> "ExitFunctor":
        dims = tuple(self.dims[full_idx] for full_idx in (self.poset.index[e] for e in sub.elements))
        maps = {}
        for (i, j) in sub.cover_pairs():
            gi = self.poset.index[sub.elements[i]]
            gj = self.poset.index[sub.elements[j]]
            if self.dims[gi] and self.dims[gj]:
                maps[(i, j)] = self.map(gi, gj)
        return ExitFunctor(sub, dims, maps)

    def to_json(self) -> dict:
        return {
            "strata": [self.poset.sign_vector(i).as_string() for i in range(len(self.poset))],
            "dims": list(self.dims),
            "maps": {
                f"{i}->{j}": [[str(x) for x in row] for row in m]
                for (i, j), m in sorted(self.cover_maps.items())
            },
        }


def indicator_functor(poset: StratumPoset, members) -> ExitFunctor:
    """Rank-one constant functor on an up-closed set of strata, zero outside."""
    mset = set(members)
    dims = tuple(int(i in mset) for i in range(len(poset)))
    maps = {
        (i, j): [[Fraction(1)]]
        for (i, j) in poset.cover_pairs()
        if i in mset and j in mset
    }
    return ExitFunctor(poset, dims, maps)


def _u_region(rt: RootedTree, alpha: Vertex, poset: StratumPoset) -> set[int]:
    """Strata where some coordinate at or below alpha is negative."""
    below = [rt.tree.vertices.index(b) for b in rt.below(alpha)]
    return {
        i
        for i, e in enumerate(poset.elements)
        if any(e[p] == -1 for p in below)
    }


def generator_P(rt: RootedTree, alpha: Vertex) -> ExitFunctor:
    """Zero-extension generator: rank one exactly where the open region of
    alpha meets the stratification."""
    if alpha not in rt.tree.adjacency:
        raise UnknownVertex(f"vertex {alpha!r} not in tree")
    poset = full_poset(rt.tree)
    return indicator_functor(poset, _u_region(rt, alpha, poset))


def constant_functor(rt: RootedTree) -> ExitFunctor:
    poset = full_poset(rt.tree)
    return indicator_functor(poset, range(len(poset)))


class FunctorComplex:
    """A bounded complex of exit functors with stratum-wise differentials."""

    def __init__(self, poset: StratumPoset, terms: dict[int, ExitFunctor], diffs: dict[int, dict[int, Matrix]]):
        self.poset = poset
        self.terms = dict(terms)
        self.diffs = {n: dict(d) for n, d in diffs.items()}
        self._validate()

    @staticmethod
    def of_functor(f: ExitFunctor, degree: int = 0) -> "FunctorComplex":
        return FunctorComplex(f.poset, {degree: f}, {})

    def term_dims(self, n: int, i: int) -> int:
        t = self.terms.get(n)
        return t.dims[i] if t is not None else 0

    def diff_at(self, n: int, i: int) -> Matrix:
        rows = self.term_dims(n + 1, i)
        cols = self.term_dims(n, i)
        d = self.diffs.get(n, {}).get(i)
        return d if d is not None else _mat(rows, cols)

    def degrees(self):
        return sorted(self.terms)

    def support(self) -> set[int]:
        out = set()
        for t in self.terms.values():
            out |= t.support()
        return out

    def _validate(self):
        for n, dmap in self.diffs.items():
            for i, m in dmap.items():
                if len(m) != self.term_dims(n + 1, i) or (m and len(m[0]) != self.term_dims(n, i)):
                    raise NotAChainMap(f"differential shape mismatch at degree {n}, stratum {i}")
        for n in list(self.terms):
            if (n in self.diffs) and ((n + 1) in self.diffs):
                for i in range(len(self.poset)):
                    comp = _mat_mul(self.diff_at(n + 1, i), self.diff_at(n, i))
                    if any(any(x for x in row) for row in comp):
                        raise NotAChainMap(f"differential does not square to zero at stratum {i}")
        # naturality of the differential in the exit direction
        for n in self.diffs:
            src = self.terms.get(n)
            tgt = self.terms.get(n + 1)
            if src is None or tgt is None:
                continue
            for (i, j) in self.poset.cover_pairs():
                lhs = _mat_mul(tgt.map(i, j), self.diff_at(n, i))
                rhs = _mat_mul(self.diff_at(n, j), src.map(i, j))
                if not _mat_eq(lhs, rhs):
                    raise NotAChainMap(f"differential is not natural on {i}->{j}")

    def stalk_cohomology(self, i: int) -> dict[int, int]:
        from .linalg import rank_dense

        out = {}
        for n in range(min(self.terms, default=0) - 1, max(self.terms, default=0) + 2):
            dim = self.term_dims(n, i)
            if dim == 0:
                continue
            r_out = rank_dense(self.diff_at(n, i), QQ) if self.term_dims(n + 1, i) else 0
            r_in = rank_dense(self.diff_at(n - 1, i), QQ) if self.term_dims(n - 1, i) else 0
            h = dim - r_out - r_in
            if h:
                out[n] = h
        return out

    def euler_vector(self) -> tuple[int, ...]:
        out = []
        for i in range(len(self.poset)):
            out.append(sum((-1) ** n * self.term_dims(n, i) for n in self.terms))
        return tuple(out)

    def restrict(self, sub: StratumPoset) -> "FunctorComplex":
        terms = {n: t.restrict(sub) for n, t in self.terms.items()}
        diffs = {}
        for n, dmap in self.diffs.items():
            new = {}
            for si, e in enumerate(sub.elements):
                gi = self.poset.index[e]
                if gi in dmap:
                    new[si] = dmap[gi]
            diffs[n] = new
        return FunctorComplex(sub, terms, diffs)


class FunctorMap:
    """A chain map of functor complexes, natural stratum by stratum."""

    def __init__(self, source: FunctorComplex, target: FunctorComplex, comps: dict[int, dict[int, Matrix]]):
        if source.poset is not target.poset and source.poset.elements != target.poset.elements:
            raise NotAChainMap("source and target live on different posets")
        self.source = source
        self.target = target
        self.comps = {n: dict(c) for n, c in comps.items()}
        self._validate()

    def comp_at(self, n: int, i: int) -> Matrix:
        rows = self.target.term_dims(n, i)
        cols = self.source.term_dims(n, i)
        m = self.comps.get(n, {}).get(i)
        return m if m is not None else _mat(rows, cols)

    def _validate(self):
        poset = self.source.poset
        degrees = set(self.source.terms) | set(self.target.terms)
        for n in degrees:
            for (i, j) in poset.cover_pairs():
                tgt_map = self.target.terms[n].map(i, j) if n in self.target.terms else None
                src_map = self.source.terms[n].map(i, j) if n in self.source.terms else None
                lhs = _mat_mul(tgt_map, self.comp_at(n, i)) if tgt_map is not None else _mat(
                    self.target.term_dims(n, j), self.source.term_dims(n, i)
                )
                rhs = _mat_mul(self.comp_at(n, j), src_map) if src_map is not None else _mat(
                    self.target.term_dims(n, j), self.source.term_dims(n, i)
                )
                if not _mat_eq(lhs, rhs):
                    raise NotAChainMap(f"components are not natural on {i}->{j} in degree {n}")
            for i in range(len(poset)):
                lhs = _mat_mul(self.target.diff_at(n, i), self.comp_at(n, i))
                rhs = _mat_mul(self.comp_at(n + 1, i), self.source.diff_at(n, i))
                if not _mat_eq(lhs, rhs):
                    raise NotAChainMap(f"not a chain map at stratum {i}, degree {n}")


def identity_map(c: FunctorComplex) -> FunctorMap:
    comps = {
        n: {
            i: [[Fraction(int(r == s)) for s in range(t.dims[i])] for r in range(t.dims[i])]
            for i in range(len(c.poset))
            if t.dims[i]
        }
        for n, t in c.terms.items()
    }
    return FunctorMap(c, c, comps)


def triangle_map_u(rt: RootedTree, alpha: Vertex) -> FunctorMap:
    """The canonical degree-zero map from the parent generator into P_alpha."""
    if alpha not in rt.tree.adjacency:
        raise UnknownVertex(f"vertex {alpha!r} not in tree")
    if alpha == rt.root:
        raise RootHasNoParent("the root generator has no parent map")
    parent = rt.parent[alpha]
    src = FunctorComplex.of_functor(generator_P(rt, parent))
    tgt = FunctorComplex.of_functor(generator_P(rt, alpha))
    comps = {0: {i: [[Fraction(1)]] for i in src.terms[0].support()}}
    return FunctorMap(src, tgt, comps)


def cone(m: FunctorMap) -> FunctorComplex:
    """Mapping cone: source shifted one step left, differential twisted by m."""
    a, b = m.source, m.target
    poset = a.poset
    degrees = sorted(set(n - 1 for n in a.terms) | set(b.terms))
    terms = {}
    diffs: dict[int, dict[int, Matrix]] = {}
    for n in degrees:
        a_t = a.terms.get(n + 1)
        b_t = b.terms.get(n)
        dims = tuple(
            (a_t.dims[i] if a_t else 0) + (b_t.dims[i] if b_t else 0)
            for i in range(len(poset))
        )
        maps = {}
        for (i, j) in poset.cover_pairs():
            if dims[i] == 0 or dims[j] == 0:
                continue
            am = a_t.map(i, j) if a_t else []
            bm = b_t.map(i, j) if b_t else []
            maps[(i, j)] = _block_diag(am, bm, dims[j], dims[i])
        terms[n] = ExitFunctor(poset, dims, maps)
    for n in degrees:
        dmap = {}
        for i in range(len(poset)):
            a_rows = a.term_dims(n + 2, i)
            a_cols = a.term_dims(n + 1, i)
            b_rows = b.term_dims(n + 1, i)
            b_cols = b.term_dims(n, i)
            rows = a_rows + b_rows
            cols = a_cols + b_cols
            if rows == 0 or cols == 0:
                continue
            blk = _mat(rows, cols)
            da = a.diff_at(n + 1, i)
            db = b.diff_at(n, i)
            mi = m.comp_at(n + 1, i)
            for r in range(a_rows):
                for c in range(a_cols):
                    blk[r][c] = -da[r][c]
            for r in range(b_rows):
                for c in range(a_cols):
                    blk[a_rows + r][c] = mi[r][c]
            for r in range(b_rows):
                for c in range(b_cols):
                    blk[a_rows + r][a_cols + c] = db[r][c]
            if any(any(x for x in row) for row in blk):
                dmap[i] = blk
        if dmap:
            diffs[n] = dmap
    return FunctorComplex(poset, terms, diffs)


def _block_diag(am: Matrix, bm: Matrix, rows: int, cols: int) -> Matrix:
    out = _mat(rows, cols)
    ar = len(am)
    ac = len(am[0]) if am else 0
    for r in range(ar):
        for c in range(ac):
            out[r][c] = am[r][c]
    for r in range(len(bm)):
        row = bm[r]
        for c in range(len(row)):
            out[ar + r][ac + c] = row[c]
    return out


def simple_complex(rt: RootedTree, alpha: Vertex) -> FunctorComplex:
    """The cone-simple at alpha; at the root it is the root generator itself."""
    if alpha == rt.root:
        return FunctorComplex.of_functor(generator_P(rt, alpha))
    return cone(triangle_map_u(rt, alpha))


# -- derived homs via the bar complex -----------------------------------------

class BarComplex:
    def __init__(self, dims: dict[int, int], diffs: dict[int, SparseMat], index: dict):
        self.dims = dims
        self.diffs = diffs
        self.index = index  # degree -> {key: position}


def _as_complex(x) -> FunctorComplex:
    if isinstance(x, ExitFunctor):
        return FunctorComplex.of_functor(x)
    return x


def _bar_complex(M: FunctorComplex, N: FunctorComplex) -> BarComplex:
    """Assemble the chain-indexed Hom complex of two functor complexes.

    Basis keys are (chain-of-sign-tuples, term degree, row, col) so that
    complexes over comparable posets can be mapped to one another.
    """
    poset = M.poset
    supp_m = M.support()
    supp_n = N.support()
    chains = [c for c in poset.chains() if c[0] in supp_m and c[-1] in supp_n]
    chain_set = {c: None for c in chains}
    m_degs = M.degrees()
    index: dict[int, dict] = {}

    def block_dims(c, i, n):
        k = len(c) - 1
        a = M.term_dims(i, c[0])
        b = N.term_dims(i + n - k, c[-1])
        return a, b

    degrees = set()
    for c in chains:
        k = len(c) - 1
        for i in m_degs:
            if M.term_dims(i, c[0]) == 0:
                continue
            for j in N.degrees():
                if N.term_dims(j, c[-1]) == 0:
                    continue
                degrees.add(k + (j - i))
    for n in sorted(degrees):
        idx: dict = {}
        pos = 0
        for c in chains:
            k = len(c) - 1
            for i in m_degs:
                a, b = block_dims(c, i, n)
                if a and b:
                    key_c = tuple(poset.elements[e] for e in c)
                    for r in range(b):
                        for s in range(a):
                            idx[(key_c, i, r, s)] = pos
                            pos += 1
        index[n] = idx
    dims = {n: len(idx) for n, idx in index.items()}

    diffs: dict[int, SparseMat] = {}
    for n in sorted(degrees):
        if n + 1 not in index:
            tgt_idx = {}
        else:
            tgt_idx = index[n + 1]
        src_idx = index[n]
        if not src_idx:
            continue
        mat = SparseMat(len(tgt_idx), len(src_idx))
        _assemble_bar(mat, poset, M, N, chains, chain_set, m_degs, src_idx, tgt_idx, n)
        _assemble_internal(mat, poset, M, N, chains, m_degs, src_idx, tgt_idx, n)
        if mat.entries or (len(tgt_idx) and len(src_idx)):
            diffs[n] = mat
    return BarComplex(dims, diffs, index)


def _assemble_bar(mat, poset, M, N, chains, chain_set, m_degs, src_idx, tgt_idx, n):
    """Face-map part of the differential, iterating over target chains."""
    for c in chains:
        k1 = len(c) - 1  # target chain length
        if k1 == 0:
            continue
        key_c = tuple(poset.elements[e] for e in c)
        m_shift = (n + 1) - k1
        for i in m_degs:
            b = N.term_dims(i + m_shift, c[-1])
            a = M.term_dims(i, c[0])
            if a == 0 or b == 0:
                continue
            for drop in range(k1 + 1):
                face = c[:drop] + c[drop + 1 :]
                if face not in chain_set:
                    continue
                key_f = tuple(poset.elements[e] for e in face)
                if drop == 0:
                    a_face = M.term_dims(i, face[0])
                    if a_face == 0:
                        continue
                    mmap = M.terms[i].map(c[0], c[1])
                    for r in range(b):
                        for s in range(a):
                            for s2 in range(a_face):
                                v = mmap[s2][s]
                                if v:
                                    row = tgt_idx[(key_c, i, r, s)]
                                    col = src_idx.get((key_f, i, r, s2))
                                    if col is not None:
                                        mat.add_to(row, col, v, QQ)
                elif drop == k1:
                    b_face = N.term_dims(i + m_shift, face[-1])
                    if b_face == 0:
                        continue
                    nmap = N.terms[i + m_shift].map(c[-2], c[-1])
                    sign = Fraction((-1) ** (k1))
                    for r in range(b):
                        for s in range(a):
                            for r2 in range(b_face):
                                v = nmap[r][r2]
                                if v:
                                    row = tgt_idx[(key_c, i, r, s)]
                                    col = src_idx.get((key_f, i, r2, s))
                                    if col is not None:
                                        mat.add_to(row, col, sign * v, QQ)
                else:
                    sign = Fraction((-1) ** drop)
                    for r in range(b):
                        for s in range(a):
                            row = tgt_idx[(key_c, i, r, s)]
                            col = src_idx.get((key_f, i, r, s))
                            if col is not None:
                                mat.add_to(row, col, sign, QQ)


def _assemble_internal(mat, poset, M, N, chains, m_degs, src_idx, tgt_idx, n):
    """Internal-differential part, nonzero only for genuine complexes."""
    has_dn = bool(N.diffs)
    has_dm = bool(M.diffs)
    if not has_dn and not has_dm:
        return
    for c in chains:
        k = len(c) - 1
        key_c = tuple(poset.elements[e] for e in c)
        m_shift = n - k
        sgn_k = (-1) ** k
        for i in m_degs:
            a = M.term_dims(i, c[0])
            b = N.term_dims(i + m_shift, c[-1])
            if a == 0 or b == 0:
                continue
            if has_dn and N.term_dims(i + m_shift + 1, c[-1]):
                dn = N.diff_at(i + m_shift, c[-1])
                for r2 in range(len(dn)):
                    for r in range(b):
                        v = dn[r2][r]
                        if v:
                            for s in range(a):
                                row = tgt_idx.get((key_c, i, r2, s))
                                if row is not None:
                                    col = src_idx[(key_c, i, r, s)]
                                    mat.add_to(row, col, Fraction(sgn_k) * v, QQ)
            if has_dm and M.term_dims(i - 1, c[0]):
                dm = M.diff_at(i - 1, c[0])
                sign = Fraction(sgn_k * (-1) ** (m_shift + 1))
                for s in range(a):
                    for s2 in range(len(dm[0]) if dm else 0):
                        v = dm[s][s2]
                        if v:
                            for r in range(b):
                                row = tgt_idx.get((key_c, i - 1, r, s2))
                                if row is not None:
                                    col = src_idx[(key_c, i, r, s)]
                                    mat.add_to(row, col, sign * v, QQ)


def rhom(M, N, field=QQ) -> dict[int, int]:
    """Cohomology dimensions of the derived Hom complex, by degree."""
    mc = _as_complex(M)
    nc = _as_complex(N)
    if mc.poset.elements != nc.poset.elements:
        raise NotComparable("functors live on different stratum posets")
    bar = _bar_complex(mc, nc)
    return cochain_cohomology_dims(bar.dims, bar.diffs, field)


def hom_generator(rt: RootedTree, alpha: Vertex, beta: Vertex) -> FunctorMap:
    """The canonical degree-zero class from P_alpha to P_beta, for alpha <= beta."""
    if not rt.leq(alpha, beta):
        raise NotComparable(f"{alpha!r} is not below {beta!r}")
    src = FunctorComplex.of_functor(generator_P(rt, alpha))
    tgt = FunctorComplex.of_functor(generator_P(rt, beta))
    comps = {0: {i: [[Fraction(1)]] for i in src.terms[0].support()}}
    return FunctorMap(src, tgt, comps)


def compose_maps(second: FunctorMap, first: FunctorMap) -> FunctorMap:
    """Stratum-wise composition of degree-zero chain maps."""
    if second.source.poset.elements != first.target.poset.elements:
        raise NotComparable("maps are not composable")
    comps: dict[int, dict[int, Matrix]] = {}
    for n in set(first.comps) | set(second.comps):
        cm = {}
        for i in range(len(first.source.poset)):
            m = _mat_mul(second.comp_at(n, i), first.comp_at(n, i))
            if any(any(x for x in row) for row in m):
                cm[i] = m
        comps[n] = cm
    return FunctorMap(first.source, second.target, comps)


def maps_equal(f: FunctorMap, g: FunctorMap) -> bool:
    degrees = set(f.comps) | set(g.comps) | set(f.source.terms) | set(g.source.terms)
    for n in degrees:
        for i in range(len(f.source.poset)):
            if not _mat_eq(f.comp_at(n, i), g.comp_at(n, i)):
                return False
    return True


def sections_over(strata, F, field=QQ) -> dict[int, int]:
    """Derived sections of F over an up-closed set of strata."""
    fc = _as_complex(F)
    poset = fc.poset
    members = []
    for s in strata:
        signs = s.signs if isinstance(s, SignVector) else tuple(s)
        if signs not in poset.index:
            raise NotUpClosed(f"stratum {signs} is not in the poset")
        members.append(signs)
    if not poset._up_closed(set(members)):
        raise NotUpClosed("the given strata are not up-closed")
    sub = poset.subposet(members)
    const = indicator_functor(sub, range(len(sub)))
    return rhom(const, fc.restrict(sub), field)


def codirection_test(rt: RootedTree, F, c: Codirection, field=QQ) -> bool:
    """Whether propagation of sections is obstructed in the given codirection.

    True iff restricting derived sections from the open star of the stratum
    to the half star on the negative side of the axis fails to be an
    isomorphism.
    """
    fc = _as_complex(F)
    poset = fc.poset
    sigma = c.base.signs
    axis_pos = rt.tree.vertices.index(c.axis)
    star = [e for e in poset.elements if _signs_leq(sigma, e)]
    half = [e for e in star if e[axis_pos] == -c.sign]
    sub_a = poset.subposet(star)
    sub_b = poset.subposet(half)
    bar_a = _bar_complex(
        indicator_functor(sub_a, range(len(sub_a))), fc.restrict(sub_a)
    )
    bar_b = _bar_complex(
        indicator_functor(sub_b, range(len(sub_b))), fc.restrict(sub_b)
    )
    comps = {}
    for n, b_idx in bar_b.index.items():
        a_idx = bar_a.index.get(n, {})
        m = SparseMat(len(b_idx), len(a_idx))
        for key, col in a_idx.items():
            row = b_idx.get(key)
            if row is not None:
                m.set(row, col, Fraction(1))
        comps[n] = m
    return not cochain_map_iso_on_cohomology(
        bar_a.dims, bar_a.diffs, bar_b.dims, bar_b.diffs, comps, field
    )


def k0_decompose(rt: RootedTree, F) -> dict[Vertex, int]:
    """Multiplicities of the cone-simples in the stratum-wise Euler vector."""
    fc = _as_complex(F)
    poset = fc.poset
    if not poset.is_full:
        raise NotInSpan("decomposition needs the full stratum poset")
    target = fc.euler_vector()
    vertices = list(rt.tree.vertices)
    columns = [simple_complex(rt, v).euler_vector() for v in vertices]
    mat = [[Fraction(columns[j][i]) for j in range(len(vertices))] for i in range(len(poset))]
    rhs = [Fraction(x) for x in target]
    sol = solve(mat, rhs, QQ)
    if sol is None:
        raise NotInSpan("Euler vector is outside the span of the cone-simples")
    out = {}
    for v, x in zip(vertices, sol):
        if x.denominator != 1:
            raise NotInSpan(f"multiplicity at {v!r} is not an integer: {x}")
        if x:
            out[v] = int(x)
    return out
