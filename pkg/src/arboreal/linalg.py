"""Exact linear algebra over the rationals and prime fields.

No floating point enters any rank, kernel, or solve computation.  Small
matrices are dense (lists of rows); boundary and bar-complex matrices are
sparse (dicts keyed by column index, or bitmasks over GF(2)).
"""
from __future__ import annotations

from fractions import Fraction


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


class Rationals:
    """The field of exact rationals."""

    name = "Q"

    def __init__(self):
        self.zero = Fraction(0)
        self.one = Fraction(1)

    def of(self, n):
        return Fraction(n)

    def add(self, a, b):
        return a + b

    def sub(self, a, b):
        return a - b

    def mul(self, a, b):
        return a * b

    def neg(self, a):
        return -a

    def inv(self, a):
        return 1 / Fraction(a)

    def __eq__(self, other):
        return isinstance(other, Rationals)

    def __hash__(self):
        return hash("Q")

    def __repr__(self):
        return "Q"


class PrimeField:
    """GF(p) for a prime p, elements stored as ints in [0, p)."""

    def __init__(self, p: int):
        if not is_prime(p):
            raise ValueError(f"{p} is not prime")
        self.p = p
        self.name = f"F{p}"
        self.zero = 0
        self.one = 1 % p

    def of(self, n):
        return n % self.p

    def add(self, a, b):
        return (a + b) % self.p

    def sub(self, a, b):
        return (a - b) % self.p

    def mul(self, a, b):
        return (a * b) % self.p

    def neg(self, a):
        return (-a) % self.p

    def inv(self, a):
        return pow(a, self.p - 2, self.p)

    def __eq__(self, other):
        return isinstance(other, PrimeField) and other.p == self.p

    def __hash__(self):
        return hash(("F", self.p))

    def __repr__(self):
        return self.name


QQ = Rationals()
GF2 = PrimeField(2)


def parse_field(spec: str):
    """Parse a field spec: "q" for rationals, "fp:P" for GF(P)."""
    spec = spec.strip().lower()
    if spec == "q":
        return Rationals()
    if spec.startswith("fp:"):
        p = int(spec[3:])
        return PrimeField(p)
    raise ValueError(f"unknown field spec {spec!r}")


# -- sparse ranks -------------------------------------------------------------

def sparse_rank(rows, field) -> int:
    """Rank of a sparse matrix given as an iterable of {col: value} dicts.

    Row echelon with on-the-fly reduction against stored pivots; pivots are
    normalized so elimination needs one multiply per touched entry.
    """
    zero = field.zero
    pivots: dict[int, dict[int, object]] = {}
    for row in rows:
        r = {c: v for c, v in row.items() if v != zero}
        while r:
            c = min(r)
            if c in pivots:
                f = r.pop(c)
                for pc, pv in pivots[c].items():
                    if pc == c:
                        continue
                    nv = field.sub(r.get(pc, zero), field.mul(f, pv))
                    if nv == zero:
                        r.pop(pc, None)
                    else:
                        r[pc] = nv
            else:
                inv = field.inv(r[c])
                pivots[c] = {k: field.mul(inv, v) for k, v in r.items()}
                break
    return len(pivots)


def gf2_rank(bitrows) -> int:
    """Rank over GF(2) of rows encoded as Python-int bitmasks."""
    pivots: dict[int, int] = {}
    count = 0
    for row in bitrows:
        while row:
            b = row.bit_length() - 1
            if b in pivots:
                row ^= pivots[b]
            else:
                pivots[b] = row
                count += 1
                break
    return count


class SparseMat:
    """A sparse matrix from C^a to C^b: shape (nrows, ncols), entries {(r, c): v}."""

    def __init__(self, nrows: int, ncols: int, entries=None):
        self.nrows = nrows
        self.ncols = ncols
        self.entries = dict(entries or {})

    def set(self, r, c, v):
        if v == 0:
            self.entries.pop((r, c), None)
        else:
            self.entries[(r, c)] = v

    def add_to(self, r, c, v, field):
        cur = self.entries.get((r, c), field.zero)
        self.set(r, c, field.add(cur, v))

    def row_dicts(self):
        rows = [dict() for _ in range(self.nrows)]
        for (r, c), v in self.entries.items():
            rows[r][c] = v
        return rows

    def rank(self, field) -> int:
        if isinstance(field, PrimeField) and field.p == 2:
            bitrows = [0] * self.nrows
            for (r, c), v in self.entries.items():
                if v % 2:
                    bitrows[r] ^= 1 << c
            return gf2_rank(bitrows)
        return sparse_rank(self.row_dicts(), field)

    def to_dense(self, field):
        m = [[field.zero] * self.ncols for _ in range(self.nrows)]
        for (r, c), v in self.entries.items():
            m[r][c] = v
        return m

    def compose(self, other: "SparseMat", field) -> "SparseMat":
        """self o other (apply other first)."""
        if other.nrows != self.ncols:
            raise ValueError("shape mismatch in compose")
        out = SparseMat(self.nrows, other.ncols)
        by_mid: dict[int, list] = {}
        for (r, c), v in self.entries.items():
            by_mid.setdefault(c, []).append((r, v))
        for (m, c), w in other.entries.items():
            for r, v in by_mid.get(m, ()):
                out.add_to(r, c, field.mul(v, w), field)
        return out


# -- dense helpers ------------------------------------------------------------

def mat_mul(a, b, field):
    n, k = len(a), len(b)
    m = len(b[0]) if b else 0
    out = [[field.zero] * m for _ in range(n)]
    for i in range(n):
        ai = a[i]
        oi = out[i]
        for j in range(k):
            x = ai[j]
            if x == field.zero:
                continue
            bj = b[j]
            for c in range(m):
                if bj[c] != field.zero:
                    oi[c] = field.add(oi[c], field.mul(x, bj[c]))
    return out


def identity(n, field):
    return [[field.one if i == j else field.zero for j in range(n)] for i in range(n)]


def _rref(mat, field):
    """Row-reduce a dense matrix in place; return pivot column list."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    piv_cols = []
    r = 0
    for c in range(cols):
        pr = None
        for i in range(r, rows):
            if mat[i][c] != field.zero:
                pr = i
                break
        if pr is None:
            continue
        mat[r], mat[pr] = mat[pr], mat[r]
        inv = field.inv(mat[r][c])
        mat[r] = [field.mul(inv, v) for v in mat[r]]
        for i in range(rows):
            if i != r and mat[i][c] != field.zero:
                f = mat[i][c]
                mat[i] = [field.sub(mat[i][j], field.mul(f, mat[r][j])) for j in range(cols)]
        piv_cols.append(c)
        r += 1
        if r == rows:
            break
    return piv_cols


def rank_dense(mat, field) -> int:
    if not mat or not mat[0]:
        return 0
    work = [list(row) for row in mat]
    return len(_rref(work, field))


def kernel_basis(mat, nrows, ncols, field):
    """Basis of the right null space of a dense matrix, as column vectors."""
    if ncols == 0:
        return []
    if nrows == 0:
        return [[field.one if i == j else field.zero for i in range(ncols)] for j in range(ncols)]
    work = [list(row) for row in mat]
    piv_cols = _rref(work, field)
    piv_set = set(piv_cols)
    free = [c for c in range(ncols) if c not in piv_set]
    basis = []
    for fc in free:
        vec = [field.zero] * ncols
        vec[fc] = field.one
        for r, pc in enumerate(piv_cols):
            vec[pc] = field.neg(work[r][fc])
        basis.append(vec)
    return basis


def solve(mat, rhs, field):
    """One solution of mat * x = rhs over the field, or None if inconsistent."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    aug = [list(mat[i]) + [rhs[i]] for i in range(rows)]
    piv_cols = _rref(aug, field)
    if cols in piv_cols:
        return None
    x = [field.zero] * cols
    for r, pc in enumerate(piv_cols):
        x[pc] = aug[r][cols]
    return x


def cochain_cohomology_dims(dims: dict[int, int], diffs: dict[int, SparseMat], field) -> dict[int, int]:
    """Cohomology dimensions of a cochain complex (diffs[n]: C^n -> C^{n+1})."""
    ranks = {n: d.rank(field) for n, d in diffs.items()}
    out = {}
    for n, dim in dims.items():
        h = dim - ranks.get(n, 0) - ranks.get(n - 1, 0)
        if h:
            out[n] = h
    return out


def cochain_map_iso_on_cohomology(a_dims, a_diffs, b_dims, b_diffs, comps, field) -> bool:
    """Whether a cochain map induces an isomorphism on all cohomology groups.

    comps[n] is the SparseMat component C_A^n -> C_B^n of the chain map.
    """
    degrees = sorted(set(a_dims) | set(b_dims))
    for n in degrees:
        da = a_dims.get(n, 0)
        db = b_dims.get(n, 0)
        d_out_a = a_diffs.get(n)
        d_out_b = b_diffs.get(n)
        d_in_b = b_diffs.get(n - 1)
        ka = (
            kernel_basis(d_out_a.to_dense(field), d_out_a.nrows, da, field)
            if d_out_a is not None and da
            else [[field.one if i == j else field.zero for i in range(da)] for j in range(da)]
        )
        rank_in_a = a_diffs[n - 1].rank(field) if (n - 1) in a_diffs else 0
        rank_in_b = d_in_b.rank(field) if d_in_b is not None else 0
        dim_ha = len(ka) - rank_in_a
        kb_dim = db - (d_out_b.rank(field) if d_out_b is not None and db else 0)
        dim_hb = kb_dim - rank_in_b
        if dim_ha != dim_hb:
            return False
        if dim_ha == 0:
            continue
        comp = comps.get(n, SparseMat(db, da))
        imgs = []
        for vec in ka:
            w = [field.zero] * db
            for (r, c), v in comp.entries.items():
                if vec[c] != field.zero:
                    w[r] = field.add(w[r], field.mul(v, vec[c]))
            imgs.append(w)
        border = []
        if d_in_b is not None:
            dense = d_in_b.to_dense(field)
            for c in range(d_in_b.ncols):
                border.append([dense[r][c] for r in range(db)])
        stacked = [list(v) for v in border] + [list(v) for v in imgs]
        induced_rank = rank_dense(stacked, field) - rank_dense([list(v) for v in border], field)
        if induced_rank != dim_ha:
            return False
    return True
