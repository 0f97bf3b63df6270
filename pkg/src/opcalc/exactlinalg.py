"""Exact rational sparse linear algebra.

All coefficients in the package are Rational (stdlib Fraction: always in
lowest terms, denominator > 0).  Elimination is deterministic: pivots are
chosen as the first row with a nonzero entry in the leftmost open column,
so identical inputs give identical pivot sequences.
"""

import os
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

Rational = Fraction


def worker_count():
    """Parallelism cap from OPCALC_THREADS (default 1)."""
    raw = os.environ.get("OPCALC_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        n = 1
    return max(1, n)


def parallel_map(fn, items):
    """Ordered map over items, chunked over at most worker_count() threads."""
    items = list(items)
    n = worker_count()
    if n <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


class SparseMatrix(object):
    """Immutable sparse matrix over the rationals.

    entries: dict (row, col) -> Fraction, zero entries never stored.
    """

    def __init__(self, rows, cols, entries=None):
        assert rows >= 0 and cols >= 0
        self.rows = rows
        self.cols = cols
        ent = {}
        if entries:
            for (r, c), v in entries.items():
                assert 0 <= r < rows and 0 <= c < cols, (r, c)
                v = Fraction(v)
                if v != 0:
                    ent[(r, c)] = v
        self.entries = ent

    @classmethod
    def from_rows(cls, dense):
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        ent = {}
        for r, row in enumerate(dense):
            assert len(row) == cols
            for c, v in enumerate(row):
                if v != 0:
                    ent[(r, c)] = Fraction(v)
        return cls(rows, cols, ent)

    @classmethod
    def from_columns(cls, columns, rows):
        ent = {}
        for c, col in enumerate(columns):
            for r, v in col.items():
                if v != 0:
                    ent[(r, c)] = Fraction(v)
        return cls(rows, len(columns), ent)

    def entry(self, r, c):
        return self.entries.get((r, c), Fraction(0))

    def column(self, c):
        return {r: v for (r, cc), v in self.entries.items() if cc == c}

    def apply(self, vec):
        """Matrix times a column vector (list of length cols)."""
        assert len(vec) == self.cols
        out = [Fraction(0)] * self.rows
        for (r, c), v in self.entries.items():
            if vec[c]:
                out[r] += v * vec[c]
        return out

    def compose(self, other):
        """self * other."""
        assert self.cols == other.rows
        ent = {}
        by_row = {}
        for (r, c), v in other.entries.items():
            by_row.setdefault(r, []).append((c, v))
        for (r, k), u in self.entries.items():
            for c, v in by_row.get(k, ()):
                key = (r, c)
                ent[key] = ent.get(key, Fraction(0)) + u * v
        return SparseMatrix(self.rows, other.cols, ent)

    def is_zero(self):
        return not self.entries

    def transpose(self):
        return SparseMatrix(self.cols, self.rows,
                            {(c, r): v for (r, c), v in self.entries.items()})

    def _dense_rows(self):
        dense = [[Fraction(0)] * self.cols for _ in range(self.rows)]
        for (r, c), v in self.entries.items():
            dense[r][c] = v
        return dense

    def rank(self):
        """Rank over Q via fraction-free (Bareiss) elimination.

        Rows are first scaled to integers (does not change rank), then
        integer elimination with exact divisions keeps entries small.
        """
        m = []
        for row in self._dense_rows():
            den = 1
            for v in row:
                den = den * v.denominator // _gcd(den, v.denominator)
            m.append([int(v * den) for v in row])
        rows, cols = self.rows, self.cols
        rank = 0
        prev = 1
        r = 0
        for c in range(cols):
            if r >= rows:
                break
            piv = None
            for rr in range(r, rows):
                if m[rr][c] != 0:
                    piv = rr
                    break
            if piv is None:
                continue
            if piv != r:
                m[r], m[piv] = m[piv], m[r]
            for rr in range(r + 1, rows):
                for cc in range(c + 1, cols):
                    m[rr][cc] = (m[r][c] * m[rr][cc] - m[rr][c] * m[r][cc]) // prev
                m[rr][c] = 0
            prev = m[r][c]
            r += 1
            rank += 1
        return rank

    def rref(self):
        """Reduced row echelon form; returns (dense rows, pivot column list)."""
        m = self._dense_rows()
        pivots = []
        r = 0
        for c in range(self.cols):
            if r >= self.rows:
                break
            piv = None
            for rr in range(r, self.rows):
                if m[rr][c] != 0:
                    piv = rr
                    break
            if piv is None:
                continue
            if piv != r:
                m[r], m[piv] = m[piv], m[r]
            inv = 1 / m[r][c]
            m[r] = [v * inv for v in m[r]]
            for rr in range(self.rows):
                if rr != r and m[rr][c] != 0:
                    f = m[rr][c]
                    m[rr] = [a - f * b for a, b in zip(m[rr], m[r])]
            pivots.append(c)
            r += 1
        return m, pivots

    def kernel_basis(self):
        """Basis of the null space, as dicts col -> Fraction.

        One vector per free column, free coordinate set to 1; deterministic.
        """
        m, pivots = self.rref()
        pivot_set = set(pivots)
        free = [c for c in range(self.cols) if c not in pivot_set]
        basis = []
        for fc in free:
            vec = {fc: Fraction(1)}
            for r, pc in enumerate(pivots):
                v = m[r][fc]
                if v != 0:
                    vec[pc] = -v
            basis.append(vec)
        return basis

    def solve(self, b):
        """Some x with M x = b, or None if inconsistent."""
        if len(b) != self.rows:
            raise ValueError("dimension mismatch: len(b)=%d rows=%d" % (len(b), self.rows))
        ent = dict(self.entries)
        for r, v in enumerate(b):
            if v != 0:
                ent[(r, self.cols)] = Fraction(v)
        aug = SparseMatrix(self.rows, self.cols + 1, ent)
        m, pivots = aug.rref()
        if self.cols in pivots:
            return None
        x = [Fraction(0)] * self.cols
        for r, pc in enumerate(pivots):
            x[pc] = m[r][self.cols]
        return x


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def cohomology_dimension(d_in, d_out):
    """dim ker(d_out) - rank(d_in) for a two-step complex.

    d_in : C_prev -> C, d_out : C -> C_next.  Checks d_out . d_in = 0.
    """
    assert d_in.rows == d_out.cols, "chain spaces do not match"
    comp = d_out.compose(d_in)
    if not comp.is_zero():
        raise ValueError("not a complex: d_out . d_in != 0")
    ker = d_out.cols - d_out.rank()
    return ker - d_in.rank()
