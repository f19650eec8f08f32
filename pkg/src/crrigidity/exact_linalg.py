"""Exact linear algebra over the rationals.

Scalars are ``gmpy2.mpq`` values (exposed here as :data:`Rational`).  Matrices
are stored sparsely as one ``{column: value}`` dict per row; the elimination
routines work directly on that representation, so constraint systems with a
few thousand mostly-empty rows stay cheap.  Nothing in this module uses
floating point.
"""

from __future__ import annotations

from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import gmpy2

Rational = gmpy2.mpq
SparseVec = Dict[int, "gmpy2.mpq"]

# below this many rows*cols the dense Bareiss routine is used for determinants
DENSE_THRESHOLD = 64 * 64

ZERO = Rational(0)
ONE = Rational(1)


def Q(x, den=None) -> Rational:
    """Coerce ``x`` (int, str, Fraction, mpq, ...) to a :data:`Rational`."""
    if den is not None:
        return Rational(x, den)
    if isinstance(x, str):
        return Rational(x.strip())
    if hasattr(x, "numerator") and hasattr(x, "denominator"):
        return Rational(int(x.numerator), int(x.denominator))
    return Rational(x)


def rational_to_json(q) -> dict:
    q = Q(q)
    return {"num": str(int(q.numerator)), "den": str(int(q.denominator))}


def rational_str(q) -> str:
    q = Q(q)
    if q.denominator == 1:
        return str(int(q.numerator))
    return f"{int(q.numerator)}/{int(q.denominator)}"


# ---------------------------------------------------------------------------
# sparse vector helpers
# ---------------------------------------------------------------------------

def axpy(target: SparseVec, coeff, vec: Mapping[int, Rational]) -> SparseVec:
    """In place ``target += coeff * vec``, dropping cancelled entries."""
    if not coeff:
        return target
    for k, v in vec.items():
        nv = target.get(k, ZERO) + coeff * v
        if nv:
            target[k] = nv
        else:
            target.pop(k, None)
    return target


def scaled(vec: Mapping[int, Rational], coeff) -> SparseVec:
    if not coeff:
        return {}
    return {k: coeff * v for k, v in vec.items()}


def combine(terms: Iterable[Tuple[Rational, Mapping[int, Rational]]]) -> SparseVec:
    out: SparseVec = {}
    for c, v in terms:
        axpy(out, c, v)
    return out


def to_sparse(vec: Union[Sequence, Mapping]) -> SparseVec:
    if isinstance(vec, Mapping):
        return {int(k): Q(v) for k, v in vec.items() if v}
    return {i: Q(v) for i, v in enumerate(vec) if v}


def to_dense(vec: Mapping[int, Rational], length: int) -> List[Rational]:
    out = [ZERO] * length
    for k, v in vec.items():
        out[k] = v
    return out


# ---------------------------------------------------------------------------
# Matrix
# ---------------------------------------------------------------------------

class Matrix:
    """Sparse rational matrix.  Treat instances as immutable."""

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, nrows: int, ncols: int, rows: Optional[Sequence[Mapping[int, Rational]]] = None):
        if nrows < 0 or ncols < 0:
            raise ValueError("negative matrix shape")
        self.nrows = nrows
        self.ncols = ncols
        if rows is None:
            self._rows = tuple({} for _ in range(nrows))
        else:
            if len(rows) != nrows:
                raise ValueError(f"expected {nrows} rows, got {len(rows)}")
            clean = []
            for r in rows:
                d = {}
                for c, v in r.items():
                    if not 0 <= c < ncols:
                        raise IndexError(f"column {c} out of range for {ncols} columns")
                    if v:
                        d[c] = Q(v)
                clean.append(d)
            self._rows = tuple(clean)

    @classmethod
    def from_dense(cls, data: Sequence[Sequence]) -> "Matrix":
        data = [list(r) for r in data]
        ncols = len(data[0]) if data else 0
        if any(len(r) != ncols for r in data):
            raise ValueError("ragged rows")
        return cls(len(data), ncols, [to_sparse(r) for r in data])

    @classmethod
    def identity(cls, n: int) -> "Matrix":
        return cls(n, n, [{i: ONE} for i in range(n)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "Matrix":
        return cls(nrows, ncols)

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nrows, self.ncols)

    def row(self, i: int) -> SparseVec:
        return dict(self._rows[i])

    def rows(self) -> List[SparseVec]:
        return [dict(r) for r in self._rows]

    def __getitem__(self, idx: Tuple[int, int]) -> Rational:
        i, j = idx
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(f"entry {idx} outside {self.shape}")
        return self._rows[i].get(j, ZERO)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.shape == other.shape and all(a == b for a, b in zip(self._rows, other._rows))

    def __hash__(self):
        return hash((self.shape, tuple(tuple(sorted(r.items())) for r in self._rows)))

    def __repr__(self) -> str:
        return f"Matrix({self.nrows}x{self.ncols}, nnz={self.nnz})"

    @property
    def nnz(self) -> int:
        return sum(len(r) for r in self._rows)

    def to_dense(self) -> List[List[Rational]]:
        return [to_dense(r, self.ncols) for r in self._rows]

    def transpose(self) -> "Matrix":
        cols: List[SparseVec] = [{} for _ in range(self.ncols)]
        for i, r in enumerate(self._rows):
            for j, v in r.items():
                cols[j][i] = v
        return Matrix(self.ncols, self.nrows, cols)

    def apply(self, vec: Union[Sequence, Mapping]) -> List[Rational]:
        """Matrix-vector product, returned dense."""
        v = to_sparse(vec)
        out = []
        for r in self._rows:
            s = ZERO
            if len(r) < len(v):
                for j, a in r.items():
                    b = v.get(j)
                    if b:
                        s += a * b
            else:
                for j, b in v.items():
                    a = r.get(j)
                    if a:
                        s += a * b
            out.append(s)
        return out

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise ValueError(f"shape mismatch {self.shape} @ {other.shape}")
        orows = other._rows
        out = []
        for r in self._rows:
            acc: SparseVec = {}
            for j, a in r.items():
                axpy(acc, a, orows[j])
            out.append(acc)
        return Matrix(self.nrows, other.ncols, out)

    def __mul__(self, scalar) -> "Matrix":
        s = Q(scalar)
        return Matrix(self.nrows, self.ncols, [scaled(r, s) for r in self._rows])

    __rmul__ = __mul__

    def __add__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix(self.nrows, self.ncols, [axpy(dict(a), ONE, b) for a, b in zip(self._rows, other._rows)])

    def __sub__(self, other: "Matrix") -> "Matrix":
        if self.shape != other.shape:
            raise ValueError("shape mismatch")
        return Matrix(self.nrows, self.ncols, [axpy(dict(a), -ONE, b) for a, b in zip(self._rows, other._rows)])

    def submatrix(self, rows: Sequence[int], cols: Sequence[int]) -> "Matrix":
        cmap = {c: i for i, c in enumerate(cols)}
        out = []
        for i in rows:
            out.append({cmap[j]: v for j, v in self._rows[i].items() if j in cmap})
        return Matrix(len(rows), len(cols), out)

    def stack(self, other: "Matrix") -> "Matrix":
        if self.ncols != other.ncols:
            raise ValueError("column mismatch")
        return Matrix(self.nrows + other.nrows, self.ncols, list(self._rows) + list(other._rows))


# ---------------------------------------------------------------------------
# incremental reduced echelon form
# ---------------------------------------------------------------------------

class Echelon:
    """Reduced row echelon basis of a growing row space.

    Rows are added one at a time; the basis is kept fully reduced so that a
    vector is reduced against it in a single pass.  ``priority`` is a sort key
    on columns: among the columns of a new independent row, the one with the
    smallest key becomes its pivot.
    """

    def __init__(self, ncols: int, priority: Optional[Callable[[int], object]] = None):
        self.ncols = ncols
        self.priority = priority
        self.pivot_rows: Dict[int, SparseVec] = {}
        # column -> set of pivot columns whose rows hold a nonzero in it
        self._occurs: Dict[int, set] = {}

    def __len__(self) -> int:
        return len(self.pivot_rows)

    @property
    def rank(self) -> int:
        return len(self.pivot_rows)

    @property
    def pivots(self) -> List[int]:
        return sorted(self.pivot_rows)

    def reduce(self, vec: Mapping[int, Rational]) -> SparseVec:
        out = dict(vec)
        pr = self.pivot_rows
        for c in [c for c in out if c in pr]:
            coeff = out.get(c)
            if coeff:
                axpy(out, -coeff, pr[c])
        return out

    def contains(self, vec: Mapping[int, Rational]) -> bool:
        return not self.reduce(vec)

    def _choose_pivot(self, vec: SparseVec) -> int:
        if self.priority is None:
            return min(vec)
        return min(vec, key=self.priority)

    def add(self, vec: Mapping[int, Rational]) -> bool:
        """Insert ``vec``; return True when it enlarged the row space."""
        r = self.reduce(vec)
        if not r:
            return False
        p = self._choose_pivot(r)
        inv = ONE / r[p]
        r = {k: v * inv for k, v in r.items()}
        occurs = self._occurs
        # clear column p from existing rows to keep the form reduced
        for q in list(occurs.get(p, ())):
            row = self.pivot_rows[q]
            coeff = row.get(p)
            if not coeff:
                continue
            before = set(row)
            axpy(row, -coeff, r)
            after = set(row)
            for c in before - after:
                s = occurs.get(c)
                if s is not None:
                    s.discard(q)
            for c in after - before:
                occurs.setdefault(c, set()).add(q)
        occurs.pop(p, None)
        self.pivot_rows[p] = r
        for c in r:
            if c != p:
                occurs.setdefault(c, set()).add(p)
        return True

    def canonical(self) -> "Echelon":
        """The unique reduced form whose pivots are leading under ``priority``.

        Incremental insertion keeps the form reduced but lets the pivot set
        depend on insertion order; this recomputes it column by column.
        """
        key = self.priority or (lambda c: c)
        rows = [dict(r) for r in self.pivot_rows.values()]
        cols = sorted({c for r in rows for c in r}, key=key)
        by_col: Dict[int, set] = {}
        for i, r in enumerate(rows):
            for c in r:
                by_col.setdefault(c, set()).add(i)
        out = Echelon(self.ncols, self.priority)
        done = set()
        for c in cols:
            cand = [i for i in by_col.get(c, ()) if i not in done and rows[i].get(c)]
            if not cand:
                continue
            i = min(cand, key=lambda t: (len(rows[t]), t))
            done.add(i)
            r = rows[i]
            inv = ONE / r[c]
            for k in r:
                r[k] *= inv
            for t in list(by_col.get(c, ())):
                if t == i:
                    continue
                coeff = rows[t].get(c)
                if not coeff:
                    continue
                before = set(rows[t])
                axpy(rows[t], -coeff, r)
                for k in set(rows[t]) - before:
                    by_col.setdefault(k, set()).add(t)
            out.pivot_rows[c] = r
        for p, r in out.pivot_rows.items():
            for c in list(r):
                if not r[c]:
                    del r[c]
                elif c != p:
                    out._occurs.setdefault(c, set()).add(p)
        return out

    def free_columns(self) -> List[int]:
        return [c for c in range(self.ncols) if c not in self.pivot_rows]

    def nullspace(self) -> List[SparseVec]:
        """Kernel basis of the row space, one vector per free column."""
        basis = []
        by_col: Dict[int, List[Tuple[int, Rational]]] = {}
        for p, row in self.pivot_rows.items():
            for c, v in row.items():
                if c != p:
                    by_col.setdefault(c, []).append((p, v))
        for f in self.free_columns():
            v: SparseVec = {f: ONE}
            for p, a in by_col.get(f, ()):
                v[p] = -a
            basis.append(v)
        return basis


def _rows_of(m) -> Tuple[List[Mapping[int, Rational]], int, int]:
    if isinstance(m, Matrix):
        return list(m._rows), m.nrows, m.ncols
    mm = Matrix.from_dense(m)
    return list(mm._rows), mm.nrows, mm.ncols


def echelon_of(rows: Iterable[Mapping[int, Rational]], ncols: int, priority=None) -> Echelon:
    e = Echelon(ncols, priority)
    for r in rows:
        e.add(r)
    return e


def rank(m) -> int:
    """Exact rank over the rationals."""
    rows, _, ncols = _rows_of(m)
    return echelon_of(rows, ncols).rank


def nullspace_sparse(rows: Iterable[Mapping[int, Rational]], ncols: int, priority=None) -> List[SparseVec]:
    return echelon_of(rows, ncols, priority).nullspace()


def nullspace(m) -> List[List[Rational]]:
    """Exact kernel basis of ``m`` as dense vectors; ``len == cols - rank``."""
    rows, _, ncols = _rows_of(m)
    return [to_dense(v, ncols) for v in nullspace_sparse(rows, ncols)]


class NoSolution:
    """Sentinel returned by :func:`solve` for inconsistent systems."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __bool__(self):
        return False

    def __repr__(self):
        return "NO_SOLUTION"


NO_SOLUTION = NoSolution()


def solve_sparse(rows: Sequence[Mapping[int, Rational]], ncols: int, rhs: Sequence) -> Union[SparseVec, NoSolution]:
    if len(rhs) != len(rows):
        raise ValueError(f"right-hand side has length {len(rhs)}, expected {len(rows)}")
    b = ncols
    # the augmented column sorts last so it is never chosen while a variable is available
    e = Echelon(ncols + 1, lambda c: (c == b, c))
    for r, val in zip(rows, rhs):
        aug = dict(r)
        val = Q(val)
        if val:
            aug[b] = val
        e.add(aug)
    if b in e.pivot_rows:
        return NO_SOLUTION
    return {p: row[b] for p, row in e.pivot_rows.items() if b in row}


def solve(m, b: Sequence) -> Union[List[Rational], NoSolution]:
    """One exact solution of ``m x = b``, or :data:`NO_SOLUTION`."""
    rows, nrows, ncols = _rows_of(m)
    if len(b) != nrows:
        raise ValueError(f"right-hand side has length {len(b)}, expected {nrows}")
    sol = solve_sparse(rows, ncols, b)
    if sol is NO_SOLUTION:
        return NO_SOLUTION
    return to_dense(sol, ncols)


def _det_bareiss(a: List[List[Rational]]) -> Rational:
    n = len(a)
    a = [list(r) for r in a]
    sign = 1
    prev = ONE
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return ZERO
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1] if n else ONE


def _det_sparse(rows: List[SparseVec], n: int) -> Rational:
    rows = [dict(r) for r in rows]
    det = ONE
    remaining = list(range(n))
    # column-by-column elimination choosing the sparsest available pivot row
    for col in range(n):
        cands = [i for i in remaining if rows[i].get(col)]
        if not cands:
            return ZERO
        piv = min(cands, key=lambda i: len(rows[i]))
        # sign of moving row `piv` into position `col` among remaining rows
        pos = remaining.index(piv)
        if pos % 2:
            det = -det
        remaining.pop(pos)
        prow = rows[piv]
        pv = prow[col]
        det *= pv
        inv = ONE / pv
        for i in cands:
            if i == piv:
                continue
            axpy(rows[i], -rows[i][col] * inv, prow)
    return det


def determinant(m) -> Rational:
    """Exact determinant; raises ``ValueError`` for non-square input."""
    rows, nrows, ncols = _rows_of(m)
    if nrows != ncols:
        raise ValueError(f"determinant of non-square {nrows}x{ncols} matrix")
    if nrows * ncols <= DENSE_THRESHOLD:
        return _det_bareiss([to_dense(r, ncols) for r in rows])
    return _det_sparse([dict(r) for r in rows], nrows)


def sparse_matmul(a_rows: Sequence[Mapping[int, Rational]], b_rows: Sequence[Mapping[int, Rational]]) -> List[SparseVec]:
    """Row-dict product ``A @ B`` without shape bookkeeping."""
    out = []
    for r in a_rows:
        acc: SparseVec = {}
        for j, a in r.items():
            bj = b_rows[j]
            if bj:
                axpy(acc, a, bj)
        out.append(acc)
    return out
