"""Finite-dimensional graded Lie algebras given by structure constants."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Mapping, Optional, Sequence, Tuple, Union

from .exact_linalg import (
    ONE,
    ZERO,
    Echelon,
    Q,
    Rational,
    SparseVec,
    axpy,
    rational_to_json,
    to_dense,
    to_sparse,
)

Vector = Union[Sequence, Mapping[int, Rational]]


class GradedLieAlgebra:
    """A graded Lie algebra over Q.

    The basis is laid out block by block following ``degrees``; for the
    negatively graded algebras built in this package that is ``[-1, -2, ...]``
    so the generators come first.  Only brackets ``[e_i, e_j]`` with ``i < j``
    are stored; the rest follows from antisymmetry.
    """

    def __init__(
        self,
        degrees: Sequence[int],
        dims: Sequence[int],
        brackets: Mapping[Tuple[int, int], Mapping[int, Rational]],
        labels: Optional[Sequence[str]] = None,
    ):
        if len(degrees) != len(dims):
            raise ValueError("degrees and dims differ in length")
        if len(set(degrees)) != len(degrees):
            raise ValueError("repeated degree")
        self.degrees = tuple(int(d) for d in degrees)
        self.dims = tuple(int(d) for d in dims)
        self.dim = sum(self.dims)
        self.basis_degree: Tuple[int, ...] = tuple(
            d for d, k in zip(self.degrees, self.dims) for _ in range(k)
        )
        self._offsets: Dict[int, int] = {}
        off = 0
        for d, k in zip(self.degrees, self.dims):
            self._offsets[d] = off
            off += k
        if labels is None:
            labels = [f"e{i + 1}" for i in range(self.dim)]
        if len(labels) != self.dim:
            raise ValueError("one label per basis element required")
        self.labels = tuple(labels)
        table: Dict[Tuple[int, int], SparseVec] = {}
        for (i, j), vec in brackets.items():
            if not (0 <= i < self.dim and 0 <= j < self.dim):
                raise IndexError(f"bracket index ({i}, {j}) out of range")
            v = to_sparse(vec)
            if i == j:
                if v:
                    raise ValueError(f"[e{i}, e{i}] must vanish")
                continue
            if i > j:
                i, j = j, i
                v = {k: -c for k, c in v.items()}
            if v:
                table[(i, j)] = v
        self._brackets = table

    # -- basic structure -------------------------------------------------

    def degree_range(self, d: int) -> range:
        if d not in self._offsets:
            return range(0)
        off = self._offsets[d]
        return range(off, off + self.dims[self.degrees.index(d)])

    def dim_of(self, d: int) -> int:
        return len(self.degree_range(d))

    @property
    def negative_degrees(self) -> List[int]:
        return sorted((d for d in self.degrees if d < 0), reverse=True)

    @property
    def length(self) -> int:
        neg = [d for d, k in zip(self.degrees, self.dims) if d < 0 and k]
        return -min(neg) if neg else 0

    @property
    def rank(self) -> int:
        return self.dim_of(-1)

    @property
    def brackets(self) -> Dict[Tuple[int, int], SparseVec]:
        return {k: dict(v) for k, v in self._brackets.items()}

    def bracket_basis(self, i: int, j: int) -> SparseVec:
        if i == j:
            return {}
        if i < j:
            return dict(self._brackets.get((i, j), {}))
        return {k: -c for k, c in self._brackets.get((j, i), {}).items()}

    def bracket_sparse(self, x: Mapping[int, Rational], y: Mapping[int, Rational]) -> SparseVec:
        out: SparseVec = {}
        tbl = self._brackets
        for i, a in x.items():
            for j, b in y.items():
                if i < j:
                    v = tbl.get((i, j))
                    if v:
                        axpy(out, a * b, v)
                elif j < i:
                    v = tbl.get((j, i))
                    if v:
                        axpy(out, -a * b, v)
        return out

    def bracket(self, x: Vector, y: Vector):
        """Bilinear bracket of coefficient vectors.

        Dense input gives a dense list back; dict input gives a dict.
        """
        dense = not isinstance(x, Mapping)
        if dense and (len(x) != self.dim or len(y) != self.dim):
            raise ValueError(f"vectors must have length {self.dim}")
        if isinstance(y, Mapping) != (not dense):
            raise ValueError("mixed dense and sparse arguments")
        res = self.bracket_sparse(to_sparse(x), to_sparse(y))
        return to_dense(res, self.dim) if dense else res

    def basis_vector(self, i: int) -> List[Rational]:
        v = [ZERO] * self.dim
        v[i] = ONE
        return v

    def __eq__(self, other) -> bool:
        if not isinstance(other, GradedLieAlgebra):
            return NotImplemented
        return (
            self.degrees == other.degrees
            and self.dims == other.dims
            and self._brackets == other._brackets
        )

    def __repr__(self) -> str:
        pairs = ", ".join(f"{d}:{k}" for d, k in zip(self.degrees, self.dims))
        return f"GradedLieAlgebra({pairs})"

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        items = []
        for (i, j) in sorted(self._brackets):
            terms = [
                {"k": k, **rational_to_json(c)}
                for k, c in sorted(self._brackets[(i, j)].items())
            ]
            items.append({"i": i, "j": j, "terms": terms})
        return {
            "degrees": list(self.degrees),
            "dims": list(self.dims),
            "labels": list(self.labels),
            "brackets": items,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "GradedLieAlgebra":
        br = {}
        for item in data["brackets"]:
            br[(int(item["i"]), int(item["j"]))] = {
                int(t["k"]): Q(int(t["num"]), int(t["den"])) for t in item["terms"]
            }
        return cls(data["degrees"], data["dims"], br, data.get("labels"))


@dataclass
class FundamentalityReport:
    is_fundamental: bool
    is_nondegenerate: bool
    length: int
    rank: int
    failing_witness: Optional[str] = None
    antisymmetric: bool = True
    graded: bool = True
    jacobi: bool = True
    messages: List[str] = field(default_factory=list)

    @property
    def is_lie(self) -> bool:
        return self.antisymmetric and self.graded and self.jacobi

    def to_json(self) -> dict:
        return {
            "is_fundamental": self.is_fundamental,
            "is_nondegenerate": self.is_nondegenerate,
            "length": self.length,
            "rank": self.rank,
            "antisymmetric": self.antisymmetric,
            "graded": self.graded,
            "jacobi": self.jacobi,
            "failing_witness": self.failing_witness,
        }


def jacobi_violations(a: GradedLieAlgebra, limit: int = 1) -> List[Tuple[int, int, int]]:
    """Basis triples ``i < j < k`` on which the Jacobi identity fails."""
    bad = []
    degs = a.basis_degree
    present = set(a.degrees)
    for i in range(a.dim):
        for j in range(i + 1, a.dim):
            for d in a.degrees:
                if degs[i] + degs[j] + d not in present:
                    continue
                for k in a.degree_range(d):
                    if k <= j:
                        continue
                    tot: SparseVec = {}
                    for x, y, z in ((i, j, k), (j, k, i), (k, i, j)):
                        yz = a.bracket_basis(y, z)
                        if yz:
                            axpy(tot, ONE, a.bracket_sparse({x: ONE}, yz))
                    if tot:
                        bad.append((i, j, k))
                        if len(bad) >= limit:
                            return bad
    return bad


def check_axioms(a: GradedLieAlgebra) -> FundamentalityReport:
    """Verify the Lie axioms and fundamentality/nondegeneracy of ``a``.

    Fundamentality and nondegeneracy refer to the negative part.  Failures are
    reported, never raised.
    """
    msgs: List[str] = []
    witness = None
    degs = a.basis_degree
    present = set(a.degrees)

    antisym = True
    for (i, j) in a._brackets:
        if i >= j:
            antisym = False
            witness = witness or f"stored bracket ({a.labels[i]}, {a.labels[j]}) not in canonical order"

    graded = True
    for (i, j), v in a._brackets.items():
        target = degs[i] + degs[j]
        if target not in present:
            graded = False
            witness = witness or f"[{a.labels[i]}, {a.labels[j]}] lands outside the degree range"
            continue
        for k in v:
            if degs[k] != target:
                graded = False
                witness = witness or f"[{a.labels[i]}, {a.labels[j]}] has a component in degree {degs[k]}"
                break

    bad = jacobi_violations(a)
    jac = not bad
    if bad:
        i, j, k = bad[0]
        witness = witness or f"Jacobi fails on ({a.labels[i]}, {a.labels[j]}, {a.labels[k]})"

    neg = a.negative_degrees
    length = a.length
    fundamental = True
    for t in range(2, length + 1):
        target = a.degree_range(-t)
        e = Echelon(a.dim)
        for x in a.degree_range(-1):
            for y in a.degree_range(-t + 1):
                e.add(a.bracket_basis(x, y))
        if e.rank < len(target):
            fundamental = False
            missing = next(b for b in target if not e.contains({b: ONE}))
            witness = witness or f"{a.labels[missing]} is not generated by degree -1"
            msgs.append(f"degree {-t} has only {e.rank} of {len(target)} dimensions generated")
            break

    # nondegenerate: x in g_{-1} with [x, g_{-1}] = 0 forces x = 0
    g1 = list(a.degree_range(-1))
    # rows: coordinates of [x, y] for fixed y and output index k; columns: x
    tr: Dict[int, SparseVec] = {}
    for xi, x in enumerate(g1):
        for yi, y in enumerate(g1):
            for k, c in a.bracket_basis(x, y).items():
                tr.setdefault(yi * a.dim + k, {})[xi] = c
    e = Echelon(len(g1))
    for r in tr.values():
        e.add(r)
    nondeg = e.rank == len(g1)
    if not nondeg:
        kern = e.nullspace()[0]
        x = min(kern)
        witness = witness or f"{a.labels[g1[x]]}-direction is central in degree -1"

    return FundamentalityReport(
        is_fundamental=fundamental,
        is_nondegenerate=nondeg,
        length=length,
        rank=a.rank,
        failing_witness=witness if not (antisym and graded and jac and fundamental and nondeg) else None,
        antisymmetric=antisym,
        graded=graded,
        jacobi=jac,
        messages=msgs,
    )


def truncate(a: GradedLieAlgebra, keep_length: int) -> GradedLieAlgebra:
    """Quotient by all degrees below ``-keep_length``."""
    if keep_length < 1:
        raise ValueError("keep_length must be at least 1")
    keep = [i for i, d in enumerate(a.basis_degree) if d >= -keep_length]
    new_index = {old: new for new, old in enumerate(keep)}
    degrees = [d for d in a.degrees if d >= -keep_length]
    dims = [k for d, k in zip(a.degrees, a.dims) if d >= -keep_length]
    br = {}
    for (i, j), v in a._brackets.items():
        if i in new_index and j in new_index:
            w = {new_index[k]: c for k, c in v.items() if k in new_index}
            if w:
                br[(new_index[i], new_index[j])] = w
    labels = [a.labels[i] for i in keep]
    return GradedLieAlgebra(degrees, dims, br, labels)


def heisenberg() -> GradedLieAlgebra:
    """The three-dimensional Heisenberg algebra, dims (2, 1)."""
    return GradedLieAlgebra([-1, -2], [2, 1], {(0, 1): {2: ONE}}, ["x1", "x2", "[x1,x2]"])


def abelian(dim: int, degree: int = -1) -> GradedLieAlgebra:
    return GradedLieAlgebra([degree], [dim], {})
