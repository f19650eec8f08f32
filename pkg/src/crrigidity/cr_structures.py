"""Complex structures on generators and free CR algebras.

The free CR algebra of CR dimension ``n`` and length ``rho`` is the free
nilpotent algebra on ``x1..xn, Jx1..Jxn`` divided by the ideal generated by
``[Jx, Jy] - [x, y]``.  The quotient basis is the complement of the ideal
picked greedily in Hall order, so words listed earlier are kept.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence

from .errors import BudgetExceeded
from .exact_linalg import ONE, Echelon, Matrix, Q, Rational, SparseVec, axpy, rational_str
from .free_lie import HallBasis, HallWord, degree, free_nilpotent_algebra, word_key
from .graded_lie import GradedLieAlgebra, check_axioms, truncate

COMPLEMENT_RULE = "greedy-hall-order"


@dataclass(frozen=True)
class ComplexStructure:
    """A matrix ``J`` with ``J @ J = -I``; column ``c`` is the image of ``e_c``."""

    matrix: Matrix

    def __post_init__(self):
        r, c = self.matrix.shape
        if r != c or r % 2:
            raise ValueError("a complex structure needs an even square matrix")
        sq = self.matrix @ self.matrix
        if sq != Matrix.identity(r) * -1:
            raise ValueError("J*J is not -identity")

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    @property
    def n(self) -> int:
        return self.dimension // 2

    def image(self, i: int) -> SparseVec:
        """``J e_i`` as a sparse vector."""
        m = self.matrix
        return {r: m[r, i] for r in range(self.dimension) if m[r, i]}

    def apply(self, vec: SparseVec) -> SparseVec:
        out: SparseVec = {}
        for i, c in vec.items():
            axpy(out, c, self.image(i))
        return out

    def to_json(self) -> List[List[str]]:
        return [[rational_str(x) for x in row] for row in self.matrix.to_dense()]


def standard_complex_structure(n: int) -> ComplexStructure:
    """``x_i -> Jx_i``, ``Jx_i -> -x_i`` in the basis ``x1..xn, Jx1..Jxn``."""
    if n < 1:
        raise ValueError("n must be positive")
    rows: List[Dict[int, Rational]] = [{} for _ in range(2 * n)]
    for i in range(n):
        rows[n + i][i] = ONE
        rows[i][n + i] = -ONE
    return ComplexStructure(Matrix(2 * n, 2 * n, rows))


def generator_names(n: int) -> List[str]:
    return [f"x{i + 1}" for i in range(n)] + [f"Jx{i + 1}" for i in range(n)]


@dataclass
class GradedSubspace:
    """A graded subspace of an algebra, held as one reduced echelon basis."""

    ambient_dim: int
    echelon: Echelon
    dims: Dict[int, int]

    def contains(self, vec: SparseVec) -> bool:
        return self.echelon.contains(vec)

    def dim_of(self, d: int) -> int:
        return self.dims.get(d, 0)


def cr_relations(free: GradedLieAlgebra, J: ComplexStructure) -> List[SparseVec]:
    """``[Jx, Jy] - [x, y]`` over pairs of generators."""
    gens = list(free.degree_range(-1))
    if len(gens) != J.dimension:
        raise ValueError(f"J acts on {J.dimension} generators, algebra has {len(gens)}")
    out = []
    for a in range(len(gens)):
        ja = J.image(a)
        for b in range(a + 1, len(gens)):
            v = free.bracket_sparse(ja, J.image(b))
            axpy(v, -ONE, free.bracket_basis(gens[a], gens[b]))
            if v:
                out.append(v)
    return out


def cr_ideal(free: GradedLieAlgebra, J: ComplexStructure) -> GradedSubspace:
    """Graded ideal generated by the CR relations, saturated degree by degree."""
    if free.length < 1:
        raise ValueError("empty algebra")
    gens = list(free.degree_range(-1))
    # pivots prefer late words so that early words survive in the complement
    ech = Echelon(free.dim, lambda c: -c)
    dims: Dict[int, int] = {}
    layer = []
    for v in cr_relations(free, J):
        if ech.add(v):
            layer.append(v)
    if free.length >= 2:
        dims[-2] = len(layer)
    # ideal is spanned by iterated brackets of generators with the relations
    for d in range(3, free.length + 1):
        new = []
        for g in gens:
            for v in layer:
                w = free.bracket_sparse({g: ONE}, v)
                if w and ech.add(w):
                    new.append(w)
        dims[-d] = len(new)
        layer = new
    return GradedSubspace(free.dim, ech.canonical(), dims)


@dataclass
class FreeCRAlgebra:
    n: int
    length: int
    algebra: GradedLieAlgebra
    J: ComplexStructure
    free: GradedLieAlgebra
    hall: HallBasis
    ideal: GradedSubspace
    basis_words: List[HallWord]
    # free-algebra index -> quotient index for kept words
    _kept: Dict[int, int] = field(default_factory=dict, repr=False)

    @property
    def k(self) -> List[int]:
        return list(self.algebra.dims)

    def project(self, vec: SparseVec) -> SparseVec:
        """Quotient coordinates of a free-algebra vector."""
        red = self.ideal.echelon.reduce(vec)
        out = {}
        for i, c in red.items():
            out[self._kept[i]] = c
        return out

    def project_words(self, combo: Dict[HallWord, Rational]) -> SparseVec:
        return self.project(self.hall.to_vector(combo))

    def to_json(self) -> dict:
        data = self.algebra.to_json()
        data["J"] = self.J.to_json()
        data["k"] = self.k
        data["n"] = self.n
        data["complement"] = COMPLEMENT_RULE
        return data


def free_cr_algebra(
    n: int, rho: int, J: Optional[ComplexStructure] = None, budget: Optional[int] = None
) -> FreeCRAlgebra:
    """Quotient of the free algebra of rank ``2n`` and length ``rho`` by the CR ideal."""
    if n < 1 or rho < 1:
        raise ValueError("n and rho must be positive")
    J = J or standard_complex_structure(n)
    if J.n != n:
        raise ValueError("J has the wrong size")
    names = generator_names(n)
    free, hb = free_nilpotent_algebra(2 * n, rho, budget, names)
    ideal = cr_ideal(free, J)
    free_cols = ideal.echelon.free_columns()
    kept = {old: new for new, old in enumerate(free_cols)}
    words = hb.words
    basis_words = [words[i] for i in free_cols]
    dims = [sum(1 for w in basis_words if degree(w) == d) for d in range(1, rho + 1)]
    br = {}
    for a in range(len(free_cols)):
        for b in range(a + 1, len(free_cols)):
            if degree(basis_words[a]) + degree(basis_words[b]) > rho:
                continue
            v = ideal.echelon.reduce(free.bracket_basis(free_cols[a], free_cols[b]))
            if v:
                br[(a, b)] = {kept[i]: c for i, c in v.items()}
    alg = GradedLieAlgebra(
        [-d for d in range(1, rho + 1)], dims, br, [hb.label(w) for w in basis_words]
    )
    return FreeCRAlgebra(n, rho, alg, J, free, hb, ideal, basis_words, kept)


@dataclass
class NondegeneracyReport:
    totally_nondegenerate: bool
    length: int
    n: int
    truncated_dims: List[int]
    expected_dims: List[int]
    cr_identity: bool
    # whole algebra (not only its truncation) is free CR
    full_free: bool
    reason: Optional[str] = None

    def __bool__(self) -> bool:
        return self.totally_nondegenerate

    def to_json(self) -> dict:
        return {
            "totally_nondegenerate": self.totally_nondegenerate,
            "length": self.length,
            "n": self.n,
            "truncated_dims": self.truncated_dims,
            "expected_dims": self.expected_dims,
            "cr_identity": self.cr_identity,
            "full_free": self.full_free,
            "reason": self.reason,
        }


def _canonical_image_ranks(a: GradedLieAlgebra, F: FreeCRAlgebra, upto: int) -> Dict[int, int]:
    """Rank per degree of the generator-induced map from ``F`` into ``a``."""
    gens = list(a.degree_range(-1))
    images: Dict[HallWord, SparseVec] = {}

    def img(w):
        if w in images:
            return images[w]
        if isinstance(w, int):
            v = {gens[w]: ONE}
        else:
            v = a.bracket_sparse(img(w[0]), img(w[1]))
        images[w] = v
        return v

    ranks = {}
    for d in range(1, upto + 1):
        e = Echelon(a.dim)
        for w in F.basis_words:
            if degree(w) == d:
                e.add(img(w))
        ranks[d] = e.rank
    return ranks


def is_totally_nondegenerate_symbol(
    a: GradedLieAlgebra, J: Optional[ComplexStructure] = None
) -> NondegeneracyReport:
    """Whether ``a`` truncated to length ``rho - 1`` is free CR.

    The comparison goes through the map induced by sending generators to the
    degree -1 basis of ``a`` in order; it is an isomorphism exactly when it
    respects the CR relations, and its rank matches both dimensions in every
    degree.
    """
    r = a.rank
    if r % 2:
        raise ValueError("degree -1 must have even dimension")
    n = r // 2
    J = J or standard_complex_structure(n)
    if J.n != n:
        raise ValueError("J does not match degree -1")
    rho = a.length
    rep = check_axioms(a)
    if not (rep.is_lie and rep.is_fundamental):
        return NondegeneracyReport(False, rho, n, [], [], False, False, "not a fundamental Lie algebra")

    gens = list(a.degree_range(-1))
    cr_ok = True
    for x in range(r):
        jx = {gens[i]: c for i, c in J.image(x).items()}
        for y in range(x + 1, r):
            jy = {gens[i]: c for i, c in J.image(y).items()}
            v = a.bracket_sparse(jx, jy)
            axpy(v, -ONE, a.bracket_basis(gens[x], gens[y]))
            if v:
                cr_ok = False
                break
        if not cr_ok:
            break

    def compare(length: int):
        if length < 1:
            return True, [], []
        F = free_cr_algebra(n, length, J)
        ranks = _canonical_image_ranks(a, F, length)
        have = [a.dim_of(-d) for d in range(1, length + 1)]
        want = F.k
        ok = cr_ok and have == want and all(ranks[d] == want[d - 1] for d in ranks)
        return ok, have, want

    ok, have, want = compare(rho - 1)
    full, _, _ = compare(rho)
    reason = None
    if not cr_ok:
        reason = "degree -2 violates [Jx, Jy] = [x, y]"
    elif not ok:
        reason = f"truncated dimensions {have} differ from free CR {want}"
    return NondegeneracyReport(ok, rho, n, have, want, cr_ok, full, reason)


def cr_identity_defects(F: FreeCRAlgebra) -> List[tuple]:
    """Generator pairs on which ``[Jx, Jy] != [x, y]`` in the quotient."""
    a = F.algebra
    gens = list(a.degree_range(-1))
    bad = []
    for x in range(len(gens)):
        jx = {gens[i]: c for i, c in F.J.image(x).items()}
        for y in range(x + 1, len(gens)):
            jy = {gens[i]: c for i, c in F.J.image(y).items()}
            v = a.bracket_sparse(jx, jy)
            axpy(v, -ONE, a.bracket_basis(gens[x], gens[y]))
            if v:
                bad.append((x, y))
    return bad
