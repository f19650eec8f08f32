"""Tanaka prolongation of a fundamental graded Lie algebra.

``m`` is the negative part.  The component ``g^l`` consists of shifted maps
``d: m -> m + g^0 + ... + g^{l-1}`` raising degree by ``l`` and satisfying
Leibniz; with a complex structure, ``g^0`` is further cut down to maps
commuting with ``J`` on degree -1.

Because ``m`` is generated by degree -1, a derivation is determined by its
values on degree -1.  Those values are the only unknowns: values on deeper
degrees are induced through a fixed presentation ``e = sum c [x_a, f_b]`` of
each basis vector, and Leibniz on the pairs ``(x_a, e)`` is imposed as the
linear system.  By the Jacobi identity Leibniz on these pairs implies it on
all pairs.

Elements of the extended algebra are handled as ``(degree, sparse vector)``:
negative degrees use the basis indices of ``m``, degree ``l >= 0`` uses
indices into the basis of ``g^l``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .cr_structures import ComplexStructure
from .errors import BudgetExceeded, ConsistencyError, size_budget
from .exact_linalg import ONE, Echelon, Matrix, Rational, SparseVec, axpy, rational_to_json
from .graded_lie import GradedLieAlgebra, check_axioms

Element = Tuple[int, SparseVec]
LinForm = Dict[int, SparseVec]  # output coordinate -> coefficients over unknowns


@dataclass
class Derivation:
    """A basis element of ``g^shift``: its value on every basis vector of ``m``."""

    shift: int
    images: List[SparseVec]
    base_degrees: Tuple[int, ...]

    def target_degree(self, i: int) -> int:
        return self.base_degrees[i] + self.shift

    def image(self, i: int) -> Element:
        return (self.target_degree(i), self.images[i])

    def block(self, k: int, m: GradedLieAlgebra, target_dim: int) -> Matrix:
        """Matrix of the map ``g_k -> g_{k+shift}`` (columns follow ``m``'s degree-k basis)."""
        src = list(m.degree_range(k))
        if k + self.shift < 0:
            tgt = list(m.degree_range(k + self.shift))
            pos = {t: r for r, t in enumerate(tgt)}
        else:
            pos = {t: t for t in range(target_dim)}
        rows: List[Dict[int, Rational]] = [{} for _ in range(len(pos))]
        for c, i in enumerate(src):
            for t, v in self.images[i].items():
                rows[pos[t]][c] = v
        return Matrix(len(pos), len(src), rows)

    def to_json(self) -> dict:
        return {
            "shift": self.shift,
            "images": [
                [{"k": k, **rational_to_json(c)} for k, c in sorted(img.items())]
                for img in self.images
            ],
        }


@dataclass
class Component:
    degree: int
    basis: List[Derivation]

    @property
    def dim(self) -> int:
        return len(self.basis)


class _Extended:
    """Bracket on ``m + g^0 + ... + g^L`` built from the known components."""

    def __init__(self, m: GradedLieAlgebra, components: Sequence[Component]):
        self.m = m
        self.components = list(components)
        self.gens = list(m.degree_range(-1))
        self._solvers: Dict[int, Tuple[Echelon, int]] = {}
        self._cache: Dict[tuple, SparseVec] = {}

    def dim_of(self, d: int) -> int:
        if d < 0:
            return self.m.dim_of(d)
        if d < len(self.components):
            return self.components[d].dim
        raise KeyError(d)

    def basis_range(self, d: int):
        if d < 0:
            return self.m.degree_range(d)
        return range(self.dim_of(d))

    def vanishes_from(self) -> Optional[int]:
        for c in self.components:
            if c.dim == 0:
                return c.degree
        return None

    def bracket_basis(self, dx: int, i: int, dy: int, j: int) -> SparseVec:
        key = (dx, i, dy, j)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if dx < 0 and dy < 0:
            res = self.m.bracket_basis(i, j)
        elif dx >= 0 and dy < 0:
            res = dict(self.components[dx].basis[i].images[j])
        elif dx < 0 and dy >= 0:
            res = {k: -c for k, c in self.components[dy].basis[j].images[i].items()}
        else:
            res = self._bracket_nonneg(dx, i, dy, j)
        self._cache[key] = res
        return res

    def bracket(self, x: Element, y: Element) -> Element:
        dx, X = x
        dy, Y = y
        d = dx + dy
        out: SparseVec = {}
        if d < 0 and -d > self.m.length:
            return (d, out)
        for i, a in X.items():
            for j, b in Y.items():
                axpy(out, a * b, self.bracket_basis(dx, i, dy, j))
        return (d, out)

    def action_on_generators(self, x: Element) -> List[SparseVec]:
        return [self.bracket(x, (-1, {g: ONE}))[1] for g in self.gens]

    def _flat(self, d: int, action: List[SparseVec]) -> SparseVec:
        # pack the values on the generators into one vector
        width = self.m.dim if d - 1 < 0 else self.dim_of(d - 1)
        out = {}
        for a, v in enumerate(action):
            for k, c in v.items():
                out[a * width + k] = c
        return out

    def _solver(self, d: int) -> Tuple[Echelon, int]:
        if d not in self._solvers:
            comp = self.components[d]
            width = self.m.dim if d - 1 < 0 else self.dim_of(d - 1)
            tag0 = len(self.gens) * width
            e = Echelon(tag0 + comp.dim, lambda c: (c >= tag0, c))
            for t, der in enumerate(comp.basis):
                flat = self._flat(d, [der.images[g] for g in self.gens])
                flat[tag0 + t] = ONE
                e.add(flat)
            self._solvers[d] = (e, tag0)
        return self._solvers[d]

    def coordinates(self, d: int, action: List[SparseVec]) -> SparseVec:
        """Express a map on generators as a combination of the ``g^d`` basis."""
        if d >= len(self.components):
            stop = self.vanishes_from()
            if stop is not None and d >= stop:
                if any(action):
                    raise ConsistencyError(f"nonzero element in vanishing degree {d}")
                return {}
            raise KeyError(f"component g^{d} not computed")
        e, tag0 = self._solver(d)
        red = e.reduce(self._flat(d, action))
        if any(k < tag0 for k in red):
            raise ConsistencyError(f"bracket does not lie in g^{d}")
        return {k - tag0: -c for k, c in red.items()}

    def _bracket_nonneg(self, dx: int, i: int, dy: int, j: int) -> SparseVec:
        x = (dx, {i: ONE})
        y = (dy, {j: ONE})
        action = []
        for g in self.gens:
            gv = (-1, {g: ONE})
            a = self.bracket(x, self.bracket(y, gv))[1]
            axpy(a, -ONE, self.bracket(y, self.bracket(x, gv))[1])
            action.append(a)
        return self.coordinates(dx + dy, action)


def _presentations(m: GradedLieAlgebra) -> Dict[int, List[Tuple[Rational, int, int]]]:
    """For each basis vector of degree <= -2, a list ``(c, x, f)`` with ``e = sum c [x, f]``."""
    gens = list(m.degree_range(-1))
    out: Dict[int, List[Tuple[Rational, int, int]]] = {}
    for j in range(2, m.length + 1):
        prev = list(m.degree_range(-(j - 1)))
        pairs = [(x, f) for x in gens for f in prev]
        tag0 = m.dim
        e = Echelon(tag0 + len(pairs), lambda c: (c >= tag0, c))
        for t, (x, f) in enumerate(pairs):
            v = m.bracket_basis(x, f)
            v[tag0 + t] = ONE
            e.add(v)
        for b in m.degree_range(-j):
            red = e.reduce({b: ONE})
            if any(k < tag0 for k in red):
                raise ValueError(f"{m.labels[b]} is not generated by degree -1; algebra is not fundamental")
            out[b] = [(-c, *pairs[k - tag0]) for k, c in sorted(red.items())]
    return out


def _add_form(out: LinForm, coeff, form: LinForm) -> None:
    for k, v in form.items():
        tgt = out.setdefault(k, {})
        axpy(tgt, coeff, v)
        if not tgt:
            del out[k]


def _check_base(m: GradedLieAlgebra) -> bool:
    """Validate ``m``; returns its nondegeneracy."""
    if any(d >= 0 for d, k in zip(m.degrees, m.dims) if k):
        raise ValueError("base algebra must be negatively graded")
    rep = check_axioms(m)
    if not rep.is_lie:
        raise ValueError(f"base is not a graded Lie algebra: {rep.failing_witness}")
    if not rep.is_fundamental:
        raise ValueError(f"base is not fundamental: {rep.failing_witness}")
    return rep.is_nondegenerate


def _solve_component(
    m: GradedLieAlgebra,
    components: Sequence[Component],
    J: Optional[ComplexStructure],
    budget: Optional[int] = None,
) -> Component:
    l = len(components)
    ext = _Extended(m, components)
    gens = ext.gens
    r = len(gens)
    tdeg = l - 1
    T = ext.dim_of(tdeg)
    nunk = r * T
    if nunk > size_budget(budget):
        raise BudgetExceeded(f"g^{l} has {nunk} unknowns")
    if nunk == 0:
        return Component(l, [])

    pres = _presentations(m)
    tgt_basis = list(ext.basis_range(tdeg))
    # value of the unknown derivation on each basis vector of m, as linear forms
    value: Dict[int, LinForm] = {}
    for a, x in enumerate(gens):
        if tdeg < 0:
            value[x] = {t: {a * T + p: ONE} for p, t in enumerate(tgt_basis)}
        else:
            value[x] = {t: {a * T + t: ONE} for t in range(T)}

    def apply_form(form: LinForm, df: int, other: Element, left: bool) -> LinForm:
        # bracket of the symbolic element (degree df) with a concrete one
        out: LinForm = {}
        for s, coeffs in form.items():
            if left:
                res = ext.bracket((df, {s: ONE}), other)[1]
            else:
                res = ext.bracket(other, (df, {s: ONE}))[1]
            for k, c in res.items():
                tgt = out.setdefault(k, {})
                axpy(tgt, c, coeffs)
                if not tgt:
                    del out[k]
        return out

    def leibniz(x_idx: int, f: int) -> LinForm:
        # [D x, f] + [x, D f]
        df = m.basis_degree[f]
        out = apply_form(value[x_idx], tdeg, (df, {f: ONE}), left=True)
        _add_form(out, ONE, apply_form(value[f], df + l, (-1, {x_idx: ONE}), left=False))
        return out

    for j in range(2, m.length + 1):
        for b in m.degree_range(-j):
            form: LinForm = {}
            for c, x, f in pres[b]:
                _add_form(form, c, leibniz(x, f))
            value[b] = form

    rows: List[SparseVec] = []
    for x in gens:
        for f in range(m.dim):
            lhs: LinForm = {}
            for k, c in m.bracket_basis(x, f).items():
                _add_form(lhs, c, value[k])
            _add_form(lhs, -ONE, leibniz(x, f))
            rows.extend(v for v in lhs.values() if v)

    if l == 0 and J is not None:
        # D(J x_a) = J D(x_a) on degree -1
        for a in range(r):
            ja = J.image(a)
            for t in range(r):
                row: SparseVec = {}
                for b, c in ja.items():
                    axpy(row, c, {b * T + t: ONE})
                for s in range(r):
                    jts = J.matrix[t, s]
                    if jts:
                        axpy(row, -jts, {a * T + s: ONE})
                if row:
                    rows.append(row)

    # canonical order keeps the output independent of assembly order
    rows.sort(key=lambda v: sorted(v.items()))
    ech = Echelon(nunk)
    for row in rows:
        ech.add(row)
    basis = []
    for sol in ech.nullspace():
        images = []
        for i in range(m.dim):
            v: SparseVec = {}
            for k, coeffs in value[i].items():
                s = sum((coeffs[u] * sol[u] for u in coeffs if u in sol), Rational(0))
                if s:
                    v[k] = s
            images.append(v)
        basis.append(Derivation(l, images, m.basis_degree))
    return Component(l, basis)


def prolong_degree_zero(m: GradedLieAlgebra, J: Optional[ComplexStructure] = None, budget: Optional[int] = None) -> Component:
    """Degree-preserving derivations of ``m`` (commuting with ``J`` when given)."""
    _check_base(m)
    if J is not None and J.dimension != m.rank:
        raise ValueError("J does not act on degree -1")
    return _solve_component(m, [], J, budget)


def prolong_step(
    m: GradedLieAlgebra, components: Sequence[Component], budget: Optional[int] = None
) -> Component:
    """The next component ``g^l`` with ``l = len(components)``."""
    if not components:
        raise ValueError("g^0 must be computed first")
    for i, c in enumerate(components):
        if c.degree != i:
            raise ValueError(f"component {i} missing")
    return _solve_component(m, components, None, budget)


@dataclass
class ProlongationResult:
    base: GradedLieAlgebra
    components: List[Component]
    terminated_at: Optional[int]
    extended_algebra: GradedLieAlgebra
    transitive: bool
    degenerate: bool = False
    budget_reached: bool = False
    J: Optional[ComplexStructure] = None

    @property
    def dims_negative(self) -> List[int]:
        return [self.base.dim_of(-d) for d in range(1, self.base.length + 1)]

    @property
    def dims_nonnegative(self) -> List[int]:
        return [c.dim for c in self.components]

    @property
    def dimension(self) -> int:
        return self.base.dim + sum(self.dims_nonnegative)

    def leibniz_defects(self) -> int:
        """Basis pairs of ``m`` on which some returned derivation fails Leibniz."""
        ext = _Extended(self.base, self.components)
        m = self.base
        bad = 0
        for comp in self.components:
            for der in comp.basis:
                for y in range(m.dim):
                    for z in range(y + 1, m.dim):
                        left: SparseVec = {}
                        for k, c in m.bracket_basis(y, z).items():
                            axpy(left, c, der.images[k])
                        right = ext.bracket(der.image(y), (m.basis_degree[z], {z: ONE}))[1]
                        axpy(right, ONE, ext.bracket((m.basis_degree[y], {y: ONE}), der.image(z))[1])
                        axpy(left, -ONE, right)
                        if left:
                            bad += 1
        return bad

    def j_defects(self) -> int:
        """Degree-0 basis derivations that fail to commute with ``J`` on degree -1."""
        if self.J is None or not self.components:
            return 0
        gens = list(self.base.degree_range(-1))
        bad = 0
        for der in self.components[0].basis:
            for a in range(len(gens)):
                lhs: SparseVec = {}
                for b, c in self.J.image(a).items():
                    axpy(lhs, c, der.images[gens[b]])
                rhs = self.J.apply({gens.index(k): c for k, c in der.images[gens[a]].items()})
                rhs = {gens[k]: c for k, c in rhs.items()}
                axpy(lhs, -ONE, rhs)
                if lhs:
                    bad += 1
                    break
        return bad

    def to_json(self, derivations: bool = False) -> dict:
        out = {
            "dims_negative": self.dims_negative,
            "dims_nonnegative": self.dims_nonnegative,
            "terminated_at": self.terminated_at,
            "transitive": self.transitive,
            "degenerate": self.degenerate,
        }
        if derivations:
            out["derivations"] = [[d.to_json() for d in c.basis] for c in self.components]
        return out


def _assemble(m: GradedLieAlgebra, components: Sequence[Component], complete: bool) -> GradedLieAlgebra:
    ext = _Extended(m, components)
    nonneg = [c for c in components if c.dim]
    top = len(nonneg)
    degrees = [-d for d in range(1, m.length + 1)] + list(range(top))
    dims = [m.dim_of(-d) for d in range(1, m.length + 1)] + [c.dim for c in nonneg]
    offset = {}
    off = m.dim
    for c in nonneg:
        offset[c.degree] = off
        off += c.dim

    def glob(d: int, vec: SparseVec) -> SparseVec:
        if d < 0:
            return dict(vec)
        if d not in offset:
            return {}
        return {offset[d] + k: c for k, c in vec.items()}

    br = dict(m.brackets)
    elems = [(m.basis_degree[i], i) for i in range(m.dim)]
    elems += [(c.degree, t) for c in nonneg for t in range(c.dim)]
    for p in range(len(elems)):
        dp, ip = elems[p]
        for q in range(p + 1, len(elems)):
            dq, iq = elems[q]
            if dp < 0 and dq < 0:
                continue
            d = dp + dq
            if d < -m.length:
                continue
            if d >= top:
                # zero past termination; not computed when the run stopped early
                continue
            v = glob(d, ext.bracket_basis(dp, ip, dq, iq))
            if v:
                br[(p, q)] = v
    labels = list(m.labels) + [f"g{c.degree}_{t + 1}" for c in nonneg for t in range(c.dim)]
    return GradedLieAlgebra(degrees, dims, br, labels)


def check_transitive(a: GradedLieAlgebra) -> bool:
    """No nonzero element of nonnegative degree brackets all of the negative part to zero."""
    neg = [i for i, d in enumerate(a.basis_degree) if d < 0]
    for d in a.degrees:
        if d < 0:
            continue
        idx = list(a.degree_range(d))
        if not idx:
            continue
        rows: Dict[Tuple[int, int], SparseVec] = {}
        for col, x in enumerate(idx):
            for y in neg:
                for k, c in a.bracket_basis(x, y).items():
                    rows.setdefault((y, k), {})[col] = c
        e = Echelon(len(idx))
        for r in rows.values():
            e.add(r)
        if e.rank < len(idx):
            return False
    return True


def levi_tanaka(
    m: GradedLieAlgebra,
    J: Optional[ComplexStructure] = None,
    max_degree: int = 3,
    budget: Optional[int] = None,
) -> ProlongationResult:
    """Prolong ``m`` (with ``J`` on degree 0) until a zero component or ``max_degree``."""
    if max_degree < 0:
        raise ValueError("max_degree must be nonnegative")
    nondeg = _check_base(m)
    if not nondeg:
        warnings.warn("base algebra is degenerate; the prolongation need not terminate", stacklevel=2)
    comps = [prolong_degree_zero(m, J, budget)]
    terminated = 0 if comps[0].dim == 0 else None
    budget_hit = False
    while terminated is None and len(comps) <= max_degree:
        try:
            c = prolong_step(m, comps, budget)
        except BudgetExceeded:
            budget_hit = True
            break
        comps.append(c)
        if c.dim == 0:
            terminated = c.degree
    ext = _assemble(m, comps, terminated is not None)
    return ProlongationResult(
        base=m,
        components=comps,
        terminated_at=terminated,
        extended_algebra=ext,
        transitive=check_transitive(ext),
        degenerate=not nondeg,
        budget_reached=budget_hit,
        J=J,
    )
