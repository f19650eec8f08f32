"""Beloshapka models: weights, the bases N_j and the defining equations.

A model of CR dimension ``n`` and codimension ``k`` lives in ``C^{n+k}`` with
coordinates ``z_1..z_n, w_1..w_k``.  It is written in intrinsic coordinates
``(z, zb, u)`` with ``u = Re w`` as the graph ``Im w_l = Phi_l(z, zb, u)``,
where ``Phi_l`` only involves ``u`` of smaller weight.

``N_j`` is a basis of the weight-``j`` real polynomials modulo those that are
pluriharmonic on the graph built so far.  ``N_2`` and ``N_3`` are listed
explicitly; from weight 4 on the quotient is computed: we restrict the real
and imaginary parts of all weight-``j`` holomorphic monomials in ``(z, w)``
to the graph and pick a complement greedily, pure ``(z, zb)`` monomials
first.  Its size is checked against the free CR dimension ``k_j``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from .cr_structures import ComplexStructure, free_cr_algebra, standard_complex_structure
from .errors import BudgetExceeded, ConsistencyError, size_budget
from .exact_linalg import ONE, ZERO, Echelon, Matrix, Q, Rational, SparseVec, rank, rational_str, solve_sparse
from .graded_lie import GradedLieAlgebra
from .polynomials import (
    HALF,
    HoloRing,
    Poly,
    RealMonomial,
    Ring,
    constant_term,
    exponents_of_weight,
    padd,
    pconj,
    pdiff,
    pimag,
    pmul,
    preal,
    pscale,
    ptimes_i,
    real_monomial_basis,
)


@lru_cache(maxsize=None)
def free_cr_dims(n: int, rho: int) -> Tuple[int, ...]:
    """``(k_1, ..., k_rho)`` of the free CR algebra; ``k_1 = 2n``."""
    return tuple(free_cr_algebra(n, rho).k)


@dataclass(frozen=True)
class WeightedCoordinates:
    n: int
    k: int
    rho: int
    weights: Tuple[int, ...]  # [w_1], ..., [w_k]
    group_sizes: Dict[int, int] = field(hash=False, compare=False)  # weight -> count in this model
    full_sizes: Dict[int, int] = field(hash=False, compare=False)  # weight -> k_weight

    @property
    def m(self) -> int:
        return self.group_sizes[self.rho]

    @property
    def full_model(self) -> bool:
        return self.m == self.full_sizes[self.rho]

    def group(self, weight: int) -> List[int]:
        """Indices of the ``w`` variables of the given weight."""
        return [l for l, w in enumerate(self.weights) if w == weight]

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "k": self.k,
            "rho": self.rho,
            "weights": list(self.weights),
            "group_sizes": [self.group_sizes[w] for w in range(2, self.rho + 1)],
        }


def assign_weights(n: int, k: int, budget: Optional[int] = None) -> WeightedCoordinates:
    """Weights of ``w_1..w_k``: ``k_2`` of weight 2, then ``k_3`` of weight 3, and so on."""
    if n < 1 or k < 1:
        raise ValueError("n and k must be positive")
    limit = size_budget(budget)
    rho = 2
    while True:
        dims = free_cr_dims(n, rho)
        total = sum(dims[1:])
        if total >= k:
            break
        if 2 * n + total > limit:
            raise BudgetExceeded(f"codimension {k} needs a free CR algebra beyond the budget {limit}")
        rho += 1
    weights: List[int] = []
    sizes: Dict[int, int] = {}
    full: Dict[int, int] = {}
    for w in range(2, rho + 1):
        full[w] = dims[w - 1]
        take = min(dims[w - 1], k - len(weights))
        sizes[w] = take
        weights.extend([w] * take)
    return WeightedCoordinates(n, k, rho, tuple(weights), sizes, full)


# -- the bases N_j ----------------------------------------------------------

def _exps(ring: Ring, z: Sequence[int] = (), zb: Sequence[int] = ()) -> Tuple[int, ...]:
    e = [0] * ring.nvars
    for i in z:
        e[ring.z(i)] += 1
    for i in zb:
        e[ring.zb(i)] += 1
    return tuple(e)


def basis_N2(n: int, ring: Optional[Ring] = None) -> List[RealMonomial]:
    """``z_i zb_i``, then ``Re(z_i zb_j)``, then ``Im(z_i zb_j)`` for ``i < j``."""
    ring = ring or Ring(n, ())
    out = [RealMonomial("self", _exps(ring, [i], [i])) for i in range(n)]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    out += [RealMonomial("re", _exps(ring, [i], [j])) for i, j in pairs]
    out += [RealMonomial("im", _exps(ring, [i], [j])) for i, j in pairs]
    return out


def basis_N3(n: int, ring: Optional[Ring] = None) -> List[RealMonomial]:
    """``Re`` then ``Im`` of ``z_i z_j zb_r`` for ``i <= j`` and all ``r``."""
    ring = ring or Ring(n, ())
    mons = [(i, j, r) for i in range(n) for j in range(i, n) for r in range(n)]
    out = [RealMonomial("re", _exps(ring, [i, j], [r])) for i, j, r in mons]
    out += [RealMonomial("im", _exps(ring, [i, j], [r])) for i, j, r in mons]
    return out


class GraphRestriction:
    """Restriction of holomorphic monomials in ``(z, w)`` to ``Im w = Phi``.

    On the graph ``w_l = u_l + i Phi_l``, so a holomorphic monomial becomes a
    polynomial in the intrinsic ring.
    """

    def __init__(self, ring: Ring, phis: Sequence[Poly]):
        if len(phis) != ring.k:
            raise ValueError("one Phi per u variable required")
        self.ring = ring
        self.phis = list(phis)
        self.holo = HoloRing(ring.n, ring.u_weights)
        self._w: List[Poly] = []
        for l, phi in enumerate(self.phis):
            w = ring.var(ring.u(l))
            padd(w, ptimes_i(phi))
            self._w.append(w)
        one = (0,) + (0,) * ring.nvars
        self._cache: Dict[Tuple[int, ...], Poly] = {(0,) * self.holo.nvars: {one: ONE}}

    def restrict(self, exps: Tuple[int, ...]) -> Poly:
        hit = self._cache.get(exps)
        if hit is not None:
            return hit
        n = self.ring.n
        i = max(j for j, e in enumerate(exps) if e)
        lower = exps[:i] + (exps[i] - 1,) + exps[i + 1:]
        base = self.restrict(lower)
        if i < n:
            # multiplying by z_i only shifts exponents
            pos = 1 + self.ring.z(i)
            res = {k[:pos] + (k[pos] + 1,) + k[pos + 1:]: c for k, c in base.items()}
        else:
            res = pmul(base, self._w[i - n])
        self._cache[exps] = res
        return res

    def restrict_poly(self, holo: Dict[Tuple[int, ...], Rational], imag: Dict[Tuple[int, ...], Rational] = None) -> Poly:
        """Restriction of ``sum (a + i b) m``."""
        out: Poly = {}
        for e, c in holo.items():
            padd(out, self.restrict(e), c)
        for e, c in (imag or {}).items():
            padd(out, ptimes_i(self.restrict(e)), c)
        return out

    def pluriharmonic_span(self, weight: int, max_w_weight: Optional[int] = None) -> List[Poly]:
        """Real and imaginary parts of restricted weight-``weight`` holomorphic monomials."""
        top = weight if max_w_weight is None else max_w_weight
        ws = [w if i < self.ring.n or w <= top else weight + 1 for i, w in enumerate(self.holo.weights)]
        out = []
        for e in exponents_of_weight(ws, weight):
            r = self.restrict(e)
            out.append(preal(self.ring, r))
            out.append(pimag(self.ring, r))
        return out


class _KeyIndex:
    """Assigns consecutive column ids to polynomial keys."""

    def __init__(self):
        self.ids: Dict[tuple, int] = {}

    def vec(self, p: Poly) -> SparseVec:
        ids = self.ids
        out = {}
        for k, c in p.items():
            j = ids.get(k)
            if j is None:
                j = ids[k] = len(ids)
            out[j] = c
        return out


@dataclass
class PluriharmonicityTest:
    candidate: Poly
    pluriharmonic: bool
    residual: Poly

    def __bool__(self) -> bool:
        return self.pluriharmonic


def is_pluriharmonic_on_graph(p: Poly, ring: Ring, phis: Sequence[Poly], weight: Optional[int] = None) -> PluriharmonicityTest:
    """Whether ``p`` is a combination of restricted real/imaginary parts of holomorphic polynomials.

    ``residual`` is ``p`` reduced modulo that span (zero exactly when the
    test passes), written back as a polynomial.
    """
    if weight is None:
        ws = {ring.weight(k) for k in p}
        if len(ws) > 1:
            raise ValueError("candidate is not weighted homogeneous")
        weight = ws.pop() if ws else 0
    g = GraphRestriction(ring, phis)
    idx = _KeyIndex()
    e = Echelon(1 << 30)
    for q in g.pluriharmonic_span(weight):
        e.add(idx.vec(q))
    red = e.reduce(idx.vec(p))
    back = {j: k for k, j in idx.ids.items()}
    residual = {back[j]: c for j, c in red.items()}
    return PluriharmonicityTest(p, not red, residual)


@dataclass
class Tower:
    """Bases ``N_2..N_top`` computed on the identity graph."""

    n: int
    top: int
    ring: Ring  # u's of weight < top
    bases: Dict[int, List[RealMonomial]]
    u_terms: Dict[int, bool]  # whether N_j uses u variables


_KIND_ORDER = {"self": 0, "re": 1, "im": 2}


def _order_key(ring: Ring, rm: RealMonomial):
    n = ring.n
    has_u = any(rm.exps[2 * n:])
    return (has_u, tuple(-e for e in rm.exps), _KIND_ORDER[rm.kind])


@lru_cache(maxsize=None)
def _tower(n: int, top: int) -> Tower:
    dims = free_cr_dims(n, top)
    weights: List[int] = []
    for w in range(2, top):
        weights.extend([w] * dims[w - 1])
    ring = Ring(n, tuple(weights))
    bases: Dict[int, List[RealMonomial]] = {}
    u_terms: Dict[int, bool] = {}
    if top >= 2:
        bases[2] = basis_N2(n, ring)
    if top >= 3:
        bases[3] = basis_N3(n, ring)
    for j in range(4, top + 1):
        # the graph of all lower groups with identity coefficients
        phis = []
        for w in range(2, j):
            phis.extend(t.poly(ring) for t in bases[w])
        phis.extend({} for _ in range(ring.k - len(phis)))
        g = GraphRestriction(ring, phis)
        idx = _KeyIndex()
        e = Echelon(1 << 30)
        for q in g.pluriharmonic_span(j, max_w_weight=j - 1):
            e.add(idx.vec(q))
        chosen = []
        cands = sorted(real_monomial_basis(ring, j, j - 1), key=lambda t: _order_key(ring, t))
        for t in cands:
            if e.add(idx.vec(t.poly(ring))):
                chosen.append(t)
        if len(chosen) != dims[j - 1]:
            raise ConsistencyError(
                f"|N_{j}| = {len(chosen)} but the free CR algebra has k_{j} = {dims[j - 1]}"
            )
        bases[j] = chosen
        u_terms[j] = any(any(t.exps[2 * n:]) for t in chosen)
    for j in (2, 3):
        if j in bases:
            u_terms[j] = False
    return Tower(n, top, ring, bases, u_terms)


def basis_Nj(n: int, j: int) -> List[RealMonomial]:
    """``N_j`` for CR dimension ``n`` (any ``j >= 2``), over the ring of u's of weight ``< j``."""
    if j < 2:
        raise ValueError("j must be at least 2")
    return list(_tower(n, j).bases[j])


def tower_ring(n: int, j: int) -> Ring:
    return _tower(n, j).ring


# -- defining equations -----------------------------------------------------

@dataclass
class ModelEquations:
    coords: WeightedCoordinates
    ring: Ring
    bases: Dict[int, List[RealMonomial]]
    matrices: Dict[int, Matrix]
    phis: List[Poly]  # Im w_l = phis[l]
    base_ring: Ring  # ring the bases are expressed in

    @property
    def n(self) -> int:
        return self.coords.n

    @property
    def k(self) -> int:
        return self.coords.k

    @property
    def rho(self) -> int:
        return self.coords.rho

    @property
    def full_model(self) -> bool:
        return self.coords.full_model

    def restriction(self) -> GraphRestriction:
        return GraphRestriction(self.ring, self.phis)

    def equation_terms(self, l: int) -> List[Tuple[Rational, RealMonomial]]:
        w = self.coords.weights[l]
        row = self.coords.group(w).index(l)
        A = self.matrices[w]
        return [(A[row, c], t) for c, t in enumerate(self.bases[w]) if A[row, c]]

    def to_text(self) -> str:
        lines = []
        for l in range(self.k):
            terms = self.equation_terms(l)
            rhs = " + ".join(
                (t.text(self.base_ring) if c == 1 else f"{rational_str(c)}*{t.text(self.base_ring)}") for c, t in terms
            )
            lines.append(f"Im w{l + 1} = {rhs}")
        return "\n".join(lines)

    def to_latex(self) -> str:
        lines = []
        for l in range(self.k):
            parts = []
            for c, t in self.equation_terms(l):
                s = t.latex(self.base_ring)
                if c == 1:
                    parts.append(s)
                elif c == -1:
                    parts.append("-" + s)
                else:
                    parts.append(f"{rational_str(c)}\\,{s}")
            rhs = " + ".join(parts).replace("+ -", "- ")
            lines.append(rf"\operatorname{{Im}} w_{{{l + 1}}} = {rhs}")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            **self.coords.to_json(),
            "full_model": self.full_model,
            "bases": {str(w): [t.to_json() for t in b] for w, b in sorted(self.bases.items())},
            "basis_labels": {str(w): [t.text(self.base_ring) for t in b] for w, b in sorted(self.bases.items())},
            "matrices": {
                str(w): [[rational_str(x) for x in row] for row in A.to_dense()]
                for w, A in sorted(self.matrices.items())
            },
            "equations": self.to_text().splitlines(),
        }


def random_full_rank(rows: int, cols: int, rng: random.Random, spread: int = 3) -> Matrix:
    while True:
        m = Matrix.from_dense([[rng.randint(-spread, spread) for _ in range(cols)] for _ in range(rows)])
        if rank(m) == min(rows, cols):
            return m


def model_equations(
    coords: WeightedCoordinates,
    matrices: Optional[Dict[int, Matrix]] = None,
    seed: Optional[int] = None,
) -> ModelEquations:
    """Defining system ``Im w_group(l) = A_l * (t^l_1, ..., t^l_{k_l})``.

    Without matrices, identity blocks are used (the top block is the first
    ``m`` rows of the identity), unless ``seed`` asks for random integer
    matrices of full rank.
    """
    n, rho = coords.n, coords.rho
    tower = _tower(n, rho)
    ring = Ring(n, coords.weights)
    if matrices is None:
        matrices = {}
        rng = random.Random(seed) if seed is not None else None
        for w in range(2, rho + 1):
            rows, cols = coords.group_sizes[w], coords.full_sizes[w]
            if rng is None:
                matrices[w] = Matrix(rows, cols, [{i: ONE} for i in range(rows)])
            else:
                matrices[w] = random_full_rank(rows, cols, rng)
    else:
        matrices = dict(matrices)
    for w in range(2, rho + 1):
        if w not in matrices:
            raise ValueError(f"missing matrix for weight {w}")
        A = matrices[w]
        if not isinstance(A, Matrix):
            A = matrices[w] = Matrix.from_dense(A)
        want = (coords.group_sizes[w], coords.full_sizes[w])
        if A.shape != want:
            raise ValueError(f"A_{w} has shape {A.shape}, expected {want}")
        if rank(A) != want[0]:
            raise ValueError(f"A_{w} is not of maximal rank {want[0]}")
    extra = set(matrices) - set(range(2, rho + 1))
    if extra:
        raise ValueError(f"unexpected matrices for weights {sorted(extra)}")

    bases = {w: tower.bases[w] for w in range(2, rho + 1)}
    tpolys = {w: [ring.pad(t.poly(tower.ring), tower.ring) for t in bases[w]] for w in bases}
    phis: List[Poly] = []
    for w in range(2, rho + 1):
        A = matrices[w]
        for r in range(A.shape[0]):
            phi: Poly = {}
            for c, v in A.row(r).items():
                padd(phi, tpolys[w][c], v)
            phis.append(phi)
    return ModelEquations(coords, ring, bases, matrices, phis, tower.ring)


def model_for(n: int, k: int, seed: Optional[int] = None) -> ModelEquations:
    return model_equations(assign_weights(n, k), seed=seed)


def full_model(n: int, rho: int) -> ModelEquations:
    k = sum(free_cr_dims(n, rho)[1:])
    return model_for(n, k)


# -- CR vector fields and the bracket filtration ----------------------------

Field = List[Poly]  # one coefficient per intrinsic variable


def field_apply(ring: Ring, X: Field, f: Poly) -> Poly:
    out: Poly = {}
    for v, coeff in enumerate(X):
        if coeff:
            d = pdiff(f, v)
            if d:
                padd(out, pmul(coeff, d))
    return out


def field_bracket(ring: Ring, X: Field, Y: Field) -> Field:
    out = []
    for v in range(ring.nvars):
        c = field_apply(ring, X, Y[v])
        padd(c, field_apply(ring, Y, X[v]), -ONE)
        out.append(c)
    return out


def antiholomorphic_fields(model: ModelEquations) -> List[Field]:
    """``Lbar_i = d/dzb_i + sum a_l d/du_l`` tangent to the model."""
    ring = model.ring
    out = []
    order = sorted(range(model.k), key=lambda l: model.coords.weights[l])
    for i in range(model.n):
        a: Dict[int, Poly] = {}
        for l in order:
            phi = model.phis[l]
            s = pdiff(phi, ring.zb(i))
            for m, am in a.items():
                d = pdiff(phi, ring.u(m))
                if d:
                    padd(s, pmul(am, d))
            a[l] = pscale(ptimes_i(s), -1)
        X: Field = [{} for _ in range(ring.nvars)]
        X[ring.zb(i)] = ring.const(1)
        for l, al in a.items():
            X[ring.u(l)] = al
        out.append(X)
    return out


def real_cr_fields(model: ModelEquations) -> List[Field]:
    """``X_1..X_n, Y_1..Y_n`` with ``X = L + Lbar`` and ``Y = J X = i (L - Lbar)``."""
    ring = model.ring
    lbar = antiholomorphic_fields(model)
    xs, ys = [], []
    for i, Lb in enumerate(lbar):
        X: Field = [{} for _ in range(ring.nvars)]
        Y: Field = [{} for _ in range(ring.nvars)]
        X[ring.z(i)] = ring.const(1)
        X[ring.zb(i)] = ring.const(1)
        Y[ring.z(i)] = ptimes_i(ring.const(1))
        Y[ring.zb(i)] = pscale(ptimes_i(ring.const(1)), -1)
        for l in range(model.k):
            a = Lb[ring.u(l)]
            if a:
                X[ring.u(l)] = pscale(preal(ring, a), 2)
                Y[ring.u(l)] = pscale(pimag(ring, a), 2)
        xs.append(X)
        ys.append(Y)
    return xs + ys


def _field_vec(idx: _KeyIndex, X: Field) -> SparseVec:
    return idx.vec({(v,) + k: c for v, p in enumerate(X) for k, c in p.items()})


def value_at_origin(ring: Ring, X: Field) -> SparseVec:
    """Real coordinates of ``X(0)`` in the frame ``(d/dx, d/dy, d/du)``."""
    out: SparseVec = {}
    n = ring.n
    for i in range(n):
        a, b = constant_term(X[ring.z(i)], ring.nvars)
        # a d/dz coefficient c contributes (c + cbar) d/dx-part and i(c - cbar) d/dy-part
        if a:
            out[i] = a
        if b:
            out[n + i] = -b
    for l in range(ring.k):
        a, b = constant_term(X[ring.u(l)], ring.nvars)
        if b:
            raise ConsistencyError("real field has a complex u-component")
        if a:
            out[2 * n + l] = a
    return out


@dataclass
class FiltrationReport:
    dims: List[int]
    expected: List[int]
    totally_nondegenerate: bool
    stalled_at: Optional[int] = None

    def __bool__(self) -> bool:
        return self.totally_nondegenerate

    def to_json(self) -> dict:
        return {
            "dims": self.dims,
            "expected": self.expected,
            "totally_nondegenerate": self.totally_nondegenerate,
            "stalled_at": self.stalled_at,
        }


def bracket_levels(model: ModelEquations) -> List[List[Field]]:
    """Linearly independent spanning sets of the iterated brackets, per length."""
    ring = model.ring
    gens = real_cr_fields(model)
    levels = [gens]
    for _ in range(2, model.rho + 1):
        idx = _KeyIndex()
        e = Echelon(1 << 30)
        new = []
        for g in gens:
            for F in levels[-1]:
                B = field_bracket(ring, g, F)
                if e.add(_field_vec(idx, B)):
                    new.append(B)
        levels.append(new)
    return levels


def check_total_nondegeneracy(model: ModelEquations) -> FiltrationReport:
    """Dimensions at the origin of the bracket filtration ``D_1 < D_2 < ...``."""
    ring = model.ring
    levels = bracket_levels(model)
    dims = []
    e = Echelon(ring.nvars)
    for lev in levels:
        for F in lev:
            e.add(value_at_origin(ring, F))
        dims.append(e.rank)
    expected = []
    acc = 2 * model.n
    for w in range(1, model.rho + 1):
        if w > 1:
            acc += model.coords.group_sizes[w]
        expected.append(acc)
    stalled = None
    for i, (d, x) in enumerate(zip(dims, expected)):
        if d != x:
            stalled = i + 1
            break
    ok = stalled is None and dims[-1] == ring.nvars
    return FiltrationReport(dims, expected, ok, stalled)


def symbol_algebra(model: ModelEquations) -> Tuple[GradedLieAlgebra, ComplexStructure]:
    """Graded algebra of the bracket filtration at the origin.

    Degree -1 has basis ``X_1..X_n, Y_1..Y_n``; degree ``-j`` has basis
    ``d/du_l`` over the weight-``j`` variables.  Brackets are values at the
    origin of brackets of weighted homogeneous representatives.
    """
    rep = check_total_nondegeneracy(model)
    if not rep:
        raise ValueError(f"model is not totally nondegenerate (stalls at {rep.stalled_at})")
    ring = model.ring
    n = model.n
    levels = bracket_levels(model)
    reps: List[Field] = []
    degrees_of: List[int] = []
    reps.extend(levels[0])
    degrees_of.extend([-1] * (2 * n))
    for j in range(2, model.rho + 1):
        lev = levels[j - 1]
        vals = [value_at_origin(ring, F) for F in lev]
        # columns: level fields, rows: coordinates
        for l in model.coords.group(j):
            target = 2 * n + l
            rows: Dict[int, SparseVec] = {}
            for c, v in enumerate(vals):
                for r, x in v.items():
                    rows.setdefault(r, {})[c] = x
            keys = sorted(set(rows) | {target})
            sol = solve_sparse([rows.get(r, {}) for r in keys], len(lev), [ONE if r == target else ZERO for r in keys])
            if not sol and sol != {}:
                raise ConsistencyError(f"d/du{l + 1} is not reached by brackets")
            R: Field = [{} for _ in range(ring.nvars)]
            for c, x in sol.items():
                for v in range(ring.nvars):
                    padd(R[v], lev[c][v], x)
            reps.append(R)
            degrees_of.append(-j)
    basis_index = list(range(2 * n)) + [2 * n + l for l in sorted(range(model.k), key=lambda l: model.coords.weights[l])]
    pos = {b: i for i, b in enumerate(basis_index)}
    br = {}
    for a in range(len(reps)):
        for b in range(a + 1, len(reps)):
            if -(degrees_of[a] + degrees_of[b]) > model.rho:
                continue
            v = value_at_origin(ring, field_bracket(ring, reps[a], reps[b]))
            if v:
                br[(a, b)] = {pos[c]: x for c, x in v.items()}
    dims = [2 * n] + [model.coords.group_sizes[j] for j in range(2, model.rho + 1)]
    labels = [f"X{i + 1}" for i in range(n)] + [f"Y{i + 1}" for i in range(n)]
    labels += [f"du{l + 1}" for l in sorted(range(model.k), key=lambda l: model.coords.weights[l])]
    alg = GradedLieAlgebra([-d for d in range(1, model.rho + 1)], dims, br, labels)
    return alg, standard_complex_structure(n)
