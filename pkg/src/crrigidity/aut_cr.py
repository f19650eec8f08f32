"""Infinitesimal CR automorphisms of a model, weight by weight.

A holomorphic field ``X = sum Z^j d/dz_j + sum W^l d/dw_l`` is an
infinitesimal automorphism of ``Im w_l = Phi_l(z, zb, u)`` when, on the
model,

    Im W^l = 2 Re(sum_j Z^j dPhi_l/dz_j) + sum_m Re(W^m) dPhi_l/du_m

for every ``l``.  Fields of weight ``nu`` have ``Z^j`` of weight ``nu + 1``
and ``W^l`` of weight ``nu + [w_l]``, and distinct weights decouple.

The unknowns are the real and imaginary parts of the coefficients.  The
equation for ``w_l`` involves ``Z``, ``W^l`` and ``W^m`` of smaller weight
only, so the system is solved group by group in increasing weight: after
each group the solution space is kept as a basis in the raw unknowns, and
the next group's equations are imposed on that basis together with the new
``W`` unknowns.  The result is the same kernel as one big solve.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import BudgetExceeded, ConsistencyError, size_budget
from .exact_linalg import ONE, ZERO, Echelon, Rational, SparseVec, axpy, rational_str, sparse_matmul
from .models import ModelEquations
from .polynomials import (
    HoloRing,
    Key,
    Poly,
    exponents_of_weight,
    padd,
    pdiff,
    pimag,
    pmul,
    preal,
    pscale,
    ptimes_i,
)

HoloPoly = Dict[Key, Rational]  # keys (iflag, z exps..., w exps...)


@dataclass
class HolomorphicField:
    """Coefficients ``Z^1..Z^n, W^1..W^k`` as polynomials in ``(z, w)``."""

    ring: HoloRing
    Z: List[HoloPoly]
    W: List[HoloPoly]
    weight: int

    @property
    def coefficients(self) -> List[HoloPoly]:
        return list(self.Z) + list(self.W)

    def is_zero(self) -> bool:
        return not any(self.coefficients)

    def is_homogeneous(self) -> bool:
        ws = self.ring.weights
        for v, p in enumerate(self.coefficients):
            target = self.weight + ws[v]
            for key in p:
                if sum(e * w for e, w in zip(key[1:], ws)) != target:
                    return False
        return True

    def text(self) -> str:
        names = self.ring.variable_names()
        parts = []
        for v, p in enumerate(self.coefficients):
            if p:
                parts.append(f"({holo_text(self.ring, p)}) d/d{names[v]}")
        return " + ".join(parts) if parts else "0"

    def latex(self) -> str:
        names = self.ring.variable_names()
        parts = []
        for v, p in enumerate(self.coefficients):
            if p:
                var = names[v][0] + "_{" + names[v][1:] + "}"
                parts.append(rf"\left({holo_latex(self.ring, p)}\right)\frac{{\partial}}{{\partial {var}}}")
        return " + ".join(parts) if parts else "0"


def holo_text(ring: HoloRing, p: HoloPoly) -> str:
    names = ring.variable_names()
    terms = []
    for key in sorted(p, key=lambda k: (k[1:], k[0])):
        c = p[key]
        coef = rational_str(c) + ("*i" if key[0] else "")
        mono = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(names, key[1:]) if e)
        terms.append(f"{coef}*{mono}" if mono else coef)
    return " + ".join(terms)


def holo_latex(ring: HoloRing, p: HoloPoly) -> str:
    names = ring.variable_names()
    terms = []
    for key in sorted(p, key=lambda k: (k[1:], k[0])):
        c = p[key]
        coef = rational_str(c) + (" i" if key[0] else "")
        mono = " ".join(
            (f"{n[0]}_{{{n[1:]}}}" if e == 1 else f"{n[0]}_{{{n[1:]}}}^{{{e}}}") for n, e in zip(names, key[1:]) if e
        )
        terms.append(f"{coef}\\,{mono}" if mono else coef)
    return " + ".join(terms)


def holo_field_bracket(X: HolomorphicField, Y: HolomorphicField) -> HolomorphicField:
    ring = X.ring
    nv = ring.nvars
    xc, yc = X.coefficients, Y.coefficients
    out = []
    for v in range(nv):
        c: HoloPoly = {}
        for s in range(nv):
            if xc[s]:
                d = pdiff(yc[v], s)
                if d:
                    padd(c, pmul(xc[s], d))
            if yc[s]:
                d = pdiff(xc[v], s)
                if d:
                    padd(c, pmul(yc[s], d), -ONE)
        out.append(c)
    return HolomorphicField(ring, out[: ring.n], out[ring.n:], X.weight + Y.weight)


def _restrict(model_r, p: HoloPoly) -> Poly:
    out: Poly = {}
    for key, c in p.items():
        r = model_r.restrict(key[1:])
        padd(out, ptimes_i(r) if key[0] else r, c)
    return out


def tangency_residue(X: HolomorphicField, model: ModelEquations) -> List[Poly]:
    """Per equation, ``2 Re(X (w_l - ...))`` restricted to the model; all zero for automorphisms."""
    ring = model.ring
    R = model.restriction()
    Zs = [_restrict(R, p) for p in X.Z]
    Ws = [_restrict(R, p) for p in X.W]
    reW = [preal(ring, w) if w else {} for w in Ws]
    out = []
    for l, phi in enumerate(model.phis):
        res = pimag(ring, Ws[l]) if Ws[l] else {}
        for j, z in enumerate(Zs):
            if z:
                d = pdiff(phi, ring.z(j))
                if d:
                    padd(res, preal(ring, pmul(z, d)), -2)
        for m, rw in enumerate(reW):
            if rw:
                d = pdiff(phi, ring.u(m))
                if d:
                    padd(res, pmul(rw, d), -ONE)
        out.append(res)
    return out


@dataclass
class AutGradedComponent:
    weight: int
    dimension: int
    basis: List[HolomorphicField]
    method: str = "direct"  # or "inferred"

    def to_json(self, fields: bool = False) -> dict:
        out = {"weight": self.weight, "dim": self.dimension, "method": self.method}
        if fields:
            out["basis"] = [f.text() for f in self.basis]
        return out


class _Unknowns:
    """Raw real unknowns: (slot, monomial, part) with part 0 = real, 1 = imaginary."""

    def __init__(self):
        self.index: Dict[Tuple[int, Tuple[int, ...], int], int] = {}
        self.items: List[Tuple[int, Tuple[int, ...], int]] = []

    def add_slot(self, slot: int, monomials: Sequence[Tuple[int, ...]]) -> List[int]:
        ids = []
        for mono in monomials:
            for part in (0, 1):
                key = (slot, mono, part)
                self.index[key] = len(self.items)
                self.items.append(key)
                ids.append(len(self.items) - 1)
        return ids

    def __len__(self):
        return len(self.items)


def _canonical(ring, key: Key) -> bool:
    """Real polynomials are determined by the coefficients at these keys."""
    n = ring.n
    e = key[1:]
    a, b = e[:n], e[n:2 * n]
    if a == b:
        return key[0] == 0
    return a > b


class _EquationIndex:
    def __init__(self, ring):
        self.ring = ring
        self.ids: Dict[Tuple[int, Key], int] = {}

    def rows_for(self, l: int, p: Poly, col: int, out: Dict[int, SparseVec], coeff=ONE) -> None:
        ring = self.ring
        for key, c in p.items():
            if not _canonical(ring, key):
                continue
            rk = (l, key)
            r = self.ids.get(rk)
            if r is None:
                r = self.ids[rk] = len(self.ids)
            row = out.setdefault(r, {})
            v = row.get(col, ZERO) + coeff * c
            if v:
                row[col] = v
            else:
                row.pop(col, None)


def graded_component(model: ModelEquations, weight: int, budget: Optional[int] = None) -> AutGradedComponent:
    """All weighted homogeneous infinitesimal automorphisms of the given weight."""
    if weight < -model.rho:
        raise ValueError(f"weights below -{model.rho} are empty")
    ring = model.ring
    n, k = model.n, model.k
    holo = HoloRing(n, model.coords.weights)
    hw = holo.weights
    R = model.restriction()
    unk = _Unknowns()
    z_slots: Dict[int, List[Tuple[int, ...]]] = {}
    for j in range(n):
        z_slots[j] = list(exponents_of_weight(hw, weight + 1))
        unk.add_slot(j, z_slots[j])
    w_slots: Dict[int, List[Tuple[int, ...]]] = {}
    for l in range(k):
        w_slots[l] = list(exponents_of_weight(hw, weight + hw[n + l]))
    total = len(unk) + 2 * sum(len(v) for v in w_slots.values())
    if total > 20 * size_budget(budget):
        raise BudgetExceeded(f"weight {weight} has {total} real unknowns")

    eqs = _EquationIndex(ring)
    # current solution space: list of vectors over raw unknowns
    params: List[SparseVec] = [{i: ONE} for i in range(len(unk))]
    re_w: Dict[int, List[Poly]] = {}
    im_w: Dict[int, List[Poly]] = {}
    restricted_z = {j: [R.restrict(mono) for mono in z_slots[j]] for j in range(n)}

    for wt in sorted(set(model.coords.weights)):
        group = model.coords.group(wt)
        start = len(unk)
        for l in group:
            unk.add_slot(n + l, w_slots[l])
            rs = [R.restrict(mono) for mono in w_slots[l]]
            re_w[l] = [preal(ring, r) for r in rs]
            im_w[l] = [pimag(ring, r) for r in rs]
        rows: Dict[int, SparseVec] = {}
        eqs.ids = {}
        for l in group:
            phi = model.phis[l]
            # Z terms: -2 Re((a + ib) Z-monomial * dPhi/dz_j)
            for j in range(n):
                d = pdiff(phi, ring.z(j))
                if not d:
                    continue
                for mono, rz in zip(z_slots[j], restricted_z[j]):
                    prod = pmul(rz, d)
                    a = unk.index[(j, mono, 0)]
                    eqs.rows_for(l, preal(ring, prod), a, rows, -2)
                    eqs.rows_for(l, pimag(ring, prod), a + 1, rows, 2)
            # lower W terms: -Re((a + ib) W-monomial) dPhi/du_m
            for m in range(k):
                if hw[n + m] >= wt:
                    continue
                d = pdiff(phi, ring.u(m))
                if not d:
                    continue
                for mono, rre, rim in zip(w_slots[m], re_w[m], im_w[m]):
                    a = unk.index[(n + m, mono, 0)]
                    eqs.rows_for(l, pmul(rre, d), a, rows, -ONE)
                    eqs.rows_for(l, pmul(rim, d), a + 1, rows, ONE)
            # own W term: Im((a + ib) W-monomial)
            for mono, rre, rim in zip(w_slots[l], re_w[l], im_w[l]):
                a = unk.index[(n + l, mono, 0)]
                eqs.rows_for(l, rim, a, rows, ONE)
                eqs.rows_for(l, rre, a + 1, rows, ONE)

        # rewrite the old-unknown part in terms of the current parameters
        P = len(params)
        by_raw: Dict[int, SparseVec] = {}
        for p_idx, vec in enumerate(params):
            for raw, c in vec.items():
                by_raw.setdefault(raw, {})[p_idx] = c
        new_count = len(unk) - start
        sys_rows = []
        for r in sorted(rows):
            row = rows[r]
            out: SparseVec = {}
            for raw, c in row.items():
                if raw >= start:
                    out[P + raw - start] = out.get(P + raw - start, ZERO) + c
                else:
                    tgt = by_raw.get(raw)
                    if tgt:
                        axpy(out, c, tgt)
            out = {i: c for i, c in out.items() if c}
            if out:
                sys_rows.append(out)
        ech = Echelon(P + new_count)
        for row in sys_rows:
            ech.add(row)
        new_params = []
        for sol in ech.nullspace():
            vec: SparseVec = {}
            for i, c in sol.items():
                if i < P:
                    axpy(vec, c, params[i])
                else:
                    vec[start + i - P] = c
            new_params.append(vec)
        params = new_params

    basis = [_field_from(holo, unk, vec, weight, n, k) for vec in params]
    return AutGradedComponent(weight, len(basis), basis)


def _field_from(holo: HoloRing, unk: _Unknowns, vec: SparseVec, weight: int, n: int, k: int) -> HolomorphicField:
    coeffs: List[HoloPoly] = [{} for _ in range(n + k)]
    for raw, c in vec.items():
        slot, mono, part = unk.items[raw]
        coeffs[slot][(part, *mono)] = c
    return HolomorphicField(holo, coeffs[:n], coeffs[n:], weight)


@dataclass
class AutSummary:
    model: ModelEquations
    components: List[AutGradedComponent]
    max_weight: int
    dim_negative: int
    expected_negative: int

    @property
    def weights(self) -> List[int]:
        return [c.weight for c in self.components]

    @property
    def dims(self) -> List[int]:
        return [c.dimension for c in self.components]

    @property
    def positive_dims(self) -> List[int]:
        return [c.dimension for c in self.components if c.weight > 0]

    @property
    def rigidity(self) -> bool:
        return all(d == 0 for d in self.positive_dims)

    @property
    def total_dimension(self) -> int:
        return sum(self.dims)

    @property
    def label(self) -> str:
        return f"verified up to weight {self.max_weight}"

    def component(self, weight: int) -> AutGradedComponent:
        for c in self.components:
            if c.weight == weight:
                return c
        raise KeyError(weight)

    def to_json(self) -> dict:
        return {
            "weights": self.weights,
            "dims": self.dims,
            "methods": [c.method for c in self.components],
            "rigid_up_to": self.max_weight,
            "rigidity": self.rigidity,
            "dim_negative": self.dim_negative,
            "dim_total": self.total_dimension,
            "label": self.label,
        }


def aut_summary(
    model: ModelEquations,
    max_weight: Optional[int] = None,
    budget: Optional[int] = None,
    infer_after_zero: bool = False,
) -> AutSummary:
    """Components of weights ``-rho..max_weight`` (default ``rho + 2``).

    With ``infer_after_zero``, once a positive component vanishes the higher
    ones are recorded as zero without solving (``method = "inferred"``): a
    field of weight ``nu + 1`` bracketing ``g_{-1}`` into ``g_nu = 0``
    commutes with all of ``g_-``, which acts transitively, so it vanishes.
    Otherwise every component is solved, and a budget overrun after a zero
    positive component falls back to the same inference.
    """
    W = model.rho + 2 if max_weight is None else max_weight
    if W < 0:
        raise ValueError("max_weight must be nonnegative")
    comps: List[AutGradedComponent] = []
    zero_from: Optional[int] = None
    for nu in range(-model.rho, W + 1):
        if zero_from is not None and infer_after_zero:
            comps.append(AutGradedComponent(nu, 0, [], "inferred"))
            continue
        try:
            c = graded_component(model, nu, budget)
        except BudgetExceeded:
            if zero_from is None:
                raise
            comps.append(AutGradedComponent(nu, 0, [], "inferred"))
            continue
        comps.append(c)
        if nu > 0 and c.dimension == 0 and zero_from is None:
            zero_from = nu
    neg = sum(c.dimension for c in comps if c.weight < 0)
    expected = 2 * model.n + model.k
    if neg != expected:
        raise ConsistencyError(f"dim g_- = {neg} differs from dim M = {expected}")
    return AutSummary(model, comps, W, neg, expected)
