"""Orchestrated rigidity checks for Beloshapka models.

Two routes are combined for each case.  The Lie-algebra route prolongs the
symbol algebra (with its complex structure) and looks at ``g^1``; the direct
route solves for weighted homogeneous infinitesimal automorphisms of the
model up to a weight bound.  A case is called rigid only when both agree.

The module also carries the explicit 6x6 linear system on the surviving
unknowns ``a_1, a_2, b_2, a_3, b_3, b_4`` of a degree-one derivation, with
its determinant as a polynomial in ``rho``.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from math import comb
from typing import List, Optional, Sequence, Union

import sympy

from .aut_cr import AutSummary, aut_summary
from .cr_structures import free_cr_algebra
from .errors import BudgetExceeded
from .exact_linalg import Matrix, Q, Rational, determinant, rational_str
from .models import assign_weights, free_cr_dims, model_equations, symbol_algebra
from .tanaka import ProlongationResult, levi_tanaka

UNKNOWN_LABELS = ("a1", "a2", "b2", "a3", "b3", "b4")

RIGID = "rigid"
NOT_RIGID = "not-rigid"
INCONCLUSIVE = "inconclusive-at-budget"


def coefficient_C(r: int, j: int) -> Rational:
    """``(j + 1) * binomial(r, j + 2)``."""
    if r < 0 or j < 0:
        raise ValueError("r and j must be nonnegative")
    return Q((j + 1) * comb(r, j + 2))


# -- the 6x6 system ----------------------------------------------------------

def _rows(r, half, C0, variant: str):
    rows = [
        [C0, 0, r, 0, -1, 0],
        [0, 0, -1, 0, r, C0],
        [0, r - 3, 0, 2, 0, 1],
        [(r - 1) * half, 0, 2, 0, 0, 0],
        [1, 0, 2, r - 3, 0, 0],
        [0, 0, 0, 2, 0, (r - 1) * half],
    ]
    if variant == "equations":
        # 2 b2 + a1 + (rho - 3) b3 = 0 read off term by term
        rows[4] = [1, 0, 2, 0, r - 3, 0]
    elif variant != "display":
        raise ValueError(f"unknown variant {variant!r}")
    return rows


@dataclass
class WarhurstSystem:
    """Coefficient matrix on ``(a1, a2, b2, a3, b3, b4)``.

    ``rho`` is an int or a sympy symbol.  For an int the matrix is an exact
    ``Matrix``; otherwise a sympy matrix with polynomial entries.
    """

    rho: Union[int, sympy.Symbol]
    matrix6: Union[Matrix, sympy.Matrix]
    variant: str = "display"
    unknown_labels: tuple = UNKNOWN_LABELS

    @property
    def symbolic(self) -> bool:
        return not isinstance(self.rho, int)

    def entry(self, i: int, j: int):
        """1-based entry, as in the usual matrix notation."""
        return self.matrix6[i - 1, j - 1]

    def determinant(self):
        if self.symbolic:
            return sympy.factor(self.matrix6.det())
        return determinant(self.matrix6)

    def to_json(self) -> dict:
        if self.symbolic:
            rows = [[str(self.matrix6[i, j]) for j in range(6)] for i in range(6)]
        else:
            rows = [[rational_str(x) for x in r] for r in self.matrix6.to_dense()]
        return {
            "rho": str(self.rho),
            "variant": self.variant,
            "unknowns": list(self.unknown_labels),
            "matrix": rows,
            "determinant": str(self.determinant()) if self.symbolic else rational_str(self.determinant()),
        }


def warhurst_matrix(rho: Union[int, str, sympy.Symbol] = "rho", variant: str = "display") -> WarhurstSystem:
    """The 6x6 system at an integer ``rho`` or symbolically.

    ``variant="display"`` is the matrix as usually printed; ``"equations"``
    places ``rho - 3`` in the fifth row on ``b3`` as the underlying
    equation has it.  Both have determinants nonvanishing for ``rho > 3``.
    """
    if isinstance(rho, str):
        rho = sympy.Symbol(rho)
    if isinstance(rho, int):
        if rho < 2:
            raise ValueError("rho must be at least 2")
        rows = _rows(Q(rho), Q(1, 2), coefficient_C(rho, 0), variant)
        return WarhurstSystem(rho, Matrix.from_dense(rows), variant)
    r = rho
    rows = _rows(r, sympy.Rational(1, 2), r * (r - 1) / 2, variant)
    return WarhurstSystem(r, sympy.Matrix(rows), variant)


@dataclass
class DeterminantReport:
    variant: str
    polynomial: sympy.Expr
    degree: int
    rational_roots: List[sympy.Rational]
    values: dict  # rho -> Rational
    value_at_3: Rational

    @property
    def max_integer_root(self) -> Optional[int]:
        ints = [int(r) for r in self.rational_roots if r.is_integer]
        return max(ints) if ints else None

    @property
    def no_integer_root_above_3(self) -> bool:
        m = self.max_integer_root
        return m is None or m <= 3

    @property
    def nonzero_above_3(self) -> bool:
        return all(v != 0 for r, v in self.values.items() if r > 3)

    def to_json(self) -> dict:
        return {
            "variant": self.variant,
            "polynomial": str(self.polynomial),
            "degree": self.degree,
            "rational_roots": [str(r) for r in self.rational_roots],
            "values": {str(r): rational_str(v) for r, v in sorted(self.values.items())},
            "value_at_3": rational_str(self.value_at_3),
            "no_integer_root_above_3": self.no_integer_root_above_3,
        }


def determinant_polynomial_roots(
    rho_values: Sequence[int] = range(2, 13), variant: str = "display"
) -> DeterminantReport:
    """Determinant in ``rho``, its rational roots and exact values at integers."""
    sym = warhurst_matrix("rho", variant)
    r = sym.rho
    det = sym.determinant()
    poly = sympy.Poly(sympy.expand(det), r)
    roots = sorted(x for x in sympy.roots(poly, filter="Q") if x.is_rational)
    values = {int(v): determinant(warhurst_matrix(int(v), variant).matrix6) for v in rho_values}
    at3 = determinant(warhurst_matrix(3, variant).matrix6)
    return DeterminantReport(variant, det, poly.degree(), roots, values, at3)


# -- reports -----------------------------------------------------------------

@dataclass
class RigidityReport:
    case: str  # "full-model" or "crdim1"
    n: int
    rho: int
    k: int
    tanaka_dims: List[int]
    tanaka_g1_dim: Optional[int]
    autcr_weights: List[int]
    autcr_dims: List[int]
    autcr_methods: List[str]
    autcr_positive_dims: List[int]
    dimension_bound_holds: Optional[bool]
    determinant_value: Optional[Rational]
    verdict: str
    routes_agree: Optional[bool]
    max_weight: int
    labels: List[str] = field(default_factory=list)
    contrast: bool = False

    @property
    def g0_tanaka(self) -> Optional[int]:
        return self.tanaka_dims[0] if self.tanaka_dims else None

    @property
    def g0_autcr(self) -> Optional[int]:
        for w, d in zip(self.autcr_weights, self.autcr_dims):
            if w == 0:
                return d
        return None

    @property
    def ok(self) -> bool:
        """Verified as expected: rigid, or non-rigid for a requested contrast case."""
        if self.contrast:
            return self.verdict == NOT_RIGID and bool(self.routes_agree)
        return self.verdict == RIGID

    def to_json(self) -> dict:
        return {
            "case": self.case,
            "n": self.n,
            "rho": self.rho,
            "k": self.k,
            "tanaka_dims_nonnegative": self.tanaka_dims,
            "tanaka_g1_dim": self.tanaka_g1_dim,
            "autcr_weights": self.autcr_weights,
            "autcr_dims": self.autcr_dims,
            "autcr_methods": self.autcr_methods,
            "autcr_positive_dims": self.autcr_positive_dims,
            "dimension_bound_holds": self.dimension_bound_holds,
            "determinant_value": None if self.determinant_value is None else rational_str(self.determinant_value),
            "verdict": self.verdict,
            "routes_agree": self.routes_agree,
            "max_weight": self.max_weight,
            "labels": self.labels,
            "contrast": self.contrast,
        }


def _g1(pr: ProlongationResult) -> Optional[int]:
    if len(pr.components) > 1:
        return pr.components[1].dim
    return 0 if pr.terminated_at == 0 else None


def _verdict(g1: Optional[int], aut: Optional[AutSummary]) -> tuple:
    tanaka_rigid = None if g1 is None else g1 == 0
    aut_rigid = None if aut is None else aut.rigidity
    if tanaka_rigid is False or aut_rigid is False:
        verdict = NOT_RIGID
    elif tanaka_rigid and aut_rigid:
        verdict = RIGID
    else:
        verdict = INCONCLUSIVE
    agree = None if tanaka_rigid is None or aut_rigid is None else tanaka_rigid == aut_rigid
    return verdict, agree


def _aut_fields(aut: Optional[AutSummary]):
    if aut is None:
        return [], [], [], []
    return aut.weights, aut.dims, [c.method for c in aut.components], aut.positive_dims


def _det_at(rho: int) -> Optional[Rational]:
    return determinant(warhurst_matrix(rho).matrix6) if rho >= 2 else None


def verify_full_model(
    n: int,
    rho: int,
    max_weight: Optional[int] = None,
    budget: Optional[int] = None,
    contrast: bool = False,
    infer_after_zero: bool = False,
) -> RigidityReport:
    """Both routes for the full model of CR dimension ``n`` and length ``rho``.

    ``rho = 2`` (the hyperquadric family) is accepted only as an explicit
    contrast case, where non-rigidity is the expected outcome.
    """
    if n < 1:
        raise ValueError("n must be positive")
    if rho < 3 and not (contrast and rho == 2):
        raise ValueError("rho must be at least 3 (rho = 2 only as a contrast case)")
    W = rho + 2 if max_weight is None else max_weight
    labels: List[str] = []
    if rho == 3:
        labels.append("rho = 3: computational, not from the 6x6 argument")
    if contrast:
        labels.append("contrast case: non-rigidity expected")

    F = free_cr_algebra(n, rho, budget=budget)
    k = sum(F.k[1:])
    tanaka_dims: List[int] = []
    g1 = None
    try:
        pr = levi_tanaka(F.algebra, F.J, max_degree=max(W, 1), budget=budget)
        tanaka_dims, g1 = pr.dims_nonnegative, _g1(pr)
        if pr.budget_reached:
            labels.append("tanaka: budget reached")
    except BudgetExceeded as exc:
        labels.append(f"tanaka: {exc}")

    coords = assign_weights(n, k, budget)
    model = model_equations(coords)
    aut: Optional[AutSummary] = None
    try:
        aut = aut_summary(model, W, budget, infer_after_zero=infer_after_zero)
    except BudgetExceeded as exc:
        labels.append(f"aut: {exc}")
    if aut is not None:
        labels.insert(0, aut.label)
        if "inferred" in [c.method for c in aut.components]:
            labels.append("higher weights inferred from a zero positive component")

    verdict, agree = _verdict(g1, aut)
    bound = None
    if aut is not None:
        bound = aut.total_dimension <= F.algebra.dim + 2 * n * n
    ws, ds, ms, pos = _aut_fields(aut)
    return RigidityReport(
        "full-model", n, rho, k, tanaka_dims, g1, ws, ds, ms, pos,
        bound, _det_at(rho), verdict, agree, W, labels, contrast,
    )


@dataclass
class CRDimOneReport:
    """The free rank-2 prolongation plus one report per codimension of length ``rho``."""

    rho: int
    free_tanaka_dims: List[int]
    cases: List[RigidityReport]

    @property
    def verdict(self) -> str:
        vs = {c.verdict for c in self.cases}
        if NOT_RIGID in vs or (self.free_tanaka_dims and len(self.free_tanaka_dims) > 1 and self.free_tanaka_dims[1]):
            return NOT_RIGID
        if vs == {RIGID}:
            return RIGID
        return INCONCLUSIVE

    @property
    def ok(self) -> bool:
        return self.verdict == RIGID

    def to_json(self) -> dict:
        return {
            "case": "crdim1",
            "rho": self.rho,
            "free_tanaka_dims_nonnegative": self.free_tanaka_dims,
            "verdict": self.verdict,
            "models": [c.to_json() for c in self.cases],
        }


def codimensions_of_length(n: int, rho: int) -> List[int]:
    dims = free_cr_dims(n, rho)
    lo = sum(dims[1:-1])
    return list(range(lo + 1, sum(dims[1:]) + 1))


def verify_cr_dim_one(
    rho: int,
    max_weight: Optional[int] = None,
    budget: Optional[int] = None,
    infer_after_zero: bool = False,
) -> CRDimOneReport:
    """Every model of CR dimension one and length ``rho`` (identity matrices)."""
    if rho < 3:
        raise ValueError("rho must be at least 3")
    W = rho + 2 if max_weight is None else max_weight
    F = free_cr_algebra(1, rho, budget=budget)
    free_pr = levi_tanaka(F.algebra, F.J, max_degree=max(W, 1), budget=budget)
    cases = []
    for k in codimensions_of_length(1, rho):
        model = model_equations(assign_weights(1, k, budget))
        labels: List[str] = []
        sym, J = symbol_algebra(model)
        pr = levi_tanaka(sym, J, max_degree=max(W, 1), budget=budget)
        g1 = _g1(pr)
        aut = None
        try:
            aut = aut_summary(model, W, budget, infer_after_zero=infer_after_zero)
        except BudgetExceeded as exc:
            labels.append(f"aut: {exc}")
        if aut is not None:
            labels.insert(0, aut.label)
            if "inferred" in [c.method for c in aut.components]:
                labels.append("higher weights inferred from a zero positive component")
        verdict, agree = _verdict(g1, aut)
        if pr.dims_nonnegative[0] > 2:
            labels.append("unexpected: dim g0 exceeds 2")
        ws, ds, ms, pos = _aut_fields(aut)
        bound = None if aut is None else aut.total_dimension <= sym.dim + 2
        cases.append(RigidityReport(
            "crdim1", 1, rho, k, pr.dims_nonnegative, g1, ws, ds, ms, pos,
            bound, None, verdict, agree, W, labels,
        ))
    return CRDimOneReport(rho, free_pr.dims_nonnegative, cases)


# -- tables ------------------------------------------------------------------

_COLUMNS = ["case", "n", "rho", "k", "g0_tanaka", "g1_tanaka", "g0_aut", "positive_aut", "bound", "agree", "verdict"]


def _row(r: RigidityReport) -> List[str]:
    def s(x):
        return "-" if x is None else str(x)

    return [
        r.case, str(r.n), str(r.rho), str(r.k), s(r.g0_tanaka), s(r.tanaka_g1_dim), s(r.g0_autcr),
        " ".join(map(str, r.autcr_positive_dims)) or "-", s(r.dimension_bound_holds), s(r.routes_agree), r.verdict,
    ]


def report_table(reports: Sequence[RigidityReport], fmt: str = "text") -> str:
    """Aggregate table of reports, as aligned text or CSV."""
    rows = [_row(r) for r in reports]
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(_COLUMNS)
        w.writerows(rows)
        return buf.getvalue()
    if fmt != "text":
        raise ValueError(f"unknown table format {fmt!r}")
    widths = [max(len(c), *(len(r[i]) for r in rows)) if rows else len(c) for i, c in enumerate(_COLUMNS)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(_COLUMNS, widths)).rstrip()]
    for r in rows:
        lines.append("  ".join(x.ljust(w) for x, w in zip(r, widths)).rstrip())
    return "\n".join(lines) + "\n"
