"""Command line interface.

Subcommands ``gen``, ``symbol``, ``prolong``, ``autcr`` and
``verify {full,crdim1,warhurst}``.  Exit codes: 0 success, 1 a
mathematical check failed, 2 usage error, 3 size budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Dict, List, Optional, Sequence

from .aut_cr import aut_summary
from .cr_structures import free_cr_algebra, is_totally_nondegenerate_symbol
from .errors import BUDGET_ENV, ConsistencyError, ResourceError
from .exact_linalg import Matrix, Q, rational_str
from .graded_lie import GradedLieAlgebra, check_axioms
from .models import ModelEquations, assign_weights, check_total_nondegeneracy, model_equations, symbol_algebra
from .rigidity import (
    determinant_polynomial_roots,
    report_table,
    verify_cr_dim_one,
    verify_full_model,
    warhurst_matrix,
)
from .tanaka import levi_tanaka

SCHEMA = 1

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_BUDGET = 3


class UsageError(Exception):
    pass


def parse_range(text: str) -> List[int]:
    """``"3"``, ``"3..5"`` or ``"1,3..4"`` to a sorted list of ints."""
    out = set()
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                a, b = part.split("..", 1)
                lo, hi = int(a), int(b)
                if lo > hi:
                    raise UsageError(f"empty range {part!r}")
                out.update(range(lo, hi + 1))
            else:
                out.add(int(part))
    except ValueError:
        raise UsageError(f"bad range {text!r}") from None
    return sorted(out)


def load_matrices(path: str) -> Dict[int, Matrix]:
    """JSON object mapping weight to a list of rows (ints or ``"p/q"`` strings)."""
    try:
        with open(path) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("expected an object keyed by weight")
        return {int(w): Matrix.from_dense([[Q(x) for x in row] for row in rows]) for w, rows in data.items()}
    except (OSError, ValueError, TypeError, ZeroDivisionError) as exc:
        raise UsageError(f"invalid matrix file {path}: {exc}") from None


def _emit(args, text: str) -> None:
    if not text.endswith("\n"):
        text += "\n"
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps({"schema": SCHEMA, **obj}, indent=2)


def _require(args, *names: str) -> None:
    for name in names:
        if getattr(args, name) is None:
            raise UsageError(f"--{name.replace('_', '-')} is required")
    if getattr(args, "n", None) is not None and args.n < 1:
        raise UsageError("--n must be positive")
    if getattr(args, "k", None) is not None and args.k < 1:
        raise UsageError("--k must be positive")


def _model(args) -> ModelEquations:
    _require(args, "n", "k")
    if args.seed is not None and args.matrix_file:
        raise UsageError("--seed and --matrix-file are exclusive")
    coords = assign_weights(args.n, args.k, args.budget)
    matrices = load_matrices(args.matrix_file) if args.matrix_file else None
    try:
        return model_equations(coords, matrices, args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _algebra_text(a: GradedLieAlgebra) -> str:
    lines = [f"dims: {' '.join(str(a.dim_of(-d)) for d in range(1, a.length + 1))}"]
    for (i, j), v in sorted(a.brackets.items()):
        rhs = " + ".join(f"{rational_str(c)}*{a.labels[k]}" for k, c in sorted(v.items()))
        lines.append(f"[{a.labels[i]}, {a.labels[j]}] = {rhs}")
    return "\n".join(lines)


# -- subcommands --------------------------------------------------------------

def cmd_gen(args) -> int:
    model = _model(args)
    if args.format == "json":
        _emit(args, _json({"model": model.to_json()}))
    elif args.format == "latex":
        _emit(args, model.to_latex())
    else:
        _emit(args, model.to_text())
    return EXIT_OK


def cmd_symbol(args) -> int:
    if args.k is not None:
        model = _model(args)
        filt = check_total_nondegeneracy(model)
        if not filt:
            _emit(args, _json({"filtration": filt.to_json()}) if args.format == "json" else
                  f"not totally nondegenerate: filtration {filt.dims}, expected {filt.expected}")
            return EXIT_FAILED
        alg, J = symbol_algebra(model)
        rho = model.rho
    else:
        _require(args, "n", "rho")
        F = free_cr_algebra(args.n, args.rho, budget=args.budget)
        alg, J, filt, rho = F.algebra, F.J, None, args.rho
    axioms = check_axioms(alg)
    nondeg = is_totally_nondegenerate_symbol(alg, J) if rho >= 2 else None
    if args.format == "json":
        out = {"algebra": alg.to_json(), "J": J.to_json(), "axioms": axioms.to_json()}
        if filt is not None:
            out["filtration"] = filt.to_json()
        if nondeg is not None:
            out["nondegeneracy"] = nondeg.to_json()
        _emit(args, _json(out))
    else:
        text = _algebra_text(alg)
        text += f"\nlie: {axioms.is_lie}  fundamental: {axioms.is_fundamental}"
        if nondeg is not None:
            text += f"  totally nondegenerate: {nondeg.totally_nondegenerate}"
        _emit(args, text)
    return EXIT_OK if axioms.is_lie and axioms.is_fundamental else EXIT_FAILED


def cmd_prolong(args) -> int:
    if args.k is not None:
        alg, J = symbol_algebra(_model(args))
    else:
        _require(args, "n", "rho")
        F = free_cr_algebra(args.n, args.rho, budget=args.budget)
        alg, J = F.algebra, F.J
    if args.no_j:
        J = None
    pr = levi_tanaka(alg, J, max_degree=args.max_degree, budget=args.budget)
    if args.format == "json":
        _emit(args, _json({"prolongation": pr.to_json(derivations=args.derivations)}))
    else:
        lines = [
            f"dims negative: {' '.join(map(str, pr.dims_negative))}",
            f"dims nonnegative: {' '.join(map(str, pr.dims_nonnegative))}",
            f"terminated at: {'-' if pr.terminated_at is None else pr.terminated_at}",
            f"transitive: {pr.transitive}",
        ]
        if pr.budget_reached:
            lines.append("budget reached")
        _emit(args, "\n".join(lines))
    return EXIT_OK


def cmd_autcr(args) -> int:
    model = _model(args)
    s = aut_summary(model, args.max_weight, args.budget, infer_after_zero=args.infer_after_zero)
    if args.format == "json":
        out = s.to_json()
        if args.fields:
            out["components"] = [c.to_json(fields=True) for c in s.components]
        _emit(args, _json({"autcr": out}))
    elif args.format == "latex":
        lines = []
        for c in s.components:
            lines.append(rf"% weight {c.weight}: dim {c.dimension} ({c.method})")
            lines.extend(f.latex() for f in c.basis)
        _emit(args, "\n".join(lines))
    else:
        lines = ["weight  dim  method"]
        for c in s.components:
            lines.append(f"{c.weight:>6}  {c.dimension:>3}  {c.method}")
            if args.fields:
                lines.extend(f"    {f.text()}" for f in c.basis)
        lines.append(f"total: {s.total_dimension}")
        lines.append(f"rigidity: {s.rigidity} ({s.label})")
        _emit(args, "\n".join(lines))
    return EXIT_OK


def _verify_full(args) -> int:
    ns = parse_range(args.n or "1")
    rhos = parse_range(args.rho or "3")
    for r in rhos:
        if r < 3 and not (r == 2 and args.contrast):
            raise UsageError("rho must be at least 3 (pass --contrast to include rho = 2)")
    reports = [
        verify_full_model(n, r, args.max_weight, args.budget, contrast=(r == 2), infer_after_zero=args.infer_after_zero)
        for n in ns for r in rhos
    ]
    ok = all(r.ok for r in reports)
    if args.format == "json":
        _emit(args, _json({"reports": [r.to_json() for r in reports], "ok": ok}))
    else:
        _emit(args, report_table(reports, "csv" if args.format == "csv" else "text"))
    return EXIT_OK if ok else EXIT_FAILED


def _verify_crdim1(args) -> int:
    rhos = parse_range(args.rho or "3")
    if min(rhos) < 3:
        raise UsageError("rho must be at least 3")
    groups = [verify_cr_dim_one(r, args.max_weight, args.budget, infer_after_zero=args.infer_after_zero) for r in rhos]
    ok = all(g.ok for g in groups)
    if args.format == "json":
        _emit(args, _json({"reports": [g.to_json() for g in groups], "ok": ok}))
    else:
        cases = [c for g in groups for c in g.cases]
        text = report_table(cases, "csv" if args.format == "csv" else "text")
        if args.format == "text":
            text += "".join(f"rho {g.rho}: free prolongation {g.free_tanaka_dims}, {g.verdict}\n" for g in groups)
        _emit(args, text)
    return EXIT_OK if ok else EXIT_FAILED


def _verify_warhurst(args) -> int:
    rhos = parse_range(args.rho or "4..12")
    if min(rhos) < 2:
        raise UsageError("rho must be at least 2")
    rep = determinant_polynomial_roots(rhos)
    ok = rep.nonzero_above_3 and rep.no_integer_root_above_3
    if args.format == "json":
        out = rep.to_json()
        out["matrices"] = {str(r): warhurst_matrix(r).to_json()["matrix"] for r in rhos}
        _emit(args, _json({"warhurst": out, "ok": ok}))
    elif args.format == "latex":
        import sympy

        lines = [rf"\det = {sympy.latex(rep.polynomial)}"]
        lines += [rf"\rho = {r}: \det = {rational_str(v)}" for r, v in sorted(rep.values.items())]
        _emit(args, "\n".join(lines))
    else:
        lines = [f"determinant: {rep.polynomial}", f"rational roots: {', '.join(map(str, rep.rational_roots))}"]
        lines += [f"rho {r}: {rational_str(v)}" for r, v in sorted(rep.values.items())]
        lines.append(f"value at rho 3: {rational_str(rep.value_at_3)}")
        lines.append(f"nonzero for every rho > 3 checked: {rep.nonzero_above_3}")
        _emit(args, "\n".join(lines))
    return EXIT_OK if ok else EXIT_FAILED


def cmd_verify(args) -> int:
    return {"full": _verify_full, "crdim1": _verify_crdim1, "warhurst": _verify_warhurst}[args.target](args)


# -- parser -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="crrigidity",
        description="Beloshapka models, Tanaka prolongations and CR automorphisms in exact arithmetic.",
        epilog=f"The size budget can also be set with the {BUDGET_ENV} environment variable.",
    )
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, formats=("json", "latex", "text")):
        sp.add_argument("--format", choices=formats, default="text")
        sp.add_argument("--budget", type=int, default=None, help="size budget (algebra dimension / unknowns)")
        sp.add_argument("--output", default=None, help="write to this file instead of stdout")

    def model_opts(sp):
        sp.add_argument("--n", type=int, help="CR dimension")
        sp.add_argument("--k", type=int, help="codimension")
        sp.add_argument("--seed", type=int, default=None, help="random full-rank matrices from this seed")
        sp.add_argument("--matrix-file", default=None, help="JSON object: weight -> rows")

    g = sub.add_parser("gen", help="defining equations of a model")
    model_opts(g)
    common(g)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("symbol", help="symbol algebra of a model, or a free CR algebra with --rho")
    model_opts(s)
    s.add_argument("--rho", type=int, help="length (free CR algebra)")
    common(s, ("json", "text"))
    s.set_defaults(func=cmd_symbol)

    pr = sub.add_parser("prolong", help="Levi-Tanaka prolongation")
    model_opts(pr)
    pr.add_argument("--rho", type=int, help="length (free CR algebra)")
    pr.add_argument("--max-degree", type=int, default=3)
    pr.add_argument("--no-j", action="store_true", help="plain Tanaka prolongation, ignoring J")
    pr.add_argument("--derivations", action="store_true", help="include derivation bases in JSON")
    common(pr, ("json", "text"))
    pr.set_defaults(func=cmd_prolong)

    a = sub.add_parser("autcr", help="graded infinitesimal CR automorphisms of a model")
    model_opts(a)
    a.add_argument("--max-weight", type=int, default=None, help="default rho + 2")
    a.add_argument("--fields", action="store_true", help="list basis fields")
    a.add_argument("--infer-after-zero", action="store_true", help="skip weights above a zero positive component")
    common(a)
    a.set_defaults(func=cmd_autcr)

    v = sub.add_parser("verify", help="rigidity verification grids")
    v.add_argument("target", choices=["full", "crdim1", "warhurst"])
    v.add_argument("--n", default=None, help="CR dimension or range, e.g. 1..2")
    v.add_argument("--rho", default=None, help="length or range, e.g. 3..5")
    v.add_argument("--max-weight", type=int, default=None, help="default rho + 2")
    v.add_argument("--contrast", action="store_true", help="allow rho = 2, where non-rigidity is expected")
    v.add_argument("--infer-after-zero", action="store_true")
    common(v, ("json", "latex", "text", "csv"))
    v.set_defaults(func=cmd_verify)
    return p


def _validate(args) -> None:
    if getattr(args, "max_degree", None) is not None and args.max_degree < 0:
        raise UsageError("--max-degree must be nonnegative")
    if getattr(args, "max_weight", None) is not None and args.max_weight < 0:
        raise UsageError("--max-weight must be nonnegative")
    if args.budget is not None and args.budget < 1:
        raise UsageError("--budget must be positive")
    if getattr(args, "rho", None) is not None and isinstance(args.rho, int) and args.rho < 1:
        raise UsageError("--rho must be positive")
    if args.command in ("symbol", "prolong") and args.k is not None and args.rho is not None:
        raise UsageError("give either --k or --rho, not both")
    if args.command == "verify" and args.target != "full" and args.n is not None:
        raise UsageError("--n only applies to 'verify full'")
    if args.command == "verify" and args.format == "latex" and args.target != "warhurst":
        raise UsageError("latex output is only available for 'verify warhurst'")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_USAGE
    try:
        _validate(args)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ResourceError as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except ConsistencyError as exc:
        print(f"consistency check failed: {exc}", file=sys.stderr)
        return EXIT_FAILED
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
