"""Independent reference implementations used only by the tests.

Everything here uses ``fractions.Fraction`` and plain loops, and shares no
code with the package's elimination, Hall basis or prolongation routines.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import product
from typing import Dict, List, Sequence


def lyndon_words(rank: int, length: int) -> List[tuple]:
    """All Lyndon words of the given length (Duval's generation algorithm)."""
    out = []
    w = [-1]
    while w:
        w[-1] += 1
        m = len(w)
        if m == length:
            out.append(tuple(w))
        while len(w) < length:
            w.append(w[len(w) - m])
        while w and w[-1] == rank - 1:
            w.pop()
    return out


def lyndon_count_bruteforce(rank: int, length: int) -> int:
    """Count words strictly smaller than all their proper rotations."""
    count = 0
    for w in product(range(rank), repeat=length):
        if all(w < w[i:] + w[:i] for i in range(1, length)):
            count += 1
    return count


def cofactor_det(m: Sequence[Sequence]) -> Fraction:
    """Laplace expansion along the first row."""
    m = [[Fraction(x) for x in row] for row in m]
    n = len(m)
    if n == 0:
        return Fraction(1)
    if n == 1:
        return m[0][0]
    total = Fraction(0)
    for j in range(n):
        if m[0][j]:
            minor = [row[:j] + row[j + 1:] for row in m[1:]]
            total += (-1) ** j * m[0][j] * cofactor_det(minor)
    return total


def fraction_rank(rows: List[Dict[int, Fraction]]) -> int:
    """Rank by textbook elimination on dict rows."""
    pivots: Dict[int, Dict[int, Fraction]] = {}
    for row in rows:
        r = {k: Fraction(v) for k, v in row.items() if v}
        while r:
            c = min(r)
            if c in pivots:
                f = r[c]
                for k, v in pivots[c].items():
                    r[k] = r.get(k, Fraction(0)) - f * v
                    if not r[k]:
                        del r[k]
            else:
                inv = 1 / r[c]
                pivots[c] = {k: v * inv for k, v in r.items()}
                break
    return len(pivots)


def fraction_nullspace(rows: List[Dict[int, Fraction]], ncols: int) -> List[Dict[int, Fraction]]:
    """Kernel basis via full reduction."""
    piv: Dict[int, Dict[int, Fraction]] = {}
    for row in rows:
        r = {k: Fraction(v) for k, v in row.items() if v}
        for c in sorted(piv):
            if c in r:
                f = r[c]
                for k, v in piv[c].items():
                    r[k] = r.get(k, Fraction(0)) - f * v
                    if not r[k]:
                        del r[k]
        if not r:
            continue
        c = min(r)
        inv = 1 / r[c]
        r = {k: v * inv for k, v in r.items()}
        for p in piv:
            if c in piv[p]:
                f = piv[p][c]
                for k, v in r.items():
                    piv[p][k] = piv[p].get(k, Fraction(0)) - f * v
                    if not piv[p][k]:
                        del piv[p][k]
        piv[c] = r
    basis = []
    for f in range(ncols):
        if f in piv:
            continue
        v = {f: Fraction(1)}
        for p, r in piv.items():
            if f in r:
                v[p] = -r[f]
        basis.append(v)
    return basis


# -- brute force derivations ---------------------------------------------------

def _table(alg):
    """Dense structure constants ``c[i][j] = {k: coeff}`` over Fractions."""
    n = alg.dim
    c = [[{} for _ in range(n)] for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j:
                c[i][j] = {k: Fraction(int(v.numerator), int(v.denominator)) for k, v in alg.bracket_basis(i, j).items()}
    return c


def _J_matrix(J, n_gens):
    out = []
    for i in range(n_gens):
        out.append({k: Fraction(int(v.numerator), int(v.denominator)) for k, v in J.image(i).items()})
    return out  # out[i] = J e_i as dict


def degree_zero_derivations(alg, J=None) -> List[List[Dict[int, Fraction]]]:
    """Degree-preserving derivations (unknowns on every degree block).

    Returns a basis; each element is a list ``D[i] = {k: coeff}`` giving the
    image of basis vector ``i``.  With ``J`` also imposes ``D J = J D`` on
    degree -1.
    """
    n = alg.dim
    deg = alg.basis_degree
    c = _table(alg)
    var = {}
    for i in range(n):
        for k in range(n):
            if deg[i] == deg[k]:
                var[(i, k)] = len(var)
    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            # D[e_i, e_j] - [D e_i, e_j] - [e_i, D e_j] = 0, coordinate t
            eqs: Dict[int, Dict[int, Fraction]] = {}
            for k, a in c[i][j].items():
                for t in range(n):
                    if (k, t) in var:
                        eqs.setdefault(t, {})
                        v = var[(k, t)]
                        eqs[t][v] = eqs[t].get(v, 0) + a
            for p in range(n):
                if (i, p) in var:
                    for t, a in c[p][j].items():
                        v = var[(i, p)]
                        eqs.setdefault(t, {})[v] = eqs.setdefault(t, {}).get(v, 0) - a
                if (j, p) in var:
                    for t, a in c[i][p].items():
                        v = var[(j, p)]
                        eqs.setdefault(t, {})[v] = eqs.setdefault(t, {}).get(v, 0) - a
            rows.extend(eqs.values())
    if J is not None:
        gens = [i for i in range(n) if deg[i] == -1]
        Jm = _J_matrix(J, len(gens))
        for i in range(len(gens)):
            # D(J e_i) - J(D e_i) = 0
            eqs = {}
            for p, a in Jm[i].items():
                for t in gens:
                    v = var[(gens[p], t)]
                    eqs.setdefault(t, {})[v] = eqs.setdefault(t, {}).get(v, 0) + a
            for p in range(len(gens)):
                v = var[(gens[i], gens[p])]
                for t, a in Jm[p].items():
                    eqs.setdefault(gens[t], {})[v] = eqs.setdefault(gens[t], {}).get(v, 0) - a
            rows.extend(eqs.values())
    basis = []
    for sol in fraction_nullspace(rows, len(var)):
        D = [dict() for _ in range(n)]
        for (i, k), v in var.items():
            if v in sol:
                D[i][k] = sol[v]
        basis.append(D)
    return basis


def degree_one_dimension(alg, J=None) -> int:
    """Dimension of the first prolongation by brute force.

    Unknowns: ``D e_i`` in ``g^0`` for degree -1 generators and in
    ``m_{d+1}`` for degree ``d <= -2``.  Leibniz is imposed on every pair of
    basis vectors, with ``g^0`` acting by its derivations.
    """
    n = alg.dim
    deg = alg.basis_degree
    c = _table(alg)
    g0 = degree_zero_derivations(alg, J)
    var = {}
    for i in range(n):
        if deg[i] == -1:
            for a in range(len(g0)):
                var[(i, "g0", a)] = len(var)
        else:
            for k in range(n):
                if deg[k] == deg[i] + 1:
                    var[(i, k)] = len(var)

    def image_terms(i):
        """Yield (kind, index, var) describing D e_i."""
        if deg[i] == -1:
            for a in range(len(g0)):
                yield "g0", a, var[(i, "g0", a)]
        else:
            for k in range(n):
                if (i, k) in var:
                    yield "m", k, var[(i, k)]

    rows = []
    for i in range(n):
        for j in range(i + 1, n):
            eqs: Dict[int, Dict[int, Fraction]] = {}

            def add(t, v, a):
                row = eqs.setdefault(t, {})
                row[v] = row.get(v, 0) + a

            for k, a in c[i][j].items():
                for kind, idx, v in image_terms(k):
                    if kind == "m":
                        add(idx, v, a)
                    else:  # D of a degree -1 element lands in g^0; keep a separate coordinate
                        add(("g0", idx), v, a)
            for kind, idx, v in image_terms(i):
                # - [D e_i, e_j]
                if kind == "m":
                    for t, a in c[idx][j].items():
                        add(t, v, -a)
                else:
                    for t, a in g0[idx][j].items():
                        add(t, v, -a)
            for kind, idx, v in image_terms(j):
                # - [e_i, D e_j]
                if kind == "m":
                    for t, a in c[i][idx].items():
                        add(t, v, -a)
                else:
                    for t, a in g0[idx][i].items():
                        add(t, v, a)
            rows.extend(eqs.values())
    return len(var) - fraction_rank(rows)


# -- infinitesimal automorphisms by symbolic expansion ---------------------------

def sympy_aut_dimension(phis, w_weights, weight):
    """Dimension of weight-``weight`` holomorphic fields tangent to ``Im w = Phi``, CR dimension one.

    ``phis`` are sympy expressions in real symbols ``x, y`` (``z = x + i y``)
    and ``u1, u2, ...``.  Unknown coefficients are real symbols; the
    tangency identity is expanded and every coefficient set to zero.
    """
    import sympy as sp

    x, y = sp.symbols("x y", real=True)
    k = len(w_weights)
    us = sp.symbols(" ".join(f"u{l + 1}" for l in range(k)), real=True, seq=True)
    z = x + sp.I * y
    ws = [us[l] + sp.I * phis[l] for l in range(k)]
    weights = [1] + list(w_weights)
    unknowns = []

    def holo(target):
        expr = 0
        for exps in _exps(weights, target):
            a, b = sp.symbols(f"a{len(unknowns)} b{len(unknowns)}", real=True)
            unknowns.extend([a, b])
            mono = z ** exps[0]
            for l in range(k):
                mono *= ws[l] ** exps[l + 1]
            expr += (a + sp.I * b) * mono
        return sp.expand(expr)

    Z = holo(weight + 1)
    W = [holo(weight + w) for w in w_weights]
    eqs = []
    for l in range(k):
        phi = phis[l]
        dphi_dz = (sp.diff(phi, x) - sp.I * sp.diff(phi, y)) / 2
        expr = sp.im(W[l]) - 2 * sp.re(sp.expand(Z * dphi_dz))
        for m in range(k):
            expr -= sp.re(W[m]) * sp.diff(phi, us[m])
        expr = sp.expand(sp.expand_complex(expr))
        poly = sp.Poly(expr, x, y, *us)
        eqs.extend(poly.coeffs())
    if not unknowns:
        return 0
    if not eqs:
        return len(unknowns)
    A, _ = sp.linear_eq_to_matrix(eqs, unknowns)
    return len(unknowns) - A.rank()


def _exps(weights, total):
    if not weights:
        if total == 0:
            yield ()
        return
    w = weights[0]
    for e in range(total // w, -1, -1):
        for rest in _exps(weights[1:], total - e * w):
            yield (e,) + rest
