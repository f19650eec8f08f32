"""Polynomials with coefficients in Q(i).

A polynomial is a dict from keys ``(iflag, e_0, ..., e_{N-1})`` to rationals:
the term ``c * i**iflag * x^e``.  Keeping the imaginary unit in the key lets
every coefficient stay an exact rational, and putting it first means a ring
with more trailing variables accepts old keys after zero padding.

Two kinds of ring are used.  The intrinsic ring of a model has variables
``z_1..z_n, zb_1..zb_n, u_1..u_k`` (``zb`` is the conjugate of ``z`` and
``u`` the real part of ``w``); the holomorphic ring has ``z_1..z_n,
w_1..w_k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, List, Sequence, Tuple

from .exact_linalg import ONE, ZERO, Q, Rational, rational_str

Key = Tuple[int, ...]
Poly = Dict[Key, Rational]

HALF = Q(1, 2)


@dataclass(frozen=True)
class Ring:
    """Intrinsic ring ``(z, zb, u)`` with weights ``[z] = 1`` and given ``[u]``."""

    n: int
    u_weights: Tuple[int, ...]

    @property
    def k(self) -> int:
        return len(self.u_weights)

    @property
    def nvars(self) -> int:
        return 2 * self.n + self.k

    @property
    def weights(self) -> Tuple[int, ...]:
        return (1,) * (2 * self.n) + tuple(self.u_weights)

    def z(self, i: int) -> int:
        return i

    def zb(self, i: int) -> int:
        return self.n + i

    def u(self, l: int) -> int:
        return 2 * self.n + l

    def var(self, idx: int, coeff=ONE) -> Poly:
        e = [0] * self.nvars
        e[idx] = 1
        return {(0, *e): Q(coeff)}

    def const(self, c) -> Poly:
        c = Q(c)
        return {(0,) + (0,) * self.nvars: c} if c else {}

    def weight(self, key: Key) -> int:
        return sum(e * w for e, w in zip(key[1:], self.weights))

    def pad(self, p: Poly, other: "Ring") -> Poly:
        """Move ``p`` from ``other`` (same ``n``, fewer u's) into this ring."""
        extra = self.nvars - other.nvars
        if extra < 0 or other.n != self.n:
            raise ValueError("rings are not compatible")
        z = (0,) * extra
        return {k + z: c for k, c in p.items()}

    def variable_names(self) -> List[str]:
        return (
            [f"z{i + 1}" for i in range(self.n)]
            + [f"zb{i + 1}" for i in range(self.n)]
            + [f"u{l + 1}" for l in range(self.k)]
        )


@dataclass(frozen=True)
class HoloRing:
    """Holomorphic ring ``(z, w)`` with ``[z] = 1`` and given ``[w]``."""

    n: int
    w_weights: Tuple[int, ...]

    @property
    def nvars(self) -> int:
        return self.n + len(self.w_weights)

    @property
    def weights(self) -> Tuple[int, ...]:
        return (1,) * self.n + tuple(self.w_weights)

    def monomials(self, weight: int) -> List[Tuple[int, ...]]:
        return list(exponents_of_weight(self.weights, weight))

    def variable_names(self) -> List[str]:
        return [f"z{i + 1}" for i in range(self.n)] + [f"w{l + 1}" for l in range(len(self.w_weights))]


def exponents_of_weight(weights: Sequence[int], total: int) -> Iterator[Tuple[int, ...]]:
    """All exponent vectors ``e`` with ``sum e_i w_i == total``, in lex order."""
    n = len(weights)

    def rec(i: int, left: int):
        if i == n:
            if left == 0:
                yield ()
            return
        w = weights[i]
        top = left // w if w > 0 else 0
        for e in range(top, -1, -1):
            for rest in rec(i + 1, left - e * w):
                yield (e,) + rest

    if total < 0:
        return iter(())
    return rec(0, total)


# -- arithmetic -------------------------------------------------------------

def padd(target: Poly, p: Poly, coeff=ONE) -> Poly:
    """In place ``target += coeff * p``."""
    if not coeff:
        return target
    for k, c in p.items():
        v = target.get(k, ZERO) + coeff * c
        if v:
            target[k] = v
        else:
            target.pop(k, None)
    return target


def psum(*ps: Poly) -> Poly:
    out: Poly = {}
    for p in ps:
        padd(out, p)
    return out


def pscale(p: Poly, c) -> Poly:
    c = Q(c)
    if not c:
        return {}
    return {k: v * c for k, v in p.items()}


def ptimes_i(p: Poly) -> Poly:
    """``i * p``."""
    out = {}
    for k, c in p.items():
        if k[0]:
            out[(0,) + k[1:]] = -c
        else:
            out[(1,) + k[1:]] = c
    return out


def pmul(p: Poly, q: Poly) -> Poly:
    out: Poly = {}
    get = out.get
    for k1, c1 in p.items():
        f1 = k1[0]
        e1 = k1[1:]
        for k2, c2 in q.items():
            f = f1 + k2[0]
            c = c1 * c2
            if f == 2:
                f = 0
                c = -c
            key = (f, *[a + b for a, b in zip(e1, k2[1:])])
            v = get(key, ZERO) + c
            if v:
                out[key] = v
            else:
                del out[key]
    return out


def ppow(p: Poly, e: int, ring_nvars: int) -> Poly:
    out: Poly = {(0,) + (0,) * ring_nvars: ONE}
    for _ in range(e):
        out = pmul(out, p)
    return out


def pdiff(p: Poly, var: int) -> Poly:
    """Derivative with respect to variable index ``var`` (z and zb independent)."""
    out: Poly = {}
    pos = var + 1
    for k, c in p.items():
        e = k[pos]
        if e:
            nk = k[:pos] + (e - 1,) + k[pos + 1:]
            out[nk] = c * e
    return out


def conj_key(ring: Ring, key: Key) -> Key:
    n = ring.n
    e = key[1:]
    return (key[0], *e[n:2 * n], *e[:n], *e[2 * n:])


def pconj(ring: Ring, p: Poly) -> Poly:
    out = {}
    for k, c in p.items():
        out[conj_key(ring, k)] = -c if k[0] else c
    return out


def preal(ring: Ring, p: Poly) -> Poly:
    """``(p + conj p) / 2``."""
    return pscale(psum(p, pconj(ring, p)), HALF)


def pimag(ring: Ring, p: Poly) -> Poly:
    """``(p - conj p) / (2i)``."""
    d = padd(dict(p), pconj(ring, p), -ONE)
    return pscale(ptimes_i(d), -HALF)


def is_real(ring: Ring, p: Poly) -> bool:
    return pconj(ring, p) == p


def constant_term(p: Poly, nvars: int) -> Tuple[Rational, Rational]:
    z = (0,) * nvars
    return p.get((0, *z), ZERO), p.get((1, *z), ZERO)


def is_homogeneous(ring: Ring, p: Poly, weight: int) -> bool:
    return all(ring.weight(k) == weight for k in p)


# -- real monomial basis ----------------------------------------------------

@dataclass(frozen=True)
class RealMonomial:
    """``Re m``, ``Im m`` or a self-conjugate ``m`` for a monomial ``m`` of the intrinsic ring.

    ``exps`` follows the ring's variable order (z, zb, u).
    """

    kind: str  # "re", "im" or "self"
    exps: Tuple[int, ...]

    def poly(self, ring: Ring) -> Poly:
        p = {(0, *self.exps): ONE}
        if self.kind == "self":
            return p
        if self.kind == "re":
            return preal(ring, p)
        return pimag(ring, p)

    def text(self, ring: Ring) -> str:
        m = monomial_text(ring, self.exps)
        return m if self.kind == "self" else f"{self.kind.capitalize()}({m})"

    def latex(self, ring: Ring) -> str:
        m = monomial_latex(ring, self.exps)
        if self.kind == "self":
            return m
        op = r"\operatorname{Re}" if self.kind == "re" else r"\operatorname{Im}"
        return rf"{op}\left({m}\right)"

    def to_json(self) -> dict:
        return {"kind": self.kind, "exps": list(self.exps)}


def real_monomial_basis(ring: Ring, weight: int, max_u_weight: int) -> List[RealMonomial]:
    """Real basis of weight-``weight`` polynomials using only u's of weight ``<= max_u_weight``."""
    n = ring.n
    ws = list(ring.weights)
    allowed = [i for i in range(ring.nvars) if i < 2 * n or ws[i] <= max_u_weight]
    sub = [ws[i] for i in allowed]
    out = []
    for e in exponents_of_weight(sub, weight):
        full = [0] * ring.nvars
        for i, v in zip(allowed, e):
            full[i] = v
        full = tuple(full)
        a, b = full[:n], full[n:2 * n]
        if a == b:
            out.append(RealMonomial("self", full))
        elif a > b:
            # canonical representative: the z-part exceeds the zb-part in lex order
            out.append(RealMonomial("re", full))
            out.append(RealMonomial("im", full))
    return out


def _power_str(name: str, e: int, latex: bool) -> str:
    if e == 1:
        return name
    return f"{name}^{{{e}}}" if latex else f"{name}^{e}"


def monomial_text(ring: Ring, exps: Sequence[int]) -> str:
    names = ring.variable_names()
    parts = [_power_str(names[i], e, False) for i, e in enumerate(exps) if e]
    return "*".join(parts) if parts else "1"


def monomial_latex(ring: Ring, exps: Sequence[int]) -> str:
    n = ring.n
    parts = []
    for i, e in enumerate(exps):
        if not e:
            continue
        if i < n:
            name = f"z_{{{i + 1}}}"
        elif i < 2 * n:
            name = rf"\overline{{z}}_{{{i - n + 1}}}"
        else:
            name = f"u_{{{i - 2 * n + 1}}}"
        parts.append(_power_str(name, e, True))
    return " ".join(parts) if parts else "1"


def poly_text(ring: Ring, p: Poly) -> str:
    if not p:
        return "0"
    terms = []
    for k in sorted(p, key=lambda k: (k[1:], k[0])):
        c = p[k]
        coef = rational_str(c) + ("*i" if k[0] else "")
        terms.append(f"({coef})*{monomial_text(ring, k[1:])}")
    return " + ".join(terms)
