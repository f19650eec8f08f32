"""Free nilpotent Lie algebras through a Hall basis.

A Hall word is either a generator index (``int``, 0-based) or a pair
``(left, right)`` of Hall words.  Words are ordered by degree first and then
recursively by ``(left, right)``; ``(a, b)`` is a Hall word when ``a < b`` and
either ``b`` is a generator or ``b = (u, v)`` with ``u <= a``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

from sympy import divisors, mobius

from .errors import BudgetExceeded, size_budget
from .exact_linalg import ONE, Rational, SparseVec, axpy
from .graded_lie import GradedLieAlgebra

HallWord = Union[int, Tuple["HallWord", "HallWord"]]
WordCombo = Dict[HallWord, Rational]


def degree(w: HallWord) -> int:
    if isinstance(w, int):
        return 1
    return _degree_pair(w)


@lru_cache(maxsize=None)
def _degree_pair(w) -> int:
    return degree(w[0]) + degree(w[1])


@lru_cache(maxsize=None)
def word_key(w: HallWord) -> tuple:
    if isinstance(w, int):
        return (1, w)
    return (degree(w), word_key(w[0]), word_key(w[1]))


def is_hall_pair(a: HallWord, b: HallWord) -> bool:
    if not word_key(a) < word_key(b):
        return False
    return isinstance(b, int) or word_key(b[0]) <= word_key(a)


def word_str(w: HallWord, names: Optional[Sequence[str]] = None) -> str:
    if isinstance(w, int):
        return names[w] if names else f"x{w + 1}"
    return f"[{word_str(w[0], names)},{word_str(w[1], names)}]"


def parse_word(text: str, names: Optional[Sequence[str]] = None):
    """Parse ``[x1,[x1,x2]]`` style text into a nested-tuple bracket expression."""
    text = text.replace(" ", "")
    lookup = {n: i for i, n in enumerate(names)} if names else None
    pos = 0

    def parse():
        nonlocal pos
        if text[pos] == "[":
            pos += 1
            left = parse()
            if text[pos] != ",":
                raise ValueError(f"expected ',' at {pos} in {text!r}")
            pos += 1
            right = parse()
            if text[pos] != "]":
                raise ValueError(f"expected ']' at {pos} in {text!r}")
            pos += 1
            return (left, right)
        end = pos
        while end < len(text) and text[end] not in ",]":
            end += 1
        token = text[pos:end]
        pos = end
        if lookup is not None:
            return lookup[token]
        if not token.startswith("x"):
            raise ValueError(f"bad generator {token!r}")
        return int(token[1:]) - 1

    out = parse()
    if pos != len(text):
        raise ValueError(f"trailing input in {text!r}")
    return out


def witt_dimension(rank: int, deg: int) -> int:
    """Necklace formula ``(1/d) sum_{e|d} mu(e) r^(d/e)``."""
    if rank < 1 or deg < 1:
        raise ValueError("rank and degree must be positive")
    total = sum(int(mobius(e)) * rank ** (deg // e) for e in divisors(deg))
    return total // deg


@dataclass
class HallBasis:
    rank: int
    length: int
    words_per_degree: List[List[HallWord]]
    names: Optional[List[str]] = None
    _index: Dict[HallWord, int] = field(default_factory=dict, repr=False)
    _memo: Dict[Tuple[HallWord, HallWord], WordCombo] = field(default_factory=dict, repr=False)

    def __post_init__(self):
        i = 0
        for words in self.words_per_degree:
            for w in words:
                self._index[w] = i
                i += 1

    @property
    def words(self) -> List[HallWord]:
        return [w for ws in self.words_per_degree for w in ws]

    @property
    def counts(self) -> List[int]:
        return [len(ws) for ws in self.words_per_degree]

    def index(self, w: HallWord) -> int:
        return self._index[w]

    def label(self, w: HallWord) -> str:
        return word_str(w, self.names)

    # -- rewriting ---------------------------------------------------------

    def bracket_words(self, a: HallWord, b: HallWord) -> WordCombo:
        """``[a, b]`` for Hall words, rewritten as a combination of Hall words."""
        if degree(a) + degree(b) > self.length or a == b:
            return {}
        key = (a, b)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        if word_key(a) > word_key(b):
            res = {w: -c for w, c in self.bracket_words(b, a).items()}
        elif is_hall_pair(a, b):
            res = {(a, b): ONE}
        else:
            # b = (u, v) with u > a:  [a,[u,v]] = [[a,u],v] + [u,[a,v]]
            u, v = b
            res = {}
            for w, c in self.bracket_words(a, u).items():
                _add_combo(res, c, self.bracket_words(w, v))
            for w, c in self.bracket_words(a, v).items():
                _add_combo(res, c, self.bracket_words(u, w))
        self._memo[key] = res
        return res

    def bracket_combos(self, x: WordCombo, y: WordCombo) -> WordCombo:
        out: WordCombo = {}
        for a, c in x.items():
            for b, d in y.items():
                _add_combo(out, c * d, self.bracket_words(a, b))
        return out

    def normal_form(self, expr) -> Tuple[WordCombo, bool]:
        """Rewrite a nested bracket of generators into Hall words.

        Returns ``(combination, overflow)``; ``overflow`` is set when the
        expression's degree exceeds the nilpotency length, in which case the
        combination is empty.
        """
        d = _expr_degree(expr)
        if d > self.length:
            return {}, True
        return self._nf(expr), False

    def _nf(self, expr) -> WordCombo:
        if isinstance(expr, int):
            if not 0 <= expr < self.rank:
                raise ValueError(f"generator {expr} outside rank {self.rank}")
            return {expr: ONE}
        left, right = expr
        return self.bracket_combos(self._nf(left), self._nf(right))

    def to_vector(self, combo: WordCombo) -> SparseVec:
        return {self._index[w]: c for w, c in combo.items() if c}


def _add_combo(out: WordCombo, c, combo: WordCombo) -> None:
    if not c:
        return
    for w, d in combo.items():
        nv = out.get(w, 0) + c * d
        if nv:
            out[w] = nv
        else:
            out.pop(w, None)


def _expr_degree(expr) -> int:
    if isinstance(expr, int):
        return 1
    return _expr_degree(expr[0]) + _expr_degree(expr[1])


def generate_hall_basis(
    rank: int, length: int, budget: Optional[int] = None, names: Optional[Sequence[str]] = None
) -> HallBasis:
    if rank < 1 or length < 1:
        raise ValueError("rank and length must be positive")
    budget = size_budget(budget)
    expected = sum(witt_dimension(rank, d) for d in range(1, length + 1))
    if expected > budget:
        raise BudgetExceeded(f"free algebra of rank {rank}, length {length} has dimension {expected} > budget {budget}")
    per: List[List[HallWord]] = [list(range(rank))]
    for d in range(2, length + 1):
        words = []
        for da in range(1, d):
            for a in per[da - 1]:
                for b in per[d - da - 1]:
                    if is_hall_pair(a, b):
                        words.append((a, b))
        words.sort(key=word_key)
        per.append(words)
    return HallBasis(rank, length, per, list(names) if names else None)


def free_nilpotent_algebra(
    rank: int, length: int, budget: Optional[int] = None, names: Optional[Sequence[str]] = None
) -> Tuple[GradedLieAlgebra, HallBasis]:
    """Free nilpotent algebra of the given rank and length plus its Hall basis.

    Degree ``-d`` of the algebra is spanned by the Hall words of degree ``d``.
    """
    hb = generate_hall_basis(rank, length, budget, names)
    words = hb.words
    br = {}
    for i, a in enumerate(words):
        da = degree(a)
        for j in range(i + 1, len(words)):
            b = words[j]
            if da + degree(b) > length:
                continue
            v = hb.to_vector(hb.bracket_words(a, b))
            if v:
                br[(i, j)] = v
    alg = GradedLieAlgebra(
        [-d for d in range(1, length + 1)],
        hb.counts,
        br,
        [hb.label(w) for w in words],
    )
    return alg, hb
