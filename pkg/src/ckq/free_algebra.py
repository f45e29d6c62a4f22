"""Free associative algebra over D_n with bounded-degree linear reduction.

Elements are complex linear combinations of pairs (tag mask, word), where a
word is a tuple of generator ids.  Words concatenate under multiplication and
tag masks combine by the nilpotent rule (overlap kills the term).

Quadratic relation sets are turned into rewrite rules by viewing their
tag-closure as a plain complex linear space in the (mask, word) basis and
row-reducing it: every pivot becomes a rule head, the rest of its row the
tail.  Reduction of degree <= 3 elements then gives normal forms, and the
diamond check over all degree-3 words certifies that the quotient algebra is
well defined.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Mapping, Sequence

import numpy as np

from .pimenov import PimenovElement, Scalar

PIVOT_THRESHOLD = 1e-8
CLOSURE_DEGREE = 3

Word = tuple[int, ...]
TermKey = tuple[int, Word]


class InconsistentIdeal(ValueError):
    """Row reduction produced a bare constant: 1 lies in the ideal."""


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


def term_order_key(mask: int, word: Word) -> tuple:
    """Sort key; larger key = larger term.

    Words compare degree-then-lexicographically; for equal words, terms with
    fewer tags are larger, ties broken toward the smaller bitmask.  The mask
    part is translation invariant under disjoint tag union, so rule heads
    stay heads when a rule is multiplied by extra tags.
    """
    return (len(word), word, -_popcount(mask), -mask)


class FreeElement:
    __slots__ = ("n", "G", "terms")

    def __init__(self, n: int, G: int, terms: Mapping[TermKey, Scalar] | None = None):
        self.n = n
        self.G = G
        clean: dict[TermKey, complex] = {}
        if terms:
            for (mask, word), c in terms.items():
                c = complex(c)
                if c != 0:
                    clean[(mask, tuple(word))] = c
        self.terms = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, n: int, G: int) -> "FreeElement":
        return cls(n, G)

    @classmethod
    def const(cls, n: int, G: int, value: "Scalar | PimenovElement") -> "FreeElement":
        if isinstance(value, PimenovElement):
            return cls(n, G, {(m, ()): c for m, c in value.coeffs.items()})
        return cls(n, G, {(0, ()): value})

    @classmethod
    def generator(cls, n: int, G: int, g: int) -> "FreeElement":
        if not (0 <= g < G):
            raise ValueError(f"generator id {g} out of range")
        return cls(n, G, {(0, (g,)): 1.0})

    # -- queries --------------------------------------------------------

    def is_zero(self, tol: float = 0.0) -> bool:
        if tol == 0.0:
            return not self.terms
        return all(abs(c) <= tol for c in self.terms.values())

    def max_abs(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def degree(self) -> int:
        return max((len(w) for (_, w) in self.terms), default=0)

    def leading_term(self) -> TermKey:
        return max(self.terms, key=lambda k: term_order_key(*k))

    # -- algebra --------------------------------------------------------

    def _check(self, other: "FreeElement") -> None:
        if self.n != other.n or self.G != other.G:
            raise ValueError("alphabet/tag mismatch")

    def __add__(self, other: "FreeElement") -> "FreeElement":
        self._check(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0j) + c
        return FreeElement(self.n, self.G, out)

    def __neg__(self) -> "FreeElement":
        return FreeElement(self.n, self.G, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "FreeElement") -> "FreeElement":
        return self + (-other)

    def __mul__(self, other: "FreeElement | Scalar | PimenovElement") -> "FreeElement":
        if isinstance(other, (int, float, complex)):
            return FreeElement(
                self.n, self.G, {k: c * other for k, c in self.terms.items()}
            )
        if isinstance(other, PimenovElement):
            out: dict[TermKey, complex] = {}
            for (m1, w), c1 in self.terms.items():
                for m2, c2 in other.coeffs.items():
                    if m1 & m2:
                        continue
                    k = (m1 | m2, w)
                    out[k] = out.get(k, 0j) + c1 * c2
            return FreeElement(self.n, self.G, out)
        self._check(other)
        out = {}
        for (m1, w1), c1 in self.terms.items():
            for (m2, w2), c2 in other.terms.items():
                if m1 & m2:
                    continue
                k = (m1 | m2, w1 + w2)
                out[k] = out.get(k, 0j) + c1 * c2
        return FreeElement(self.n, self.G, out)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"FreeElement({len(self.terms)} terms, deg {self.degree()})"


def free_tensor(a: FreeElement, b: FreeElement) -> "TensorElement":
    """a (x) b in the tensor square (left/right word banks, shared tags)."""
    a._check(b)
    out: dict[tuple[int, Word, Word], complex] = {}
    for (m1, w1), c1 in a.terms.items():
        for (m2, w2), c2 in b.terms.items():
            if m1 & m2:
                continue
            k = (m1 | m2, w1, w2)
            out[k] = out.get(k, 0j) + c1 * c2
    return TensorElement(a.n, a.G, out)


class TensorElement:
    """Element of the tensor square: terms (mask, left word, right word)."""

    __slots__ = ("n", "G", "terms")

    def __init__(self, n: int, G: int, terms: Mapping[tuple[int, Word, Word], Scalar] | None = None):
        self.n = n
        self.G = G
        clean: dict[tuple[int, Word, Word], complex] = {}
        if terms:
            for (mask, lw, rw), c in terms.items():
                c = complex(c)
                if c != 0:
                    clean[(mask, tuple(lw), tuple(rw))] = c
        self.terms = clean

    @classmethod
    def zero(cls, n: int, G: int) -> "TensorElement":
        return cls(n, G)

    def is_zero(self, tol: float = 0.0) -> bool:
        if tol == 0.0:
            return not self.terms
        return all(abs(c) <= tol for c in self.terms.values())

    def max_abs(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def __add__(self, other: "TensorElement") -> "TensorElement":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0j) + c
        return TensorElement(self.n, self.G, out)

    def __neg__(self) -> "TensorElement":
        return TensorElement(self.n, self.G, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other: "TensorElement") -> "TensorElement":
        return self + (-other)

    def __mul__(self, other: "TensorElement | Scalar | PimenovElement") -> "TensorElement":
        if isinstance(other, (int, float, complex)):
            return TensorElement(
                self.n, self.G, {k: c * other for k, c in self.terms.items()}
            )
        if isinstance(other, PimenovElement):
            out: dict[tuple[int, Word, Word], complex] = {}
            for (m1, lw, rw), c1 in self.terms.items():
                for m2, c2 in other.coeffs.items():
                    if m1 & m2:
                        continue
                    k = (m1 | m2, lw, rw)
                    out[k] = out.get(k, 0j) + c1 * c2
            return TensorElement(self.n, self.G, out)
        out = {}
        for (m1, l1, r1), c1 in self.terms.items():
            for (m2, l2, r2), c2 in other.terms.items():
                if m1 & m2:
                    continue
                k = (m1 | m2, l1 + l2, r1 + r2)
                out[k] = out.get(k, 0j) + c1 * c2
        return TensorElement(self.n, self.G, out)

    __rmul__ = __mul__


@dataclass
class RelationSet:
    relations: list[FreeElement]
    label: str = "derived"

    def __iter__(self):
        return iter(self.relations)

    def __len__(self) -> int:
        return len(self.relations)


def iota_closure(rs: RelationSet | Sequence[FreeElement], n: int) -> list[FreeElement]:
    """All nonzero tag-monomial multiples of the given relations.

    The ideal over D, viewed as a complex linear space, is spanned by these.
    """
    relations = list(rs.relations if isinstance(rs, RelationSet) else rs)
    out: list[FreeElement] = []
    unit = PimenovElement.unit(n)
    for r in relations:
        for mask in range(1 << n):
            iota = PimenovElement(n, {mask: 1.0}) if mask else unit
            m = r * iota
            if not m.is_zero():
                out.append(m)
    return out


class ReductionSystem:
    """Inter-reduced linear rewrite rules head -> tail, heads of degree <= 3.

    Rule heads of degree 3 come from bounded-degree completion (see
    build_reduction): quadratic relation sets whose ideal contains cubic
    elements not resolved by subword rewriting get those elements adjoined
    as explicit rules, which is what makes the degree-3 diamond check a
    meaningful certificate.
    """

    def __init__(self, n: int, G: int, rules: dict[TermKey, FreeElement]):
        self.n = n
        self.G = G
        self.rules = rules
        self.rules_by_word: dict[Word, list[tuple[int, FreeElement]]] = {}
        for (hm, hw), tail in rules.items():
            self.rules_by_word.setdefault(hw, []).append((hm, tail))
        for lst in self.rules_by_word.values():
            lst.sort(key=lambda it: (-_popcount(it[0]), it[0]))
        self._head_lengths = sorted({len(w) for w in self.rules_by_word}, reverse=True)
        self._memo: dict[str, dict[TermKey, dict[TermKey, complex]]] = {
            "left": {},
            "right": {},
        }

    def __len__(self) -> int:
        return len(self.rules)

    # -- normal forms ----------------------------------------------------

    def _nf_term(self, mask: int, word: Word, strategy: str) -> dict[TermKey, complex]:
        memo = self._memo[strategy]
        key = (mask, word)
        hit = memo.get(key)
        if hit is not None:
            return hit
        positions = range(len(word))
        if strategy == "right":
            positions = reversed(positions)
        chosen = None
        for p in positions:
            for L in self._head_lengths:
                if p + L > len(word):
                    continue
                sub = word[p : p + L]
                for hm, tail in self.rules_by_word.get(sub, ()):
                    if hm & mask == hm:
                        chosen = (p, L, hm, tail)
                        break
                if chosen:
                    break
            if chosen:
                break
        if chosen is None:
            result = {key: 1.0 + 0j}
            memo[key] = result
            return result
        p, L, hm, tail = chosen
        rest_mask = mask ^ hm
        prefix, suffix = word[:p], word[p + L :]
        acc: dict[TermKey, complex] = {}
        for (tm, tw), tc in tail.terms.items():
            if rest_mask & tm:
                continue
            sub = self._nf_term(rest_mask | tm, prefix + tw + suffix, strategy)
            for k, c in sub.items():
                acc[k] = acc.get(k, 0j) + tc * c
        acc = {k: c for k, c in acc.items() if c != 0}
        memo[key] = acc
        return acc

    def reduce(self, x: FreeElement, strategy: str = "left") -> FreeElement:
        if strategy not in ("left", "right"):
            raise ValueError("strategy must be 'left' or 'right'")
        if x.degree() > CLOSURE_DEGREE:
            raise ValueError(f"degree cap {CLOSURE_DEGREE} exceeded")
        out: dict[TermKey, complex] = {}
        for (mask, word), c in x.terms.items():
            for k, c2 in self._nf_term(mask, word, strategy).items():
                out[k] = out.get(k, 0j) + c * c2
        return FreeElement(x.n, x.G, out)

    def reduce_tensor(self, x: TensorElement) -> TensorElement:
        """Reduce both banks of a tensor-square element (shared tag pool)."""
        terms = dict(x.terms)
        for _ in range(2 * CLOSURE_DEGREE):
            nxt: dict[tuple[int, Word, Word], complex] = {}
            changed = False
            for (mask, lw, rw), c in terms.items():
                left_nf = self._nf_term(mask, lw, "left")
                if left_nf != {(mask, lw): 1.0 + 0j}:
                    changed = True
                for (m1, lw1), c1 in left_nf.items():
                    right_nf = self._nf_term(m1, rw, "left")
                    if right_nf != {(m1, rw): 1.0 + 0j}:
                        changed = True
                    for (m2, rw1), c2 in right_nf.items():
                        k = (m2, lw1, rw1)
                        nxt[k] = nxt.get(k, 0j) + c * c1 * c2
            terms = {k: c for k, c in nxt.items() if c != 0}
            if not changed:
                break
        return TensorElement(x.n, x.G, terms)


def _rref_rules(
    elements: Sequence[FreeElement],
    n: int,
    G: int,
    pivot_threshold: float = PIVOT_THRESHOLD,
) -> dict[TermKey, FreeElement]:
    """Row-reduce a list of elements into head -> tail rewrite rules."""
    elements = [e for e in elements if e.terms]
    if not elements:
        return {}
    columns = sorted(
        {k for r in elements for k in r.terms},
        key=lambda k: term_order_key(*k),
        reverse=True,
    )
    col_index = {k: i for i, k in enumerate(columns)}
    A = np.zeros((len(elements), len(columns)), dtype=complex)
    for i, r in enumerate(elements):
        for k, c in r.terms.items():
            A[i, col_index[k]] = c
    # Gauss-Jordan with relative pivot threshold
    global_scale = np.abs(A).max()
    noise = 1e-12 * global_scale
    pivot_cols: list[int] = []
    row = 0
    for col in range(len(columns)):
        if row >= len(A):
            break
        # rows that are pure cancellation noise are structurally zero
        scales = np.abs(A[row:]).max(axis=1)
        dead = (scales > 0) & (scales <= noise)
        if dead.any():
            A[row:][dead] = 0
            scales[dead] = 0
        sub = np.abs(A[row:, col])
        best = int(np.argmax(sub))
        row_scale = scales[best]
        if row_scale == 0 or sub[best] <= pivot_threshold * row_scale:
            # no pivot: the column is structurally zero below this point,
            # which keeps rule tails strictly below their heads
            A[row:, col] = 0
            continue
        best += row
        A[[row, best]] = A[[best, row]]
        A[row] = A[row] / A[row, col]
        mask = np.abs(A[:, col]) > 0
        mask[row] = False
        A[mask] -= np.outer(A[mask, col], A[row])
        pivot_cols.append(col)
        row += 1
    rules: dict[TermKey, FreeElement] = {}
    for r_i, col in enumerate(pivot_cols):
        head = columns[col]
        if len(head[1]) == 0:
            raise InconsistentIdeal("a bare constant survived row reduction")
        row_vec = A[r_i]
        row_max = np.abs(row_vec).max()
        tail_terms: dict[TermKey, complex] = {}
        for k_i in np.nonzero(row_vec)[0]:
            if k_i == col:
                continue
            c = row_vec[k_i]
            if abs(c) <= pivot_threshold * row_max:
                continue
            tail_terms[columns[k_i]] = -c
        rules[head] = FreeElement(n, G, tail_terms)
    return rules


def build_reduction(
    rs: RelationSet | Sequence[FreeElement],
    n: int,
    G: int,
    pivot_threshold: float = PIVOT_THRESHOLD,
    complete: bool = True,
) -> ReductionSystem:
    """Turn a degree <= 2 relation set into a rewriting system.

    The tag-closure of the relations is row-reduced into quadratic rules.
    With complete=True (the default) the system is then completed at degree
    3: cubic ideal elements that subword rewriting cannot resolve — reduced
    products (generator x relation), (relation x generator), and any
    remaining left/right diamond discrepancies — are adjoined as explicit
    degree-3 rules, so normal forms of degree <= 3 elements are unique.
    """
    closure = iota_closure(rs, n)
    for r in closure:
        if r.degree() > 2:
            raise ValueError("relations must have word degree <= 2")
    rules = _rref_rules(closure, n, G, pivot_threshold)
    sys = ReductionSystem(n, G, rules)
    if not complete or not rules:
        return sys
    scale = max(r.max_abs() for r in closure)
    keep = 1e-10 * max(scale, 1.0)
    for _ in range(10):
        # absorb unresolved cubic consequences of the relations
        residuals = []
        for r in closure:
            for g in range(G):
                gx = FreeElement.generator(n, G, g)
                for prod in (gx * r, r * gx):
                    red = sys.reduce(prod)
                    if red.max_abs() > keep:
                        residuals.append(red)
        # absorb any remaining diamond discrepancies
        for word in product(range(G), repeat=CLOSURE_DEGREE):
            for mask in range(1 << n):
                nl = sys._nf_term(mask, word, "left")
                nr = sys._nf_term(mask, word, "right")
                if nl == nr:
                    continue
                diff = {
                    k: nl.get(k, 0j) - nr.get(k, 0j) for k in set(nl) | set(nr)
                }
                d = FreeElement(n, G, diff)
                if d.max_abs() > keep:
                    residuals.append(d)
        if not residuals:
            break
        added = {
            h: t
            for h, t in _rref_rules(residuals, n, G, pivot_threshold).items()
            if h not in rules
        }
        if not added:
            break
        rules.update(added)
        sys = ReductionSystem(n, G, rules)
    return sys


def confluence_check(sys: ReductionSystem, degree: int = 3) -> dict:
    """Left-first vs right-first reduction of every degree-`degree` word."""
    if degree != 3:
        raise ValueError("confluence check is scoped to degree 3")
    worst = 0.0
    failing: list[Word] = []
    count = 0
    for word in product(range(sys.G), repeat=degree):
        count += 1
        nl = sys._nf_term(0, word, "left")
        nr = sys._nf_term(0, word, "right")
        keys = set(nl) | set(nr)
        diff = max(
            (abs(nl.get(k, 0j) - nr.get(k, 0j)) for k in keys), default=0.0
        )
        if diff > worst:
            worst = diff
        if diff > 1e-9:
            failing.append(word)
    return {
        "words_checked": count,
        "max_discrepancy": worst,
        "failing_words": failing,
        "confluent": not failing,
    }


def relation_rank(
    rs: RelationSet | Sequence[FreeElement], tol: float = PIVOT_THRESHOLD
) -> int:
    """Numeric rank of a relation list in the (mask, word) basis."""
    relations = list(rs.relations if isinstance(rs, RelationSet) else rs)
    columns = sorted({k for r in relations for k in r.terms})
    if not columns:
        return 0
    col_index = {k: i for i, k in enumerate(columns)}
    A = np.zeros((len(relations), len(columns)), dtype=complex)
    for i, r in enumerate(relations):
        for k, c in r.terms.items():
            A[i, col_index[k]] = c
    return int(np.linalg.matrix_rank(A, tol=tol))
