"""Arithmetic in the commutative algebra D_n of nilpotent units.

An element is a complex linear combination of square-free monomials in the
nilpotent tags i1..in (each tag squares to zero, tags commute).  Monomials
are encoded as bitmasks over the tags, so an element is just a sparse map
``bitmask -> complex``.  The nilpotent structure is tracked exactly: a
product term whose tag sets overlap is dropped outright, never rounded.

The module also provides

* analytic kernels (exp, log, sin, ...) lifted to D_n through their Taylor
  data at the scalar part,
* parameter signatures (the vector of "geometry switches" j_1..j_{N-1},
  each 1, nilpotent, or imaginary) and their running products J_{mu,nu},
* trigonometry of a single J-factor computed through even power series, so
  that expressions like (1/j)*sin(j*phi) never divide by a nilpotent.
"""

from __future__ import annotations

import cmath
import math
import re
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping, Sequence, Union

MAX_TAGS = 8
DEFAULT_TOL = 1e-9

Scalar = Union[int, float, complex]


class NotInvertible(ArithmeticError):
    """Raised when inverting an element whose scalar part is zero."""


class TagCountMismatch(ValueError):
    """Raised when combining elements over different tag counts."""


def _popcount(mask: int) -> int:
    return bin(mask).count("1")


class PimenovElement:
    """An element of D_n: complex coefficients indexed by tag subsets."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n: int, coeffs: Mapping[int, Scalar] | None = None):
        if not (0 <= n <= MAX_TAGS):
            raise ValueError(f"tag count must be in 0..{MAX_TAGS}, got {n}")
        self.n = n
        clean: dict[int, complex] = {}
        if coeffs:
            for mask, c in coeffs.items():
                if mask < 0 or mask >= (1 << n):
                    raise ValueError(f"mask {mask} out of range for n={n}")
                c = complex(c)
                if c != 0:
                    clean[mask] = c
        self.coeffs = clean

    # -- constructors -------------------------------------------------

    @classmethod
    def scalar(cls, n: int, value: Scalar) -> "PimenovElement":
        return cls(n, {0: value})

    @classmethod
    def unit(cls, n: int) -> "PimenovElement":
        return cls(n, {0: 1.0})

    @classmethod
    def tag(cls, n: int, k: int) -> "PimenovElement":
        """The nilpotent generator i_k (1-based)."""
        if not (1 <= k <= n):
            raise ValueError(f"tag index {k} out of range 1..{n}")
        return cls(n, {1 << (k - 1): 1.0})

    # -- basic queries ------------------------------------------------

    @property
    def scalar_part(self) -> complex:
        return self.coeffs.get(0, 0j)

    @property
    def is_invertible(self) -> bool:
        return self.coeffs.get(0, 0j) != 0

    def nil_part(self) -> "PimenovElement":
        return PimenovElement(
            self.n, {m: c for m, c in self.coeffs.items() if m != 0}
        )

    def is_zero(self, tol: float = 0.0) -> bool:
        if tol == 0.0:
            return not self.coeffs
        return all(abs(c) <= tol for c in self.coeffs.values())

    def max_abs(self) -> float:
        return max((abs(c) for c in self.coeffs.values()), default=0.0)

    def isclose(self, other: "PimenovElement | Scalar", tol: float = DEFAULT_TOL) -> bool:
        other = _coerce(other, self.n)
        return (self - other).max_abs() <= tol

    # -- ring operations ----------------------------------------------

    def __add__(self, other: "PimenovElement | Scalar") -> "PimenovElement":
        other = _coerce(other, self.n)
        if other.n != self.n:
            raise TagCountMismatch(f"{self.n} vs {other.n}")
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out.get(m, 0j) + c
        return PimenovElement(self.n, out)

    __radd__ = __add__

    def __neg__(self) -> "PimenovElement":
        return PimenovElement(self.n, {m: -c for m, c in self.coeffs.items()})

    def __sub__(self, other: "PimenovElement | Scalar") -> "PimenovElement":
        return self + (-_coerce(other, self.n))

    def __rsub__(self, other: Scalar) -> "PimenovElement":
        return _coerce(other, self.n) - self

    def __mul__(self, other: "PimenovElement | Scalar") -> "PimenovElement":
        if not isinstance(other, (PimenovElement, int, float, complex)):
            return NotImplemented  # defer to the other operand (e.g. FreeElement)
        other = _coerce(other, self.n)
        if other.n != self.n:
            raise TagCountMismatch(f"{self.n} vs {other.n}")
        out: dict[int, complex] = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                if m1 & m2:
                    continue  # a repeated tag squares to zero
                m = m1 | m2
                out[m] = out.get(m, 0j) + c1 * c2
        return PimenovElement(self.n, out)

    __rmul__ = __mul__

    def inv(self) -> "PimenovElement":
        a0 = self.scalar_part
        if a0 == 0:
            raise NotInvertible("scalar part is zero; division is undefined")
        # a = a0*(1 - m) with m nilpotent, so 1/a = (1/a0) * sum m^k.
        m = self.nil_part() * (-1.0 / a0)
        acc = PimenovElement.unit(self.n)
        term = PimenovElement.unit(self.n)
        for _ in range(self.n):
            term = term * m
            if term.is_zero():
                break
            acc = acc + term
        return acc * (1.0 / a0)

    def __truediv__(self, other: "PimenovElement | Scalar") -> "PimenovElement":
        return self * _coerce(other, self.n).inv()

    def __pow__(self, k: int) -> "PimenovElement":
        if k < 0:
            return self.inv() ** (-k)
        out = PimenovElement.unit(self.n)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, float, complex)):
            other = PimenovElement.scalar(self.n, other)
        if not isinstance(other, PimenovElement):
            return NotImplemented
        return self.n == other.n and self.coeffs == other.coeffs

    def __hash__(self) -> int:
        return hash((self.n, tuple(sorted(self.coeffs.items()))))

    def __repr__(self) -> str:
        return f"PimenovElement({self.n}, {format_element(self)!r})"


def _coerce(value: "PimenovElement | Scalar", n: int) -> PimenovElement:
    if isinstance(value, PimenovElement):
        return value
    return PimenovElement.scalar(n, value)


# ---------------------------------------------------------------------------
# Partition sums and analytic function lifting
# ---------------------------------------------------------------------------


def _partitions(mask: int, r: int) -> Iterable[tuple[int, ...]]:
    """Unordered partitions of the tag set `mask` into r nonempty blocks."""
    if r == 1:
        yield (mask,)
        return
    low = mask & -mask  # the block containing the lowest tag is canonical
    rest = mask ^ low
    # enumerate subsets s of `rest`; the first block is low|s
    s = rest
    while True:
        block = low | s
        remainder = mask ^ block
        if _popcount(remainder) >= r - 1:
            for tail in _partitions(remainder, r - 1):
                yield (block,) + tail
        if s == 0:
            break
        s = (s - 1) & rest


def partition_sum(coeffs: Mapping[int, complex], mask: int, r: int) -> complex:
    """d(p;r): sum over partitions of `mask` into r blocks of block-coefficient
    products.  d(p;1) is the coefficient of `mask` itself; d(p;p) is the
    product of the singleton coefficients."""
    p = _popcount(mask)
    if not (1 <= r <= p):
        raise ValueError(f"block count {r} out of range 1..{p}")
    total = 0j
    for blocks in _partitions(mask, r):
        prod = 1.0 + 0j
        for b in blocks:
            c = coeffs.get(b, 0j)
            if c == 0:
                prod = 0j
                break
            prod *= c
        total += prod
    return total


@dataclass(frozen=True)
class AnalyticKernel:
    """An analytic function given by its derivatives: deriv(r, a0) = f^(r)(a0)."""

    name: str
    deriv: Callable[[int, complex], complex]

    def __call__(self, a0: complex) -> complex:
        return self.deriv(0, a0)


def _cyclic(fns: Sequence[Callable[[complex], complex]]) -> Callable[[int, complex], complex]:
    def d(r: int, a0: complex) -> complex:
        return fns[r % len(fns)](a0)

    return d


def _log_deriv(r: int, a0: complex) -> complex:
    if r == 0:
        return cmath.log(a0)
    return (-1) ** (r - 1) * math.factorial(r - 1) / a0**r


KERNELS: dict[str, AnalyticKernel] = {
    "exp": AnalyticKernel("exp", lambda r, a0: cmath.exp(a0)),
    "log": AnalyticKernel("log", _log_deriv),
    "sin": AnalyticKernel("sin", _cyclic([cmath.sin, cmath.cos, lambda z: -cmath.sin(z), lambda z: -cmath.cos(z)])),
    "cos": AnalyticKernel("cos", _cyclic([cmath.cos, lambda z: -cmath.sin(z), lambda z: -cmath.cos(z), cmath.sin])),
    "sinh": AnalyticKernel("sinh", _cyclic([cmath.sinh, cmath.cosh])),
    "cosh": AnalyticKernel("cosh", _cyclic([cmath.cosh, cmath.sinh])),
}


def pim_apply(f: AnalyticKernel, a: PimenovElement) -> PimenovElement:
    """Lift the analytic function f to D_n.

    The coefficient of a tag subset K of size p is
    sum_{r=1..p} f^(r)(a0) * d(p;r), where d(p;r) runs over unordered
    partitions of K into r nonempty blocks; the scalar part is f(a0).
    """
    a0 = a.scalar_part
    out: dict[int, complex] = {0: f.deriv(0, a0)}
    derivs: dict[int, complex] = {}
    for mask in a_subsets(a):
        p = _popcount(mask)
        total = 0j
        for r in range(1, p + 1):
            if r not in derivs:
                derivs[r] = f.deriv(r, a0)
            total += derivs[r] * partition_sum(a.coeffs, mask, r)
        if total != 0:
            out[mask] = total
    return PimenovElement(a.n, out)


def a_subsets(a: PimenovElement) -> list[int]:
    """All nonempty tag subsets reachable from the nilpotent support of a."""
    support = 0
    for m in a.coeffs:
        support |= m
    subs = []
    s = support
    while s:
        subs.append(s)
        s = (s - 1) & support
    return sorted(subs, key=_popcount)


# ---------------------------------------------------------------------------
# Parameter signatures and J-factors
# ---------------------------------------------------------------------------

ONE = "1"
NIL = "n"
IM = "i"
_SLOT_TOKENS = {ONE, NIL, IM}


class ParameterSignature:
    """The vector j = (j_1, ..., j_{N-1}); each slot is 1, nilpotent, or i.

    Slot r with value `n` carries the nilpotent tag i_r; all elements built
    from a signature share tag count N-1.
    """

    def __init__(self, slots: Sequence[str]):
        slots = tuple(slots)
        if not slots:
            raise ValueError("signature needs at least one slot")
        for s in slots:
            if s not in _SLOT_TOKENS:
                raise ValueError(f"unknown signature token {s!r} (expected 1, n or i)")
        if len(slots) > MAX_TAGS:
            raise ValueError(f"at most {MAX_TAGS} slots supported")
        self.slots = slots

    @classmethod
    def parse(cls, text: str) -> "ParameterSignature":
        return cls(tuple(tok.strip() for tok in text.split(",")))

    @property
    def n_slots(self) -> int:
        return len(self.slots)

    @property
    def dim(self) -> int:
        """Matrix size N = number of slots + 1."""
        return len(self.slots) + 1

    @property
    def quantum_allowed(self) -> bool:
        return IM not in self.slots

    def slot_value(self, r: int) -> PimenovElement:
        """j_r as an element of D_{N-1} (1-based slot index)."""
        if not (1 <= r <= self.n_slots):
            raise ValueError(f"slot index {r} out of range")
        token = self.slots[r - 1]
        n = self.n_slots
        if token == ONE:
            return PimenovElement.unit(n)
        if token == IM:
            return PimenovElement.scalar(n, 1j)
        return PimenovElement.tag(n, r)

    def jfactor(self, mu: int, nu: int) -> PimenovElement:
        """J_{mu,nu} = product of j_r for r = mu..nu-1; the unit for mu >= nu."""
        if not (1 <= mu <= self.dim and 1 <= nu <= self.dim):
            raise ValueError(f"indices ({mu},{nu}) out of range 1..{self.dim}")
        out = PimenovElement.unit(self.n_slots)
        for r in range(mu, nu):
            out = out * self.slot_value(r)
        return out

    def __str__(self) -> str:
        return ",".join(self.slots)

    def __repr__(self) -> str:
        return f"ParameterSignature({self.slots!r})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ParameterSignature) and self.slots == other.slots

    def __hash__(self) -> int:
        return hash(self.slots)


def jfactor_square(j: PimenovElement) -> complex:
    """The scalar j*j of a single J-factor (c * tag-monomial): c^2 if the
    monomial is empty, else 0."""
    sq = j * j
    nil = sq.nil_part()
    if not nil.is_zero():
        raise ValueError("not a J-factor: square has a nilpotent part")
    return sq.scalar_part


def is_j_monomial(j: PimenovElement) -> bool:
    """True if j is a single term c * (tag monomial)."""
    return len(j.coeffs) <= 1


def scaled_trig(j: PimenovElement, phi: Scalar) -> tuple[PimenovElement, complex, complex]:
    """(sin(j*phi), (1/j)*sin(j*phi), cos(j*phi)) for a single J-factor j.

    Both scalar returns are computed from w = j^2 (always a plain scalar),
    so nothing is ever divided by a nilpotent:
        (1/j)*sin(j*phi) = phi * sum (-1)^m w^m phi^(2m) / (2m+1)!
    which collapses to sin(s*phi)/s with s = sqrt(w).
    """
    if not is_j_monomial(j):
        raise ValueError("scaled_trig expects a single J-factor")
    w = jfactor_square(j)
    phi = complex(phi)
    if w == 0:
        cosj = 1.0 + 0j
        sincj = phi
    else:
        s = cmath.sqrt(w)  # branch irrelevant: both uses are even in s
        cosj = cmath.cos(s * phi)
        sincj = cmath.sin(s * phi) / s
    sinj = j * sincj
    return sinj, sincj, cosj


def sinhc_j(w: complex, z: Scalar) -> complex:
    """(1/J) * sinh(J*z) as a scalar, given w = J^2 (limit z at w = 0)."""
    z = complex(z)
    if w == 0:
        return z
    s = cmath.sqrt(w)
    return cmath.sinh(s * z) / s


def cosh_j(w: complex, z: Scalar) -> complex:
    """cosh(J*z) as a scalar, given w = J^2."""
    z = complex(z)
    if w == 0:
        return 1.0 + 0j
    s = cmath.sqrt(w)
    return cmath.cosh(s * z)


def tanhc_j(w: complex, z: Scalar) -> complex:
    """(1/J) * tanh(J*z) as a scalar, given w = J^2 (limit z at w = 0)."""
    z = complex(z)
    if w == 0:
        return z
    s = cmath.sqrt(w)
    return cmath.tanh(s * z) / s


# ---------------------------------------------------------------------------
# Textual element syntax: `1 + 2*i1 - 0.5*i1*i2`, scalars as `a+bj`
# ---------------------------------------------------------------------------

_TOKEN = re.compile(
    r"\s*(?:(?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?j?|j)"
    r"|(?P<tag>i[1-8])"
    r"|(?P<op>[-+*/()]))"
)


class _Parser:
    def __init__(self, text: str, n: int):
        self.tokens: list[str] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise ValueError(f"bad element syntax at {text[pos:]!r}")
            self.tokens.append(m.group().strip())
            pos = m.end()
        self.i = 0
        self.n = n

    def peek(self) -> str | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next(self) -> str:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def parse(self) -> PimenovElement:
        value = self.expr()
        if self.peek() is not None:
            raise ValueError(f"trailing input at {self.peek()!r}")
        return value

    def expr(self) -> PimenovElement:
        sign = 1.0
        while self.peek() in ("+", "-"):
            if self.next() == "-":
                sign = -sign
        value = self.term() * sign
        while self.peek() in ("+", "-"):
            op = self.next()
            rhs = self.term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def term(self) -> PimenovElement:
        value = self.factor()
        while self.peek() in ("*", "/"):
            op = self.next()
            rhs = self.factor()
            value = value * rhs if op == "*" else value / rhs
        return value

    def factor(self) -> PimenovElement:
        tok = self.peek()
        if tok == "(":
            self.next()
            value = self.expr()
            if self.next() != ")":
                raise ValueError("unbalanced parenthesis")
            return value
        if tok in ("+", "-"):
            self.next()
            inner = self.factor()
            return inner if tok == "+" else -inner
        tok = self.next()
        if tok.startswith("i") and len(tok) == 2 and tok[1].isdigit():
            k = int(tok[1])
            if k > self.n:
                raise ValueError(f"tag {tok} exceeds tag count {self.n}")
            return PimenovElement.tag(self.n, k)
        return PimenovElement.scalar(self.n, complex(tok))


def parse_element(text: str, n: int) -> PimenovElement:
    """Parse `1 + 2*i1 - 0.5*i1*i2` into an element of D_n."""
    return _Parser(text, n).parse()


def format_scalar(c: complex) -> str:
    if c.imag == 0:
        return repr(c.real)
    return repr(c)[1:-1] if repr(c).startswith("(") else repr(c)


def format_element(a: PimenovElement) -> str:
    if not a.coeffs:
        return "0"
    parts = []
    for mask in sorted(a.coeffs, key=lambda m: (_popcount(m), m)):
        c = a.coeffs[mask]
        tags = "*".join(f"i{k + 1}" for k in range(a.n) if mask >> k & 1)
        body = format_scalar(c) if not tags else f"{format_scalar(c)}*{tags}"
        parts.append(body)
    return " + ".join(parts).replace("+ -", "- ")
