"""Independent oracles used only by the test suite.

These deliberately avoid the library's partition-sum lifting code: the
Grassmann oracle realizes the nilpotent units inside a brute-force exterior
algebra, the Taylor oracle lifts analytic kernels through an explicit
truncated series, and the finite-difference oracle recovers lifted
coefficients from mixed numerical partial derivatives.
"""

from __future__ import annotations

import cmath
import math
from itertools import product

from ckq.pimenov import PimenovElement

# ---------------------------------------------------------------------------
# Grassmann (exterior algebra) oracle
# ---------------------------------------------------------------------------


class GrassmannElement:
    """Element of the exterior algebra on `m` anticommuting generators,
    stored as subset-mask -> coefficient."""

    def __init__(self, m: int, coeffs: dict[int, complex] | None = None):
        self.m = m
        self.coeffs = dict(coeffs or {})

    def __mul__(self, other: "GrassmannElement") -> "GrassmannElement":
        out: dict[int, complex] = {}
        for m1, c1 in self.coeffs.items():
            for m2, c2 in other.coeffs.items():
                if m1 & m2:
                    continue  # repeated generator squares to zero
                sign = 1
                for bit in range(self.m):
                    if m2 & (1 << bit):
                        # count generators of m1 that this factor must jump over
                        higher = m1 >> (bit + 1)
                        sign *= (-1) ** bin(higher).count("1")
                key = m1 | m2
                out[key] = out.get(key, 0) + sign * c1 * c2
        return GrassmannElement(self.m, out)


def embed_in_grassmann(a: PimenovElement) -> GrassmannElement:
    """Send the k-th nilpotent unit to the adjacent pair xi_{2k} xi_{2k+1};
    adjacent even pairs reorder without signs."""
    n = a.n
    out: dict[int, complex] = {}
    for mask, c in a.coeffs.items():
        gmask = 0
        for k in range(n):
            if mask & (1 << k):
                gmask |= (1 << (2 * k)) | (1 << (2 * k + 1))
        out[gmask] = out.get(gmask, 0) + c
    return GrassmannElement(2 * n, out)


def grassmann_product(a: PimenovElement, b: PimenovElement) -> PimenovElement:
    """Multiply through the exterior-algebra embedding and pull back."""
    n = a.n
    g = embed_in_grassmann(a) * embed_in_grassmann(b)
    coeffs: dict[int, complex] = {}
    for gmask, c in g.coeffs.items():
        mask = 0
        for k in range(n):
            pair = (1 << (2 * k)) | (1 << (2 * k + 1))
            if gmask & pair == pair:
                mask |= 1 << k
                gmask &= ~pair
        assert gmask == 0, "image not in the even pair subalgebra"
        coeffs[mask] = coeffs.get(mask, 0) + c
    return PimenovElement(n, coeffs)


# ---------------------------------------------------------------------------
# Taylor-series lifting oracle
# ---------------------------------------------------------------------------


def _cyclic(fns):
    return lambda r, a0: fns[r % len(fns)](a0)


_DERIVS = {
    "exp": lambda r, a0: cmath.exp(a0),
    "log": lambda r, a0: cmath.log(a0) if r == 0 else (-1) ** (r - 1) * math.factorial(r - 1) / a0**r,
    "sin": _cyclic([cmath.sin, cmath.cos, lambda z: -cmath.sin(z), lambda z: -cmath.cos(z)]),
    "cos": _cyclic([cmath.cos, lambda z: -cmath.sin(z), lambda z: -cmath.cos(z), cmath.sin]),
    "sinh": _cyclic([cmath.sinh, cmath.cosh]),
    "cosh": _cyclic([cmath.cosh, cmath.sinh]),
}

FUNCS = {
    "exp": cmath.exp,
    "log": cmath.log,
    "sin": cmath.sin,
    "cos": cmath.cos,
    "sinh": cmath.sinh,
    "cosh": cmath.cosh,
}


def lift_taylor(name: str, a: PimenovElement) -> PimenovElement:
    """f(a0 + nu) = sum_r f^(r)(a0) nu^r / r! with nu the nilpotent part;
    the series terminates at the tag count."""
    d = _DERIVS[name]
    a0 = a.scalar_part
    nu = a.nil_part()
    out = PimenovElement.scalar(a.n, d(0, a0))
    power = PimenovElement.unit(a.n)
    for r in range(1, a.n + 1):
        power = power * nu
        out = out + power * (d(r, a0) / math.factorial(r))
    return out


# ---------------------------------------------------------------------------
# Finite-difference lifting oracle
# ---------------------------------------------------------------------------

FD_H = 2.5e-3
# fourth-order central first-derivative stencil
_FD_STENCIL = ((-2, 1 / 12), (-1, -8 / 12), (1, 8 / 12), (2, -1 / 12))


def lift_fd(name: str, a: PimenovElement) -> PimenovElement:
    """Recover every lifted coefficient as a mixed first partial derivative
    of f(a(t)) with each nilpotent unit replaced by a real variable t_k."""
    f = FUNCS[name]
    n = a.n

    def value(t: tuple[float, ...]) -> complex:
        z = 0j
        for mask, c in a.coeffs.items():
            term = c
            for k in range(n):
                if mask & (1 << k):
                    term *= t[k]
            z += term
        return f(z)

    coeffs: dict[int, complex] = {}
    for mask in range(2**n):
        vars_ = [k for k in range(n) if mask & (1 << k)]
        total = 0j
        for combo in product(_FD_STENCIL, repeat=len(vars_)):
            t = [0.0] * n
            weight = 1.0
            for k, (step, w) in zip(vars_, combo):
                t[k] = step * FD_H
                weight *= w / FD_H
            total += weight * value(tuple(t))
        coeffs[mask] = total
    return PimenovElement(n, coeffs)
