"""Quantum deformation of the N=3 orthogonal Cayley-Klein group.

Builds the 9x9 R-matrix and 3x3 metric C over D_n, the 9-generator
coordinate algebra with its exchange (RTT) and deformed-orthogonality
relations, and the Hopf structure maps (coproduct, counit, antipode).  The
deformation parameter v is numerically sampled; nilpotent signature slots
are carried exactly, so contracted cases are structurally exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import product
from typing import Mapping, Sequence

import numpy as np

from .dmat import DMatrix
from .free_algebra import (
    FreeElement,
    ReductionSystem,
    RelationSet,
    TensorElement,
    build_reduction,
    confluence_check,
    free_tensor,
    relation_rank,
)
from .pimenov import KERNELS, ParameterSignature, PimenovElement, Scalar, pim_apply

N = 3
NGEN = 9
GEN_NAMES = ("t11", "tt11", "t12", "tt12", "t13", "tt13", "t21", "tt21", "t22")
GEN_INDEX = {name: g for g, name in enumerate(GEN_NAMES)}

# The 3x3 generator matrix T has entries built from 9 independent
# generators sitting at five canonical positions; the other four positions
# reuse them through the point reflection (a,b) -> (4-a, 4-b).
CANONICAL_POSITIONS = ((1, 1), (1, 2), (1, 3), (2, 1), (2, 2))
# (t-generator id, tt-generator id or None) per canonical position
GEN_AT = {
    (1, 1): (0, 1),
    (1, 2): (2, 3),
    (1, 3): (4, 5),
    (2, 1): (6, 7),
    (2, 2): (8, None),
}

# A monomial c * j1^e1 * j2^e2 as (c, e1, e2); None is the zero monomial.
Mono = "tuple[complex, int, int] | None"

# Coefficients (c_ab, d_ab) of T_ab = c_ab * t + d_ab * tt at each matrix
# position, where (t, tt) is the generator pair of the canonical image.
CD_TABLE: dict[tuple[int, int], tuple[Mono, Mono]] = {
    (1, 1): ((1, 0, 0), (-1, 1, 1)),
    (1, 2): ((1, 1, 0), (-1j, 0, 1)),
    (1, 3): ((1, 0, 0), (-1j, 1, 1)),
    (2, 1): ((1, 1, 0), (1j, 0, 1)),
    (2, 2): ((1, 0, 0), None),
    (2, 3): ((1, 1, 0), (-1j, 0, 1)),
    (3, 1): ((1, 0, 0), (1j, 1, 1)),
    (3, 2): ((1, 1, 0), (1j, 0, 1)),
    (3, 3): ((1, 0, 0), (1, 1, 1)),
}


def canonical_position(a: int, b: int) -> tuple[int, int]:
    return (a, b) if (a, b) in GEN_AT else (4 - a, 4 - b)


def _mono_mul(m1: Mono, m2: Mono) -> Mono:
    if m1 is None or m2 is None:
        return None
    return (m1[0] * m2[0], m1[1] + m2[1], m1[2] + m2[2])


def _mono_ratio(num: Mono, den: Mono) -> Mono:
    """num / den, defined only when the quotient is again a monomial."""
    if num is None:
        return None
    if den is None:
        raise ZeroDivisionError("zero denominator monomial")
    e1, e2 = num[1] - den[1], num[2] - den[2]
    if e1 < 0 or e2 < 0:
        raise ValueError("monomial ratio has a negative exponent")
    return (num[0] / den[0], e1, e2)


def mono_eval(sig: ParameterSignature, m: Mono) -> PimenovElement:
    n = sig.n_slots
    if m is None:
        return PimenovElement.scalar(n, 0.0)
    out = PimenovElement.scalar(n, m[0])
    for slot, e in ((1, m[1]), (2, m[2])):
        for _ in range(e):
            out = out * sig.slot_value(slot)
    return out


def _require_quantum(sig: ParameterSignature) -> None:
    if not sig.quantum_allowed:
        raise ValueError(
            "signature contains an imaginary slot; the deformed construction "
            "only accepts slots 1 and n"
        )
    if sig.n_slots != N - 1:
        raise ValueError(f"need a {N - 1}-slot signature for N={N}")


# ---------------------------------------------------------------------------
# R-matrix and C-matrix
# ---------------------------------------------------------------------------


@dataclass
class RMatrix:
    mat: DMatrix
    sig: ParameterSignature
    v: complex


@dataclass
class CMatrix:
    mat: DMatrix
    sig: ParameterSignature
    v: complex
    rho: tuple[float, ...] = (0.5, 0.0, -0.5)

    def inv(self) -> DMatrix:
        return self.mat.inv()


def _exp_kernels(sig: ParameterSignature, v: complex):
    """e^{Jv}, e^{-Jv}, e^{-Jv/2}, sinh Jv over D with J the full j-factor."""
    J = sig.jfactor(1, N)
    e_p = pim_apply(KERNELS["exp"], J * v)
    e_m = pim_apply(KERNELS["exp"], J * (-v))
    e_m2 = pim_apply(KERNELS["exp"], J * (-v / 2))
    sh = (e_p - e_m) * 0.5
    return J, e_p, e_m, e_m2, sh


def rmatrix3(sig: ParameterSignature, v: complex) -> RMatrix:
    """Lower-triangular 9x9 deformation matrix on C^3 (x) C^3 over D."""
    _require_quantum(sig)
    n = sig.n_slots
    J, e_p, e_m, e_m2, sh = _exp_kernels(sig, v)
    one = PimenovElement.unit(n)
    zero = PimenovElement.scalar(n, 0.0)
    E = [[zero for _ in range(9)] for _ in range(9)]
    E[0][0] = e_p
    E[1][1] = one
    E[2][2] = e_m
    E[3][1] = sh * 2.0
    E[3][3] = one
    E[4][2] = e_m2 * sh * -2.0
    E[4][4] = one
    E[5][5] = one
    E[6][2] = (one - e_m) * sh * 2.0
    E[6][4] = e_m2 * sh * -2.0
    E[6][6] = e_m
    E[7][5] = sh * 2.0
    E[7][7] = one
    E[8][8] = e_p
    return RMatrix(DMatrix.from_entries(n, E), sig, v)


def rtilde3() -> np.ndarray:
    """First-order skeleton of the contracted R-matrix: R = I + Jv*Rt."""
    Rt = np.zeros((9, 9), dtype=complex)
    Rt[0, 0] = Rt[8, 8] = 1
    Rt[2, 2] = Rt[6, 6] = -1
    Rt[3, 1] = Rt[7, 5] = 2
    Rt[4, 2] = Rt[6, 4] = -2
    return Rt


def contracted_structure_residual(R: RMatrix) -> float:
    """Max-norm of R - (I + Jv*Rt); exact zero when J is nilpotent."""
    n = R.sig.n_slots
    J = R.sig.jfactor(1, N)
    model = DMatrix.identity(n, 9) + DMatrix.from_scalar(n, rtilde3()) * (J * R.v)
    return (R.mat - model).max_abs()


def cmatrix(sig: ParameterSignature, v: complex, size: int = N) -> CMatrix:
    """Deformed metric C = C0 * diag(e^{Jv/2}, 1, e^{-Jv/2})."""
    _require_quantum(sig)
    if size != N:
        raise ValueError("only the N=3 metric is constructed")
    n = sig.n_slots
    J = sig.jfactor(1, N)
    diag = [
        pim_apply(KERNELS["exp"], J * (v / 2)),
        PimenovElement.unit(n),
        pim_apply(KERNELS["exp"], J * (-v / 2)),
    ]
    zero = PimenovElement.scalar(n, 0.0)
    E = [[zero] * 3 for _ in range(3)]
    for k in range(3):
        E[2 - k][k] = diag[k]
    return CMatrix(DMatrix.from_entries(n, E), sig, v)


def flip_matrix(size: int = N) -> np.ndarray:
    """Permutation P on C^size (x) C^size exchanging the tensor factors."""
    P = np.zeros((size * size, size * size))
    for a in range(size):
        for b in range(size):
            P[size * a + b, size * b + a] = 1.0
    return P


def qybe_check(R: RMatrix) -> float:
    """Residual of R12 R13 R23 = R23 R13 R12 on the 27-dimensional space."""
    n = R.sig.n_slots
    I3 = DMatrix.identity(n, 3)
    R12 = R.mat.kron(I3)
    R23 = I3.kron(R.mat)
    P23 = DMatrix.from_scalar(n, np.kron(np.eye(3), flip_matrix()))
    R13 = P23 @ R12 @ P23
    return (R12 @ R13 @ R23 - R23 @ R13 @ R12).max_abs()


# ---------------------------------------------------------------------------
# Generator matrix and relations
# ---------------------------------------------------------------------------


def t_matrix(sig: ParameterSignature, attachments: bool = True) -> list[list[FreeElement]]:
    """3x3 matrix of generator combinations over the 9-letter alphabet.

    With attachments=False the coefficient monomials are evaluated as if
    every slot were 1 (used by the contraction-transform cross-check).
    """
    n = sig.n_slots
    trivial = ParameterSignature.parse(",".join(["1"] * n))
    at = sig if attachments else trivial
    T: list[list[FreeElement]] = []
    for a in range(1, 4):
        row = []
        for b in range(1, 4):
            c, d = CD_TABLE[(a, b)]
            gt, gtt = GEN_AT[canonical_position(a, b)]
            el = FreeElement.generator(n, NGEN, gt) * mono_eval(at, c)
            if gtt is not None and d is not None:
                el = el + FreeElement.generator(n, NGEN, gtt) * mono_eval(at, d)
            row.append(el)
        T.append(row)
    return T


def _fmat_mul(A: Sequence[Sequence], B: Sequence[Sequence]):
    """Product of 3x3 matrices whose entries multiply and add pairwise."""
    out = []
    for i in range(3):
        row = []
        for j in range(3):
            acc = None
            for k in range(3):
                p = A[i][k] * B[k][j]
                acc = p if acc is None else acc + p
            row.append(acc)
        out.append(row)
    return out


def _pim_entries(M: DMatrix) -> list[list[PimenovElement]]:
    return [[M.entry(i, j) for j in range(M.size)] for i in range(M.size)]


def rtt_relations(R: RMatrix, attachments: bool = True) -> RelationSet:
    """Entries of R T1 T2 - T2 T1 R: the 81 exchange relations."""
    sig, n = R.sig, R.sig.n_slots
    T = t_matrix(sig, attachments)

    def idx(i: int, k: int) -> int:
        return 3 * i + k

    TT1 = [[None] * 9 for _ in range(9)]
    TT2 = [[None] * 9 for _ in range(9)]
    for i, k, j, l in product(range(3), repeat=4):
        TT1[idx(i, k)][idx(j, l)] = T[i][j] * T[k][l]
        TT2[idx(i, k)][idx(j, l)] = T[k][l] * T[i][j]
    relations = []
    for al in range(9):
        for be in range(9):
            acc = FreeElement.zero(n, NGEN)
            for ga in range(9):
                r1 = R.mat.entry(al, ga)
                if not r1.is_zero():
                    acc = acc + TT1[ga][be] * r1
                r2 = R.mat.entry(ga, be)
                if not r2.is_zero():
                    acc = acc - TT2[al][ga] * r2
            if not acc.is_zero():
                relations.append(acc)
    return RelationSet(relations, label="exchange")


def orthogonality_relations(C: CMatrix, attachments: bool = True) -> RelationSet:
    """Entries of T C T^t - C and T^t C T - C (deformed orthogonality)."""
    sig, n = C.sig, C.sig.n_slots
    T = t_matrix(sig, attachments)
    Tt = [[T[j][i] for j in range(3)] for i in range(3)]
    Cp = _pim_entries(C.mat)
    relations = []
    for prod_mat in (_fmat_mul(_fmat_mul(T, Cp), Tt), _fmat_mul(_fmat_mul(Tt, Cp), T)):
        for i in range(3):
            for j in range(3):
                rel = prod_mat[i][j] - FreeElement.const(n, NGEN, Cp[i][j])
                if not rel.is_zero():
                    relations.append(rel)
    return RelationSet(relations, label="orthogonality")


def full_relations(sig: ParameterSignature, v: complex, attachments: bool = True) -> RelationSet:
    R = rmatrix3(sig, v)
    C = cmatrix(sig, v)
    rels = list(rtt_relations(R, attachments)) + list(
        orthogonality_relations(C, attachments)
    )
    return RelationSet(rels, label="full")


@lru_cache(maxsize=32)
def reduction_system(sig: ParameterSignature, v: complex) -> ReductionSystem:
    return build_reduction(full_relations(sig, v), sig.n_slots, NGEN)


def rtt_rank(sig: ParameterSignature, v: complex) -> int:
    """Independent count of the degree-2 exchange relations (rank oracle)."""
    return relation_rank(rtt_relations(rmatrix3(sig, v)))


# ---------------------------------------------------------------------------
# Hopf structure
# ---------------------------------------------------------------------------


def counit(x: FreeElement) -> PimenovElement:
    """Algebra map sending the generator matrix to the identity."""
    out = PimenovElement.scalar(x.n, 0.0)
    for (mask, word), c in x.terms.items():
        val = 1.0
        for g in word:
            val *= 1.0 if GEN_NAMES[g] in ("t11", "t22") else 0.0
            if val == 0.0:
                break
        if val:
            out = out + PimenovElement(x.n, {mask: c * val})
    return out


def counit_residual(sig: ParameterSignature, v: complex) -> float:
    return max(
        (counit(r).max_abs() for r in full_relations(sig, v)), default=0.0
    )


def _gen_position(g: int) -> tuple[tuple[int, int], bool]:
    """Canonical position of generator g and whether it is the tt partner."""
    for pos, (gt, gtt) in GEN_AT.items():
        if g == gt:
            return pos, False
        if g == gtt:
            return pos, True
    raise ValueError(f"unknown generator id {g}")


def coproduct_generator(sig: ParameterSignature, g: int) -> TensorElement:
    """Matrix coproduct T -> T (x). T pushed down to a single generator."""
    n = sig.n_slots
    (a, b), is_tt = _gen_position(g)
    c_ab, d_ab = CD_TABLE[(a, b)]
    out = TensorElement.zero(n, NGEN)
    for k in range(1, 4):
        c_ak, d_ak = CD_TABLE[(a, k)]
        c_kb, d_kb = CD_TABLE[(k, b)]
        gt_l, gtt_l = GEN_AT[canonical_position(a, k)]
        gt_r, gtt_r = GEN_AT[canonical_position(k, b)]
        if not is_tt:
            pieces = (
                (_mono_ratio(_mono_mul(c_ak, c_kb), c_ab), gt_l, gt_r),
                (_mono_ratio(_mono_mul(d_ak, d_kb), c_ab), gtt_l, gtt_r),
            )
        else:
            pieces = (
                (_mono_ratio(_mono_mul(c_ak, d_kb), d_ab), gt_l, gtt_r),
                (_mono_ratio(_mono_mul(d_ak, c_kb), d_ab), gtt_l, gt_r),
            )
        for mono, gl, gr in pieces:
            if mono is None or gl is None or gr is None:
                continue
            coeff = mono_eval(sig, mono)
            if coeff.is_zero():
                continue
            term = free_tensor(
                FreeElement.generator(n, NGEN, gl),
                FreeElement.generator(n, NGEN, gr),
            )
            out = out + term * coeff
    return out


def coproduct(sig: ParameterSignature, x: FreeElement) -> TensorElement:
    """Extend the generator coproduct multiplicatively to words."""
    n = x.n
    gens = {g for (_, w) in x.terms for g in w}
    table = {g: coproduct_generator(sig, g) for g in gens}
    out = TensorElement.zero(n, NGEN)
    unit = TensorElement(n, NGEN, {(0, (), ()): 1.0})
    for (mask, word), c in x.terms.items():
        acc = unit
        for g in word:
            acc = acc * table[g]
        acc = acc * PimenovElement(n, {mask: c})
        out = out + acc
    return out


def antipode_matrix(sig: ParameterSignature, v: complex) -> list[list[FreeElement]]:
    """S(T) = C T^t C^{-1}, entrywise over the free algebra."""
    T = t_matrix(sig)
    Tt = [[T[j][i] for j in range(3)] for i in range(3)]
    C = cmatrix(sig, v)
    Cp = _pim_entries(C.mat)
    Cip = _pim_entries(C.inv())
    return _fmat_mul(_fmat_mul(Cp, Tt), Cip)


def antipode_check(sig: ParameterSignature, v: complex) -> dict:
    """Reduce S(T)T - I and T S(T) - I modulo the relation ideal."""
    n = sig.n_slots
    sys = reduction_system(sig, v)
    T = t_matrix(sig)
    ST = antipode_matrix(sig, v)
    worst = 0.0
    failures = []
    for label, M in (("S(T)*T", _fmat_mul(ST, T)), ("T*S(T)", _fmat_mul(T, ST))):
        for i in range(3):
            for j in range(3):
                target = FreeElement.const(n, NGEN, 1.0 if i == j else 0.0)
                res = sys.reduce(M[i][j] - target).max_abs()
                worst = max(worst, res)
                if res > 1e-9:
                    failures.append((label, i + 1, j + 1, res))
    return {"residual": worst, "failures": failures, "pass": not failures}


def coproduct_compatibility(sig: ParameterSignature, v: complex) -> dict:
    """Delta(relation) must reduce to 0 in the tensor square."""
    sys = reduction_system(sig, v)
    worst = 0.0
    failures = []
    for i, rel in enumerate(full_relations(sig, v)):
        res = sys.reduce_tensor(coproduct(sig, rel)).max_abs()
        worst = max(worst, res)
        if res > 1e-9:
            failures.append((i, res))
    return {"residual": worst, "failures": failures, "pass": not failures}


# ---------------------------------------------------------------------------
# Contraction transform
# ---------------------------------------------------------------------------

# j-monomial (e1, e2) each primed generator picks up when the undeformed
# alphabet is rescaled into the contracted one.
_SUBST_EXPONENTS = {
    0: (0, 0),  # t11
    1: (1, 1),  # tt11
    2: (1, 0),  # t12
    3: (0, 1),  # tt12
    4: (0, 0),  # t13
    5: (1, 1),  # tt13
    6: (1, 0),  # t21
    7: (0, 1),  # tt21
    8: (0, 0),  # t22
}


def substitute_generators(sig: ParameterSignature, x: FreeElement) -> FreeElement:
    """Rescale each generator by its contraction j-monomial."""
    n = x.n
    out = FreeElement.zero(n, NGEN)
    for (mask, word), c in x.terms.items():
        coeff = PimenovElement(n, {mask: c})
        for g in word:
            e1, e2 = _SUBST_EXPONENTS[g]
            coeff = coeff * mono_eval(sig, (1, e1, e2))
        if not coeff.is_zero():
            out = out + FreeElement(n, NGEN, {(m, word): cc for m, cc in coeff.coeffs.items()})
    return out


def verify_contraction_transform(sig: ParameterSignature, v: complex) -> dict:
    """Relations built directly at sig vs the rescaled undeformed relations.

    The second route keeps the undeformed (all-slots-1) shape of the
    generator matrix, evaluates every coefficient kernel at the nilpotent
    argument Jv, and then rescales the generators; span equality with the
    direct construction is certified by mutual reduction to zero.
    """
    direct = list(full_relations(sig, v))
    substituted = [
        substitute_generators(sig, r)
        for r in full_relations(sig, v, attachments=False)
    ]
    substituted = [r for r in substituted if not r.is_zero()]
    n = sig.n_slots
    sys_a = build_reduction(RelationSet(direct), n, NGEN)
    sys_b = build_reduction(RelationSet(substituted), n, NGEN)
    res_ab = max((sys_a.reduce(r).max_abs() for r in substituted), default=0.0)
    res_ba = max((sys_b.reduce(r).max_abs() for r in direct), default=0.0)
    worst = max(res_ab, res_ba)
    return {
        "residual": worst,
        "direct_in_substituted": res_ba,
        "substituted_in_direct": res_ab,
        "pass": worst <= 1e-9,
    }


# ---------------------------------------------------------------------------
# Relation JSON schema
# ---------------------------------------------------------------------------


def relations_to_json(rs: RelationSet) -> dict:
    out = []
    for rel in rs:
        terms = []
        for (mask, word), c in sorted(rel.terms.items()):
            iotas = [k + 1 for k in range(rel.n) if mask >> k & 1]
            terms.append(
                {
                    "iota": iotas,
                    "word": [GEN_NAMES[g] for g in word],
                    "re": c.real,
                    "im": c.imag,
                }
            )
        out.append({"terms": terms})
    return {"relations": out}


def relations_from_json(data: dict, n: int) -> RelationSet:
    rels = []
    for rel in data["relations"]:
        terms: dict[tuple[int, tuple[int, ...]], complex] = {}
        for t in rel["terms"]:
            mask = 0
            for k in t.get("iota", []):
                mask |= 1 << (k - 1)
            word = tuple(GEN_INDEX[w] for w in t["word"])
            terms[(mask, word)] = terms.get((mask, word), 0j) + complex(
                t.get("re", 0.0), t.get("im", 0.0)
            )
        rels.append(FreeElement(n, NGEN, terms))
    return RelationSet(rels, label="ingested")


def relations_json_str(rs: RelationSet) -> str:
    return json.dumps(relations_to_json(rs), sort_keys=True)
