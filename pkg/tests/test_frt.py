"""Tests for the N=3 quantum-group module: exchange matrix, quadratic
relations, quotient well-definedness and Hopf structure."""

import cmath
import json

import numpy as np
import pytest

from ckq import frt
from ckq.dmat import DMatrix
from ckq.free_algebra import confluence_check, relation_rank
from ckq.pimenov import ParameterSignature

QUANTUM_SIGS = ["1,1", "1,n", "n,1", "n,n"]
CONTRACTED_SIGS = ["1,n", "n,1", "n,n"]
V_SAMPLES = [0.37, 0.61 + 0.29j]

# rank of the exchange-relation space, frozen from the rank oracle
FROZEN_RANK = {"1,1": 46, "1,n": 44, "n,1": 44, "n,n": 29}


def sig_of(text):
    return ParameterSignature.parse(text)


def golden_entries(v):
    """Nonzero entries of the 9x9 exchange matrix at the trivial signature
    (1-based positions)."""
    ep, em = cmath.exp(v), cmath.exp(-v)
    em2, sh = cmath.exp(-v / 2), cmath.sinh(v)
    return {
        (1, 1): ep,
        (2, 2): 1,
        (3, 3): em,
        (4, 2): 2 * sh,
        (4, 4): 1,
        (5, 3): -2 * em2 * sh,
        (5, 5): 1,
        (6, 6): 1,
        (7, 3): 2 * (1 - em) * sh,
        (7, 5): -2 * em2 * sh,
        (7, 7): em,
        (8, 6): 2 * sh,
        (8, 8): 1,
        (9, 9): ep,
    }


# -- exchange matrix --------------------------------------------------------


@pytest.mark.parametrize("v", V_SAMPLES)
def test_rmatrix_golden_table(v):
    R = frt.rmatrix3(sig_of("1,1"), v)
    gold = golden_entries(v)
    for i in range(9):
        for j in range(9):
            want = gold.get((i + 1, j + 1), 0)
            got = R.mat.entry(i, j).scalar_part
            assert abs(got - want) <= 1e-12, (i + 1, j + 1)


@pytest.mark.parametrize("sig_text", CONTRACTED_SIGS)
def test_contracted_rmatrix_structure(sig_text):
    R = frt.rmatrix3(sig_of(sig_text), 0.37)
    assert frt.contracted_structure_residual(R) == 0.0


def test_rmatrix_rejects_imaginary_slots():
    with pytest.raises(ValueError):
        frt.rmatrix3(ParameterSignature.parse("i,1"), 0.37)


# -- Yang-Baxter ------------------------------------------------------------


@pytest.mark.parametrize("sig_text", QUANTUM_SIGS)
@pytest.mark.parametrize("v", V_SAMPLES)
def test_qybe(sig_text, v):
    assert frt.qybe_check(frt.rmatrix3(sig_of(sig_text), v)) <= 1e-10


def test_qybe_negative_control():
    R = frt.rmatrix3(sig_of("1,1"), 0.37)
    R.mat.blocks[0][3, 1] += 0.2
    assert frt.qybe_check(R) > 1e-2


# -- quotient ---------------------------------------------------------------


@pytest.mark.parametrize("sig_text", QUANTUM_SIGS)
def test_confluence_all_words(sig_text):
    sys = frt.reduction_system(sig_of(sig_text), 0.37)
    rep = confluence_check(sys)
    assert rep["words_checked"] == 9**3
    assert rep["confluent"], rep["failing_words"][:5]
    assert rep["max_discrepancy"] <= 1e-9


@pytest.mark.parametrize("sig_text", QUANTUM_SIGS)
@pytest.mark.parametrize("v", V_SAMPLES)
def test_rank_matches_frozen_oracle(sig_text, v):
    assert frt.rtt_rank(sig_of(sig_text), v) == FROZEN_RANK[sig_text]


def test_corrupted_relations_change_rank():
    # mutating one exchange-matrix entry is detectable as a rank jump
    R = frt.rmatrix3(sig_of("1,1"), 0.37)
    R.mat.blocks[0][3, 1] += 0.2
    rank = relation_rank(frt.rtt_relations(R))
    assert rank != FROZEN_RANK["1,1"]


def test_orthogonality_relations_annihilated_by_counit():
    sig = sig_of("1,1")
    C = frt.cmatrix(sig, 0.37)
    for rel in frt.orthogonality_relations(C):
        assert frt.counit(rel).max_abs() <= 1e-12


# -- Hopf structure ---------------------------------------------------------


@pytest.mark.parametrize("sig_text", QUANTUM_SIGS)
def test_counit_annihilates_relations(sig_text):
    assert frt.counit_residual(sig_of(sig_text), 0.37) == 0.0


@pytest.mark.parametrize("sig_text", QUANTUM_SIGS)
def test_antipode(sig_text):
    rep = frt.antipode_check(sig_of(sig_text), 0.37)
    assert rep["pass"], rep
    assert rep["residual"] <= 1e-9


@pytest.mark.parametrize("sig_text", QUANTUM_SIGS)
def test_coproduct_compatible_with_relations(sig_text):
    rep = frt.coproduct_compatibility(sig_of(sig_text), 0.37)
    assert rep["pass"], rep
    assert rep["residual"] <= 1e-9


# -- contraction ------------------------------------------------------------


@pytest.mark.parametrize("sig_text", CONTRACTED_SIGS)
def test_contraction_transform(sig_text):
    rep = frt.verify_contraction_transform(sig_of(sig_text), 0.37)
    assert rep["pass"], rep
    assert rep["residual"] <= 1e-9


# -- serialization ----------------------------------------------------------


def test_relation_json_round_trip():
    sig = sig_of("1,n")
    rs = frt.full_relations(sig, 0.37)
    text = frt.relations_json_str(rs)
    data = json.loads(text)
    assert "relations" in data and len(data["relations"]) == len(rs)
    back = frt.relations_from_json(data, sig.n_slots)
    worst = max(
        (a - b).max_abs() for a, b in zip(rs.relations, back.relations)
    )
    assert worst <= 1e-12
