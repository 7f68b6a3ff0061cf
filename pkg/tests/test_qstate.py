from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fqm import qstate
from fqm.gf2 import DimensionError, GF2Vector, Subspace, sample_subspace
from fqm.qstate import CosetState, DenseCapError, DenseState

from conftest import span_set, subspaces


@st.composite
def cosets(draw, n=None, max_n=7):
    s = draw(subspaces(n=n, max_n=max_n))
    a = draw(st.integers(0, (1 << s.n) - 1))
    c = draw(st.integers(0, (1 << s.n) - 1))
    return CosetState(s, GF2Vector(a, s.n), GF2Vector(c, s.n))


def explicit_amplitudes(st_: CosetState) -> np.ndarray:
    """Amplitudes written straight from the definition, one basis vector at a time."""
    n = st_.n
    amps = np.zeros(1 << n, dtype=complex)
    elems = span_set(st_.space)
    for x in elems:
        sign = (-1) ** bin(st_.character.bits & x).count("1")
        amps[x ^ st_.shift.bits] = sign / np.sqrt(len(elems))
    return amps


def explicit_hadamard(amps: np.ndarray) -> np.ndarray:
    n = int(np.log2(amps.size))
    h = np.array([[1.0]])
    for _ in range(n):
        h = np.kron(h, np.array([[1, 1], [1, -1]]) / np.sqrt(2))
    return h @ amps


def overlap(a: np.ndarray, b: np.ndarray) -> float:
    return abs(np.vdot(a, b)) ** 2


@given(cosets())
def test_to_dense_matches_definition(c):
    assert overlap(qstate.to_dense(c).amplitudes, explicit_amplitudes(c)) == pytest.approx(1, abs=1e-12)


@given(cosets())
def test_canonical_form_is_same_state(c):
    raw = explicit_amplitudes(c)
    # the stored shift/character are reduced; rebuilding from any representative agrees
    shifted = CosetState(c.space, GF2Vector(c.shift.bits ^ next(iter(c.space.rows), 0), c.n), c.character)
    assert shifted == c
    assert overlap(qstate.to_dense(shifted).amplitudes, raw) == pytest.approx(1, abs=1e-12)


@given(cosets())
def test_hadamard_symbolic_matches_matrix(c):
    want = explicit_hadamard(explicit_amplitudes(c))
    got = qstate.to_dense(qstate.hadamard_all(c)).amplitudes
    assert overlap(got, want) == pytest.approx(1, abs=1e-10)
    fwht = qstate.dense_hadamard_all(qstate.to_dense(c)).amplitudes
    assert np.allclose(fwht, want, atol=1e-12)


@given(cosets(), st.data())
def test_projection_symbolic_matches_dense(c, data):
    t = data.draw(subspaces(n=c.n))
    sym = qstate.project_membership(c, t)
    dense = qstate.dense_project_membership(qstate.to_dense(c), t)
    assert float(sym.accept_probability) == pytest.approx(dense.accept_probability, abs=1e-12)
    if sym.accepted_state is None:
        assert dense.accepted_state is None
    else:
        f = qstate.dense_fidelity(qstate.to_dense(sym.accepted_state), dense.accepted_state)
        assert f == pytest.approx(1, abs=1e-10)


@given(cosets(max_n=6), st.data())
def test_fidelity_matches_dense(c, data):
    d = data.draw(cosets(n=c.n))
    want = overlap(explicit_amplitudes(c), explicit_amplitudes(d))
    assert float(qstate.fidelity(c, d)) == pytest.approx(want, abs=1e-12)
    assert qstate.fidelity(c, c) == 1


@given(subspaces(max_n=7), st.data())
def test_acceptance_closed_form_vs_pipeline(b, data):
    v = data.draw(subspaces(n=b.n))
    w = data.draw(subspaces(n=b.n))
    closed = qstate.acceptance_probability(b, v, w)
    sym, _ = qstate.verify_probability(qstate.coset_from_subspace(b), v, w)
    dense, _ = qstate.dense_verify_probability(qstate.to_dense(qstate.coset_from_subspace(b)), v, w)
    assert closed == sym
    assert float(closed) == pytest.approx(dense, abs=1e-10)
    assert closed.denominator & (closed.denominator - 1) == 0  # power of two


def test_acceptance_examples():
    n = 4
    a = Subspace.from_text("1000\n0100")
    perp = a.complement()
    assert qstate.acceptance_probability(a, a, perp) == 1
    # |0> passes the computational test, then only a dim-0 V^perp test would pass surely
    zero = Subspace.zero(n)
    assert qstate.acceptance_probability(zero, a, perp) == Fraction(1, 4)
    assert qstate.acceptance_probability(Subspace.full(n), a, perp) == Fraction(1, 4)


def test_verify_keeps_honest_state():
    rng = np.random.default_rng(0)
    a = sample_subspace(10, 5, rng)
    st_ = qstate.coset_from_subspace(a)
    p, post = qstate.verify_probability(st_, a, a.complement())
    assert p == 1 and post == st_


def test_register_offsets_act_locally():
    rng = np.random.default_rng(1)
    a = sample_subspace(3, 1, rng)
    b = sample_subspace(3, 2, rng)
    joint = np.kron(qstate.to_dense(qstate.coset_from_subspace(b)).amplitudes,
                    qstate.to_dense(qstate.coset_from_subspace(a)).amplitudes)
    st_ = DenseState(6, joint)
    # Hadamard on the high register only
    h = qstate.dense_hadamard_all(st_, 3, 3)
    want = np.kron(qstate.to_dense(qstate.coset_from_subspace(b.complement())).amplitudes,
                   qstate.to_dense(qstate.coset_from_subspace(a)).amplitudes)
    assert qstate.dense_fidelity(h, DenseState(6, want)) == pytest.approx(1)
    t = sample_subspace(3, 1, rng)
    out = qstate.dense_project_membership(st_, t, offset=3)
    sym = qstate.project_membership(qstate.coset_from_subspace(b), t)
    assert out.accept_probability == pytest.approx(float(sym.accept_probability))
    with pytest.raises(DimensionError):
        qstate.dense_project_membership(st_, t, offset=4)
    with pytest.raises(DimensionError):
        qstate.dense_project_membership(st_, t)


def test_dense_state_validation():
    with pytest.raises(ValueError):
        DenseState(2, np.ones(4))
    with pytest.raises(DimensionError):
        DenseState(2, np.ones(3) / np.sqrt(3))
    with pytest.raises(DenseCapError):
        qstate.to_dense(qstate.coset_from_subspace(Subspace.zero(qstate.DENSE_CAP + 1)))
    st_ = DenseState.basis_state(3, 5)
    with pytest.raises(ValueError):
        st_.amplitudes[0] = 1


def test_dense_branches_are_kept(rng):
    st_ = DenseState.random(4, rng)
    t = Subspace.from_text("1000\n0100")
    out = qstate.dense_project_membership(st_, t)
    assert 0 < out.accept_probability < 1
    assert out.rejected_state is not None
    # the two branches are orthogonal and recombine to the input
    assert qstate.dense_fidelity(out.accepted_state, out.rejected_state) == pytest.approx(0, abs=1e-12)
    recombined = (np.sqrt(out.accept_probability) * out.accepted_state.amplitudes
                  + np.sqrt(1 - out.accept_probability) * out.rejected_state.amplitudes)
    assert np.allclose(recombined, st_.amplitudes)


def test_text_form_roundtrip():
    c = CosetState(Subspace.from_text("110\n011"), GF2Vector.from_str("001"), GF2Vector.from_str("100"))
    assert CosetState.from_text(c.to_text()) == c
    zero = qstate.coset_from_subspace(Subspace.zero(3))
    assert CosetState.from_text(zero.to_text()) == zero
    with pytest.raises(ValueError):
        CosetState.from_text("101")
