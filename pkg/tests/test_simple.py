from __future__ import annotations

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fqm import qstate, simple
from fqm.gf2 import DimensionError, Subspace
from fqm.simple import KeyIssueError, ParamError, SimpleBank, SimpleParams


def test_param_defaults():
    p = SimpleParams(64)
    assert (p.t, p.collusion_c, p.big_n, p.lam) == (8, 2, 10, 64)
    p = SimpleParams(16)
    assert (p.t, p.collusion_c) == (4, 1)
    assert list(p.honest_ids) == list(range(1, 10))
    assert list(p.adversary_ids) == [10]
    assert SimpleParams(8, t=0).collusion_c == 0


@pytest.mark.parametrize("n", [0, -4, 6, 18])
def test_param_rejects_n(n):
    with pytest.raises(ParamError) as exc:
        SimpleParams(n)
    assert exc.value.field == "n"


def test_param_rejects_counts():
    with pytest.raises(ParamError) as exc:
        SimpleParams(16, big_n=1, collusion_c=3)
    assert exc.value.field == "big_n"
    with pytest.raises(ParamError):
        SimpleParams(16, t=-1)


def test_setup_structure():
    p = SimpleParams(36)
    msk = simple.setup(p, np.random.default_rng(0))
    assert msk.a.dim == 18
    perp = msk.a.complement()
    assert len(msk.v_list) == len(msk.w_list) == 18
    assert all(msk.a.member(v) for v in msk.v_list)
    assert all(perp.member(w) for w in msk.w_list)
    assert len(msk.index_sets) == p.big_n
    for i_set, j_set in msk.index_sets:
        assert len(i_set) == len(j_set) == p.t
        assert all(1 <= i <= 18 for i in i_set + j_set)


def test_setup_reproducible():
    p = SimpleParams(16)
    a = simple.setup(p, np.random.default_rng(9))
    b = simple.setup(p, np.random.default_rng(9))
    assert a == b


def test_franchise_matches_master_key():
    msk = simple.setup(SimpleParams(16), np.random.default_rng(1))
    for key_id in range(1, 11):
        svk = simple.franchise(msk, key_id)
        assert svk.v_space == msk.v_space(key_id)
        assert svk.w_space == msk.w_space(key_id)
        assert svk.v_space <= msk.a
        assert svk.w_space <= msk.a.complement()
    with pytest.raises(KeyIssueError):
        simple.franchise(msk, 11)
    with pytest.raises(KeyIssueError):
        simple.franchise(msk, 0)


def test_bank_refuses_reissue():
    msk = simple.setup(SimpleParams(8), np.random.default_rng(1))
    bank = SimpleBank(msk)
    first = bank.franchise()
    assert first.id == 1
    with pytest.raises(KeyIssueError):
        bank.franchise(1)
    for _ in range(msk.params.big_n - 1):
        bank.franchise()
    with pytest.raises(KeyIssueError):
        bank.franchise()


@pytest.mark.parametrize("n", [8, 16, 36, 64])
@given(seed=st.integers(0, 2**32))
def test_correctness_exact(n, seed):
    rng = np.random.default_rng(seed)
    msk = simple.setup(SimpleParams(n), rng)
    note = simple.mint(msk)
    svk = simple.franchise(msk, int(rng.integers(1, msk.params.big_n + 1)))
    res = simple.verify(svk, note, rng)
    assert res.accepted and res.stage == "accepted"
    assert res.probability == 1
    assert res.note.state == note.state


def test_dense_and_symbolic_agree_on_honest_note():
    rng = np.random.default_rng(4)
    msk = simple.setup(SimpleParams(12), rng)
    svk = simple.franchise(msk, 3)
    dense = simple.mint(msk, "dense")
    res = simple.verify(svk, dense, rng)
    assert res.accepted
    assert qstate.dense_fidelity(res.note.state, dense.state) == pytest.approx(1, abs=1e-12)
    with pytest.raises(ValueError):
        simple.mint(msk, "tensor-network")


def test_full_verification_key():
    msk = simple.setup(SimpleParams(16), np.random.default_rng(2))
    full_key = simple.full_verification_key(msk)
    assert full_key.v_space == msk.a
    assert full_key.w_space == msk.a.complement()


def test_rejection_stages_and_destroyed_note():
    rng = np.random.default_rng(7)
    msk = simple.setup(SimpleParams(16, t=6), rng)
    svk = simple.franchise(msk, 1)
    # a basis state outside W^perp fails the computational test for sure
    w_perp = svk.w_space.complement()
    x = next(x for x in range(1 << 16) if not w_perp.member(x))
    bad = simple.SimpleBanknote(qstate.CosetState(Subspace.zero(16), x, 0))
    res = simple.verify(svk, bad, rng)
    assert not res.accepted and res.stage == "computational" and res.probability == 0
    assert res.note.state is None
    again = simple.verify(svk, res.note, rng)
    assert again.stage == "malformed"
    # |0> passes the first test; the Fourier test passes with probability 2^-dim V
    zero = simple.SimpleBanknote(qstate.coset_from_subspace(Subspace.zero(16)))
    p, _ = simple.acceptance(svk, zero)
    assert p == Fraction(1, 2 ** svk.v_space.dim)


def test_verify_dimension_mismatch():
    rng = np.random.default_rng(0)
    msk = simple.setup(SimpleParams(8), rng)
    other = simple.mint(simple.setup(SimpleParams(12), rng))
    with pytest.raises(DimensionError):
        simple.verify(simple.franchise(msk, 1), other, rng)


def test_sampled_outcomes_follow_probability():
    rng = np.random.default_rng(11)
    msk = simple.setup(SimpleParams(16), rng)
    svk = simple.franchise(msk, 2)
    note = simple.SimpleBanknote(qstate.coset_from_subspace(Subspace.zero(16)))
    p = float(simple.acceptance(svk, note)[0])
    hits = sum(simple.verify(svk, note, rng).accepted for _ in range(4000))
    sigma = np.sqrt(p * (1 - p) / 4000)
    assert abs(hits / 4000 - p) < 4 * sigma
