from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fqm import full, qstate, simple
from fqm.full import BanknoteFormatError, FullBanknote, FullParams
from fqm.gf2 import Subspace, sample_subspace
from fqm.simple import ParamError


@pytest.fixture(scope="module")
def bank():
    rng = np.random.default_rng(5)
    p = FullParams(16)
    return p, full.setup(p, rng)


def test_params():
    p = FullParams(64)
    assert (p.t, p.lam, p.half) == (8, 64, 32)
    with pytest.raises(ParamError):
        FullParams(10)


def test_franchise_index_offsets(bank):
    p, msk = bank
    svk = full.franchise(msk, np.random.default_rng(0))
    assert len(svk.i_set) == len(svk.j_set) == p.t
    assert all(1 <= i <= p.half for i in svk.i_set + svk.j_set)
    for i, k in zip(svk.i_set, svk.v_keys):
        assert k == msk.enc_keys[i - 1]
    for j, k in zip(svk.j_set, svk.w_keys):
        assert k == msk.enc_keys[p.half + j - 1]


def test_note_ciphertexts_decrypt_into_the_right_spaces(bank):
    p, msk = bank
    note = full.mint(msk, p, np.random.default_rng(1))
    a = note.state.space
    perp = a.complement()
    assert a.dim == p.half and len(note.ciphertexts) == p.n
    prov = msk.provider
    for idx, c in enumerate(note.ciphertexts):
        x = int.from_bytes(prov.dec(msk.enc_keys[idx], c), "little")
        assert (a if idx < p.half else perp).member(x)
    assert len(set(note.ciphertexts)) == p.n


@pytest.mark.parametrize("provider", ["standard", "fast"])
@given(seed=st.integers(0, 2**32))
@settings(max_examples=15)
def test_correctness(provider, seed):
    rng = np.random.default_rng(seed)
    p = FullParams(16)
    msk = full.setup(p, rng, provider)
    note = full.mint(msk, p, rng)
    for _ in range(3):
        res = full.verify(full.franchise(msk, rng), note, rng)
        assert res.accepted and res.probability == 1
        assert res.note.state == note.state
        note = res.note


def test_each_mint_uses_a_fresh_subspace(bank):
    p, msk = bank
    rng = np.random.default_rng(2)
    spaces = {full.mint(msk, p, rng).state.space for _ in range(100)}
    assert len(spaces) == 100


def test_single_bit_mutations_fail_signature(bank):
    p, msk = bank
    rng = np.random.default_rng(3)
    note = full.mint(msk, p, rng)
    svk = full.franchise(msk, rng)
    for _ in range(60):
        k = int(rng.integers(0, p.n + 1))
        if k == p.n:
            sig = bytearray(note.signature)
            pos = int(rng.integers(0, len(sig) * 8))
            sig[pos // 8] ^= 1 << (pos % 8)
            bad = FullBanknote(note.state, note.ciphertexts, bytes(sig))
        else:
            c = bytearray(note.ciphertexts[k])
            pos = int(rng.integers(0, len(c) * 8))
            c[pos // 8] ^= 1 << (pos % 8)
            cts = note.ciphertexts[:k] + (bytes(c),) + note.ciphertexts[k + 1 :]
            bad = FullBanknote(note.state, cts, note.signature)
        res = full.verify(svk, bad, rng)
        assert not res.accepted and res.stage == "signature"


def test_cross_note_signature_does_not_transfer(bank):
    p, msk = bank
    rng = np.random.default_rng(4)
    n1, n2 = full.mint(msk, p, rng), full.mint(msk, p, rng)
    svk = full.franchise(msk, rng)
    assert full.verify(svk, FullBanknote(n1.state, n1.ciphertexts, n2.signature), rng).stage == "signature"
    # a foreign bank's key rejects the signature as well
    other = full.setup(p, rng)
    assert full.verify(full.franchise(other, rng), n1, rng).stage == "signature"


def test_malformed_notes(bank):
    p, msk = bank
    rng = np.random.default_rng(6)
    note = full.mint(msk, p, rng)
    svk = full.franchise(msk, rng)
    assert full.verify(svk, FullBanknote(None, note.ciphertexts, note.signature), rng).stage == "malformed"
    short = FullBanknote(note.state, note.ciphertexts[:-1], note.signature)
    assert full.verify(svk, short, rng).stage == "malformed"
    assert full.acceptance(svk, short) == (0, None)
    with pytest.raises(ParamError):
        full.mint(msk, FullParams(8), rng)


def test_swapped_state_is_checked_by_quantum_tests(bank):
    p, msk = bank
    rng = np.random.default_rng(7)
    n1, n2 = full.mint(msk, p, rng), full.mint(msk, p, rng)
    svk = full.franchise(msk, rng)
    swapped = FullBanknote(n2.state, n1.ciphertexts, n1.signature)
    prob, _ = full.acceptance(svk, swapped)
    v, w = full.key_spaces(svk, n1)
    assert prob == qstate.acceptance_probability(n2.state.space, v, w)
    assert prob < 1


@given(seed=st.integers(0, 2**32))
@settings(max_examples=30)
def test_quantum_stage_equals_single_subspace_pipeline(seed):
    rng = np.random.default_rng(seed)
    n = 8
    b = sample_subspace(n, int(rng.integers(0, n + 1)), rng)
    v = sample_subspace(n, int(rng.integers(0, n + 1)), rng)
    w = sample_subspace(n, int(rng.integers(0, n + 1)), rng)
    st_ = qstate.coset_from_subspace(b)
    note = FullBanknote(st_, (), b"")
    a = full.verify_quantum(note, v, w, np.random.default_rng(seed))
    s = simple.run_pipeline(st_, v, w, np.random.default_rng(seed))
    assert (a.accepted, a.stage, a.probability) == (s[0], s[2], s[3])
    assert a.note.state == s[1]


def test_dense_note_verifies(bank):
    p, msk = bank
    rng = np.random.default_rng(8)
    p8 = FullParams(8)
    msk8 = full.setup(p8, rng, "fast")
    note = full.mint(msk8, p8, rng, "dense")
    res = full.verify(full.franchise(msk8, rng), note, rng)
    assert res.accepted
    assert res.probability == pytest.approx(1)


# --- wire format -----------------------------------------------------------


def test_serialize_roundtrip_corpus():
    for seed in range(100):
        rng = np.random.default_rng(seed)
        n = (4, 8, 12, 16)[seed % 4]
        p = FullParams(n)
        msk = full.setup(p, rng, ("standard", "fast")[seed % 2])
        note = full.mint(msk, p, rng, "dense" if seed % 5 == 0 and n <= 12 else "symbolic")
        raw = full.serialize(note)
        back = full.deserialize(raw)
        assert full.serialize(back) == raw
        assert back.ciphertexts == note.ciphertexts and back.signature == note.signature
        assert full.verify(full.franchise(msk, rng), back, rng).accepted


def test_simple_note_roundtrip():
    rng = np.random.default_rng(0)
    msk = simple.setup(simple.SimpleParams(12), rng)
    note = simple.mint(msk)
    back = full.deserialize(full.serialize(note))
    assert isinstance(back, simple.SimpleBanknote)
    assert back.state == note.state


def test_header_layout(bank):
    p, msk = bank
    raw = full.serialize(full.mint(msk, p, np.random.default_rng(9)))
    assert raw[:4] == b"FQM1"
    assert raw[4] == full.VERSION
    assert int.from_bytes(raw[5:7], "big") == 16
    assert raw[7] == 0
    assert int.from_bytes(raw[8:10], "big") == 8


def test_format_errors(bank):
    p, msk = bank
    raw = full.serialize(full.mint(msk, p, np.random.default_rng(10)))
    for cut in (0, 3, 9, len(raw) // 2, len(raw) - 1):
        with pytest.raises(BanknoteFormatError):
            full.deserialize(raw[:cut])
    with pytest.raises(BanknoteFormatError, match="magic"):
        full.deserialize(b"XQM1" + raw[4:])
    with pytest.raises(BanknoteFormatError, match="version"):
        full.deserialize(raw[:4] + b"\x09" + raw[5:])
    with pytest.raises(BanknoteFormatError, match="trailing"):
        full.deserialize(raw + b"\x00")
    with pytest.raises(BanknoteFormatError, match="tag"):
        full.deserialize(raw[:7] + b"\x07" + raw[8:])
    # duplicate first basis row into the second slot
    row = raw[10:12]
    with pytest.raises(BanknoteFormatError, match="dependent"):
        full.deserialize(raw[:12] + row + raw[14:])


def test_destroyed_note_cannot_be_serialized():
    with pytest.raises(ValueError):
        full.serialize(FullBanknote(None, (), b""))


def test_cross_key_acceptance_matches_closed_form(bank):
    p, msk = bank
    rng = np.random.default_rng(12)
    note = full.mint(msk, p, rng)
    b = Subspace.zero(p.n)
    svk = full.franchise(msk, rng)
    fake = FullBanknote(qstate.coset_from_subspace(b), note.ciphertexts, note.signature)
    prob, _ = full.acceptance(svk, fake)
    v, _ = full.key_spaces(svk, note)
    assert prob == pytest.approx(2.0 ** -v.dim)
