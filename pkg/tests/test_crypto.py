from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from fqm.crypto import PROVIDERS, DecryptionError, EncKey, get_provider

providers = pytest.mark.parametrize("name", sorted(PROVIDERS))


@providers
def test_keygen_deterministic_and_distinct(name):
    prov = get_provider(name)
    a = prov.sig_keygen(128, np.random.default_rng(1))
    b = prov.sig_keygen(128, np.random.default_rng(1))
    c = prov.sig_keygen(128, np.random.default_rng(2))
    assert a == b and a != c
    assert prov.enc_keygen(128, np.random.default_rng(1)) == prov.enc_keygen(128, np.random.default_rng(1))
    assert len(prov.enc_keygen(128, np.random.default_rng(1)).key) == 16
    assert len(prov.enc_keygen(256, np.random.default_rng(1)).key) == 32


@providers
@given(msg=st.binary(max_size=200), seed=st.integers(0, 2**32))
def test_sign_roundtrip_and_tamper(name, msg, seed):
    prov = get_provider(name)
    kp = prov.sig_keygen(128, np.random.default_rng(seed))
    sig = prov.sign(kp.secret_key, msg)
    assert prov.sig_ver(kp.public_key, msg, sig)
    bad_sig = bytes([sig[0] ^ 1]) + sig[1:]
    assert not prov.sig_ver(kp.public_key, msg, bad_sig)
    assert not prov.sig_ver(kp.public_key, msg + b"\x00", sig)
    if msg:
        flipped = bytes([msg[0] ^ 0x80]) + msg[1:]
        assert not prov.sig_ver(kp.public_key, flipped, sig)


@providers
def test_sig_ver_never_raises(name):
    prov = get_provider(name)
    kp = prov.sig_keygen(128, np.random.default_rng(0))
    assert not prov.sig_ver(kp.public_key, b"m", b"")
    assert not prov.sig_ver(b"short", b"m", b"x" * 64)
    assert not prov.sig_ver(kp.public_key, b"m", b"x" * 3)


@providers
@given(msg=st.binary(max_size=100), seed=st.integers(0, 2**32))
def test_enc_roundtrip_randomized_fixed_overhead(name, msg, seed):
    prov = get_provider(name)
    rng = np.random.default_rng(seed)
    k = prov.enc_keygen(128, rng)
    c1 = prov.enc(k, msg, rng)
    c2 = prov.enc(k, msg, rng)
    assert prov.dec(k, c1) == msg == prov.dec(k, c2)
    assert c1 != c2
    assert len(c1) == len(msg) + prov.overhead()


def test_standard_dec_authenticates():
    prov = get_provider("standard")
    rng = np.random.default_rng(5)
    k, other = prov.enc_keygen(128, rng), prov.enc_keygen(128, rng)
    ct = prov.enc(k, b"payload", rng)
    with pytest.raises(DecryptionError):
        prov.dec(other, ct)
    with pytest.raises(DecryptionError):
        prov.dec(k, ct[:-1] + bytes([ct[-1] ^ 1]))
    with pytest.raises(DecryptionError):
        prov.dec(k, b"tiny")


def test_fast_wrong_key_gives_garbage():
    prov = get_provider("fast")
    rng = np.random.default_rng(5)
    k = prov.enc_keygen(128, rng)
    ct = prov.enc(k, b"payload!", rng)
    assert prov.dec(EncKey(b"\x00" * 16), ct) != b"payload!"
    with pytest.raises(DecryptionError):
        prov.dec(k, b"short")


def test_unknown_provider():
    with pytest.raises(ValueError, match="unknown crypto provider"):
        get_provider("rot13")
