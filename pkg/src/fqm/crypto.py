"""Signature and secret-key encryption providers for the full scheme.

Two interchangeable providers expose the same byte-oriented interface:

``StandardProvider``
    Ed25519 signatures and AES-GCM encryption from ``cryptography``.
``FastProvider``
    HMAC-SHA256 tags and a SHA-256 counter-mode keystream.  Deterministic and
    quick, but the "public" key equals the secret key, so it only offers
    tamper detection.  Meant for tests and large Monte-Carlo sweeps.

All key generation and encryption randomness is drawn from an explicit numpy
``Generator`` so that every experiment can be replayed from its seed.  A
seeded PCG64 stream is not a cryptographic RNG; that is acceptable for a
simulator and would not be for deployment.
"""
from __future__ import annotations

import hashlib
import hmac
from dataclasses import dataclass

import numpy as np
from cryptography.exceptions import InvalidSignature, InvalidTag
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)
from cryptography.hazmat.primitives.ciphers.aead import AESGCM


class DecryptionError(ValueError):
    """Ciphertext failed authentication or is structurally invalid."""


@dataclass(frozen=True)
class SigKeyPair:
    public_key: bytes
    secret_key: bytes


@dataclass(frozen=True)
class EncKey:
    key: bytes


def _enc_key_len(lam: int) -> int:
    return 16 if lam <= 128 else 32


class StandardProvider:
    name = "standard"
    nonce_len = 12
    tag_len = 16

    def sig_keygen(self, lam: int, rng: np.random.Generator) -> SigKeyPair:
        sk = Ed25519PrivateKey.from_private_bytes(rng.bytes(32))
        pk = sk.public_key().public_bytes_raw()
        return SigKeyPair(pk, sk.private_bytes_raw())

    def sign(self, sk: bytes, msg: bytes) -> bytes:
        return Ed25519PrivateKey.from_private_bytes(sk).sign(msg)

    def sig_ver(self, pk: bytes, msg: bytes, sig: bytes) -> bool:
        try:
            Ed25519PublicKey.from_public_bytes(bytes(pk)).verify(bytes(sig), bytes(msg))
        except (InvalidSignature, ValueError, TypeError):
            return False
        return True

    def enc_keygen(self, lam: int, rng: np.random.Generator) -> EncKey:
        return EncKey(rng.bytes(_enc_key_len(lam)))

    def enc(self, k: EncKey, msg: bytes, rng: np.random.Generator) -> bytes:
        nonce = rng.bytes(self.nonce_len)
        return nonce + AESGCM(k.key).encrypt(nonce, msg, None)

    def dec(self, k: EncKey, ct: bytes) -> bytes:
        if len(ct) < self.nonce_len + self.tag_len:
            raise DecryptionError("ciphertext too short")
        try:
            return AESGCM(k.key).decrypt(ct[: self.nonce_len], ct[self.nonce_len :], None)
        except InvalidTag as exc:
            raise DecryptionError("authentication failed") from exc

    def overhead(self) -> int:
        return self.nonce_len + self.tag_len


class FastProvider:
    name = "fast"
    nonce_len = 16

    def sig_keygen(self, lam: int, rng: np.random.Generator) -> SigKeyPair:
        key = rng.bytes(32)
        return SigKeyPair(key, key)

    def sign(self, sk: bytes, msg: bytes) -> bytes:
        return hmac.new(sk, msg, hashlib.sha256).digest()

    def sig_ver(self, pk: bytes, msg: bytes, sig: bytes) -> bool:
        try:
            expected = hmac.new(bytes(pk), bytes(msg), hashlib.sha256).digest()
        except TypeError:
            return False
        return hmac.compare_digest(expected, bytes(sig))

    def enc_keygen(self, lam: int, rng: np.random.Generator) -> EncKey:
        return EncKey(rng.bytes(_enc_key_len(lam)))

    @staticmethod
    def _keystream(key: bytes, nonce: bytes, length: int) -> bytes:
        out = bytearray()
        counter = 0
        while len(out) < length:
            out += hashlib.sha256(key + nonce + counter.to_bytes(8, "big")).digest()
            counter += 1
        return bytes(out[:length])

    def enc(self, k: EncKey, msg: bytes, rng: np.random.Generator) -> bytes:
        nonce = rng.bytes(self.nonce_len)
        ks = self._keystream(k.key, nonce, len(msg))
        return nonce + bytes(a ^ b for a, b in zip(msg, ks))

    def dec(self, k: EncKey, ct: bytes) -> bytes:
        if len(ct) < self.nonce_len:
            raise DecryptionError("ciphertext too short")
        nonce, body = ct[: self.nonce_len], ct[self.nonce_len :]
        ks = self._keystream(k.key, nonce, len(body))
        return bytes(a ^ b for a, b in zip(body, ks))

    def overhead(self) -> int:
        return self.nonce_len


PROVIDERS = {"standard": StandardProvider, "fast": FastProvider}


def get_provider(name: str):
    try:
        return PROVIDERS[name]()
    except KeyError:
        raise ValueError(f"unknown crypto provider {name!r}; choose from {sorted(PROVIDERS)}") from None
