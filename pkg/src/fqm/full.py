"""Many-note franchised money: a fresh subspace per note, keys ride along encrypted.

Each note carries ``n`` ciphertexts: ``c_i`` (``i <= n/2``) encrypts a random
vector of the note's subspace ``A`` under the bank key ``enc_k_i`` and
``c_{n/2+j}`` encrypts a random vector of ``A^perp`` under ``enc_k_{n/2+j}``.
The ciphertext tuple is signed.  A user key holds the decryption keys for a
few random positions, so the same key verifies every note.

Banknote wire format (all integers big-endian)::

    "FQM1" | version u8 | n u16 | backend u8 (0 symbolic, 1 dense)
    | quantum descriptor
    | count u16 | count x (u32 length | ciphertext) | u32 length | signature

Symbolic descriptor: ``dim u16`` then ``dim`` basis rows, the shift and the
character, each ``ceil(n/8)`` bytes (coordinate ``i`` is bit ``i % 8`` of byte
``i // 8``).  Dense descriptor: ``2**n`` little-endian float64 (re, im) pairs.
A single-subspace note is written with ``count = 0`` and an empty signature.
The serialized state is a simulation artifact; a physical note cannot be
copied this way.
"""
from __future__ import annotations

import math
import struct
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import qstate
from .crypto import DecryptionError, EncKey, SigKeyPair, get_provider
from .gf2 import GF2Vector, Subspace, sample_subspace, sample_vector_in
from .qstate import CosetState, DenseState
from .simple import ParamError, SimpleBanknote, Verification, run_pipeline

MAGIC = b"FQM1"
VERSION = 1


class BanknoteFormatError(ValueError):
    pass


@dataclass(frozen=True)
class FullParams:
    n: int
    t: int | None = None
    lam: int | None = None

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n <= 0 or n % 4:
            raise ParamError("n", f"must be a positive multiple of 4, got {n!r}")
        t = round(math.sqrt(n)) if self.t is None else self.t
        if t < 0:
            raise ParamError("t", f"must be >= 0, got {t}")
        object.__setattr__(self, "t", int(t))
        object.__setattr__(self, "lam", n if self.lam is None else self.lam)

    @property
    def half(self) -> int:
        return self.n // 2


@dataclass(frozen=True)
class FullMsk:
    params: FullParams
    sig_pair: SigKeyPair
    enc_keys: tuple[EncKey, ...]
    provider_name: str = "standard"

    @property
    def provider(self):
        return get_provider(self.provider_name)


@dataclass(frozen=True)
class FullSvk:
    sig_pk: bytes
    i_set: tuple[int, ...]
    j_set: tuple[int, ...]
    v_keys: tuple[EncKey, ...]  # v_keys[k] = enc_k_{i_set[k]}
    w_keys: tuple[EncKey, ...]  # w_keys[k] = enc_k_{n/2 + j_set[k]}
    n: int
    provider_name: str = "standard"


@dataclass(frozen=True)
class FullBanknote:
    state: CosetState | DenseState | None
    ciphertexts: tuple[bytes, ...]
    signature: bytes


def signed_message(ciphertexts) -> bytes:
    """Canonical byte string the bank signs: count, then each ciphertext length-prefixed."""
    parts = [struct.pack(">I", len(ciphertexts))]
    for c in ciphertexts:
        parts.append(struct.pack(">I", len(c)))
        parts.append(bytes(c))
    return b"".join(parts)


def setup(p: FullParams, rng: np.random.Generator, provider: str = "standard") -> FullMsk:
    prov = get_provider(provider)
    sig = prov.sig_keygen(p.lam, rng)
    keys = tuple(prov.enc_keygen(p.lam, rng) for _ in range(p.n))
    return FullMsk(p, sig, keys, provider)


def franchise(msk: FullMsk, rng: np.random.Generator) -> FullSvk:
    p = msk.params
    i_set = tuple(int(i) + 1 for i in rng.integers(0, p.half, size=p.t))
    j_set = tuple(int(j) + 1 for j in rng.integers(0, p.half, size=p.t))
    return FullSvk(
        msk.sig_pair.public_key,
        i_set,
        j_set,
        tuple(msk.enc_keys[i - 1] for i in i_set),
        tuple(msk.enc_keys[p.half + j - 1] for j in j_set),
        p.n,
        msk.provider_name,
    )


def mint(
    msk: FullMsk, p: FullParams, rng: np.random.Generator, backend: str = "symbolic"
) -> FullBanknote:
    if p.n != msk.params.n:
        raise ParamError("n", f"params n={p.n} do not match master key n={msk.params.n}")
    prov = msk.provider
    a = sample_subspace(p.n, p.half, rng)
    perp = a.complement()
    vs = [sample_vector_in(a, rng) for _ in range(p.half)]
    ws = [sample_vector_in(perp, rng) for _ in range(p.half)]
    cts = tuple(prov.enc(k, x.to_bytes(), rng) for k, x in zip(msk.enc_keys, vs + ws))
    sigma = prov.sign(msk.sig_pair.secret_key, signed_message(cts))
    state = qstate.coset_from_subspace(a)
    if backend == "dense":
        state = qstate.to_dense(state)
    elif backend != "symbolic":
        raise ValueError(f"unknown backend {backend!r}")
    return FullBanknote(state, cts, sigma)


class ClassicalCheckFailed(Exception):
    def __init__(self, stage: str, detail: str = ""):
        super().__init__(f"{stage}: {detail}" if detail else stage)
        self.stage = stage


def key_spaces(svk: FullSvk, note: FullBanknote) -> tuple[Subspace, Subspace]:
    """Run the classical half of verification and return ``(V_id, W_id)`` for this note.

    Raises :class:`ClassicalCheckFailed` with stage ``malformed``,
    ``signature`` or ``decryption``.
    """
    n = svk.n
    half = n // 2
    cts = note.ciphertexts
    if len(cts) != n or not isinstance(note.signature, (bytes, bytearray)):
        raise ClassicalCheckFailed("malformed", f"expected {n} ciphertexts, got {len(cts)}")
    prov = get_provider(svk.provider_name)
    if not prov.sig_ver(svk.sig_pk, signed_message(cts), note.signature):
        raise ClassicalCheckFailed("signature")
    try:
        vs = [GF2Vector.from_bytes(prov.dec(k, cts[i - 1]), n) for k, i in zip(svk.v_keys, svk.i_set)]
        ws = [
            GF2Vector.from_bytes(prov.dec(k, cts[half + j - 1]), n)
            for k, j in zip(svk.w_keys, svk.j_set)
        ]
    except (DecryptionError, ValueError) as exc:
        raise ClassicalCheckFailed("decryption", str(exc)) from exc
    return Subspace(n, vs), Subspace(n, ws)


def verify(svk: FullSvk, note: FullBanknote, rng: np.random.Generator) -> Verification:
    state = note.state
    if state is None or state.n != svk.n:
        return Verification(False, note, "malformed", Fraction(0))
    try:
        v, w = key_spaces(svk, note)
    except ClassicalCheckFailed as exc:
        return Verification(False, note, exc.stage, Fraction(0))
    accepted, post, stage, p = run_pipeline(state, v, w, rng)
    return Verification(accepted, FullBanknote(post, note.ciphertexts, note.signature), stage, p)


def verify_quantum(note: FullBanknote, v: Subspace, w: Subspace, rng: np.random.Generator) -> Verification:
    """Quantum tests only, with the given key spaces; signature and encryption are bypassed."""
    accepted, post, stage, p = run_pipeline(note.state, v, w, rng)
    return Verification(accepted, FullBanknote(post, note.ciphertexts, note.signature), stage, p)


def acceptance(svk: FullSvk, note: FullBanknote):
    """Exact ``(probability, post_state)`` without sampling."""
    if note.state is None or note.state.n != svk.n:
        return Fraction(0), None
    try:
        v, w = key_spaces(svk, note)
    except ClassicalCheckFailed:
        return Fraction(0), None
    if isinstance(note.state, CosetState):
        return qstate.verify_probability(note.state, v, w)
    return qstate.dense_verify_probability(note.state, v, w)


# ---------------------------------------------------------------------------
# wire format


def _state_bytes(state) -> tuple[int, bytes]:
    if isinstance(state, CosetState):
        nb = (state.n + 7) // 8
        rows = [GF2Vector(r, state.n).to_bytes() for r in state.space.rows]
        body = struct.pack(">H", state.space.dim) + b"".join(rows)
        body += state.shift.to_bytes() + state.character.to_bytes()
        assert len(body) == 2 + nb * (state.space.dim + 2)
        return 0, body
    if isinstance(state, DenseState):
        return 1, np.asarray(state.amplitudes, dtype="<c16").tobytes()
    raise ValueError("note has no serializable state")


def serialize(note: FullBanknote | SimpleBanknote) -> bytes:
    state = note.state
    if state is None:
        raise ValueError("cannot serialize a note whose state was destroyed")
    tag, body = _state_bytes(state)
    out = [MAGIC, struct.pack(">BHB", VERSION, state.n, tag), body]
    if isinstance(note, FullBanknote):
        cts, sig = note.ciphertexts, note.signature
    else:
        cts, sig = (), b""
    out.append(struct.pack(">H", len(cts)))
    for c in cts:
        out.append(struct.pack(">I", len(c)) + bytes(c))
    out.append(struct.pack(">I", len(sig)) + bytes(sig))
    return b"".join(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = memoryview(bytes(data))
        self.pos = 0

    def take(self, k: int, what: str) -> bytes:
        if k < 0 or self.pos + k > len(self.data):
            raise BanknoteFormatError(f"truncated while reading {what}")
        out = bytes(self.data[self.pos : self.pos + k])
        self.pos += k
        return out

    def unpack(self, fmt: str, what: str):
        return struct.unpack(fmt, self.take(struct.calcsize(fmt), what))


def deserialize(data: bytes) -> FullBanknote | SimpleBanknote:
    r = _Reader(data)
    if r.take(4, "magic") != MAGIC:
        raise BanknoteFormatError("bad magic")
    version, n, tag = r.unpack(">BHB", "header")
    if version != VERSION:
        raise BanknoteFormatError(f"unsupported version {version}")
    if n == 0:
        raise BanknoteFormatError("n must be positive")
    nb = (n + 7) // 8
    try:
        if tag == 0:
            (dim,) = r.unpack(">H", "dimension")
            if dim > n:
                raise BanknoteFormatError(f"dimension {dim} exceeds n={n}")
            rows = [GF2Vector.from_bytes(r.take(nb, "basis row"), n) for _ in range(dim)]
            space = Subspace(n, rows)
            if space.dim != dim:
                raise BanknoteFormatError("basis rows are linearly dependent")
            shift = GF2Vector.from_bytes(r.take(nb, "shift"), n)
            char = GF2Vector.from_bytes(r.take(nb, "character"), n)
            state = CosetState(space, shift, char)
        elif tag == 1:
            if n > qstate.DENSE_CAP:
                raise BanknoteFormatError(f"dense state with n={n} over cap")
            raw = r.take(16 << n, "amplitudes")
            state = DenseState(n, np.frombuffer(raw, dtype="<c16").astype(np.complex128))
        else:
            raise BanknoteFormatError(f"unknown backend tag {tag}")
    except BanknoteFormatError:
        raise
    except ValueError as exc:
        raise BanknoteFormatError(f"invalid quantum descriptor: {exc}") from exc
    (count,) = r.unpack(">H", "ciphertext count")
    cts = []
    for k in range(count):
        (length,) = r.unpack(">I", f"length of ciphertext {k}")
        cts.append(r.take(length, f"ciphertext {k}"))
    (slen,) = r.unpack(">I", "signature length")
    sig = r.take(slen, "signature")
    if r.pos != len(r.data):
        raise BanknoteFormatError(f"{len(r.data) - r.pos} trailing bytes")
    if count == 0 and not sig:
        return SimpleBanknote(state)
    return FullBanknote(state, tuple(cts), sig)
