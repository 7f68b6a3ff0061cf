"""Single-subspace franchised money: one secret subspace ``A``, per-user keys.

Every user ``id`` holds a pair of small subspaces ``V_id <= A`` and
``W_id <= A^perp`` spanned by a few of the bank's secret vectors.  A note is
the subspace state ``|A>``; verification checks membership in ``W_id^perp``,
Fourier transforms, checks membership in ``V_id^perp`` and transforms back.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import NamedTuple

import numpy as np

from . import qstate
from .gf2 import DimensionError, GF2Vector, Subspace, sample_subspace, sample_vector_in
from .qstate import CosetState, DenseState


class ParamError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name
        self.message = message


class KeyIssueError(ValueError):
    """Franchise request for an id that was already issued or does not exist."""


@dataclass(frozen=True)
class SimpleParams:
    n: int
    t: int | None = None
    big_n: int | None = None
    collusion_c: int | None = None
    lam: int | None = None

    def __post_init__(self):
        n = self.n
        if not isinstance(n, (int, np.integer)) or n <= 0 or n % 4:
            raise ParamError("n", f"must be a positive multiple of 4, got {n!r}")
        t = round(math.sqrt(n)) if self.t is None else self.t
        if t < 0:
            raise ParamError("t", f"must be >= 0, got {t}")
        c = (n // (4 * t) if t else 0) if self.collusion_c is None else self.collusion_c
        if c < 0:
            raise ParamError("collusion_c", f"must be >= 0, got {c}")
        big_n = max(10, c) if self.big_n is None else self.big_n
        if big_n < c:
            raise ParamError("big_n", f"must be >= collusion_c={c}, got {big_n}")
        object.__setattr__(self, "t", int(t))
        object.__setattr__(self, "collusion_c", int(c))
        object.__setattr__(self, "big_n", int(big_n))
        object.__setattr__(self, "lam", n if self.lam is None else self.lam)

    @property
    def half(self) -> int:
        return self.n // 2

    @property
    def honest_ids(self) -> range:
        return range(1, self.big_n - self.collusion_c + 1)

    @property
    def adversary_ids(self) -> range:
        return range(self.big_n - self.collusion_c + 1, self.big_n + 1)


@dataclass(frozen=True)
class SimpleMsk:
    params: SimpleParams
    a: Subspace
    v_list: tuple[GF2Vector, ...]
    w_list: tuple[GF2Vector, ...]
    # index_sets[id - 1] = (I_id, J_id), 1-based indices into [n/2]
    index_sets: tuple[tuple[tuple[int, ...], tuple[int, ...]], ...]

    def indices(self, key_id: int) -> tuple[tuple[int, ...], tuple[int, ...]]:
        if not 1 <= key_id <= len(self.index_sets):
            raise KeyIssueError(f"id {key_id} outside [1, {len(self.index_sets)}]")
        return self.index_sets[key_id - 1]

    def v_space(self, key_id: int) -> Subspace:
        i_set, _ = self.indices(key_id)
        return Subspace(self.params.n, (self.v_list[i - 1] for i in i_set))

    def w_space(self, key_id: int) -> Subspace:
        _, j_set = self.indices(key_id)
        return Subspace(self.params.n, (self.w_list[j - 1] for j in j_set))


@dataclass(frozen=True)
class SimpleSvk:
    id: int
    i_set: tuple[int, ...]
    j_set: tuple[int, ...]
    v_subset: tuple[GF2Vector, ...]
    w_subset: tuple[GF2Vector, ...]
    n: int

    @cached_property
    def v_space(self) -> Subspace:
        return Subspace(self.n, self.v_subset)

    @cached_property
    def w_space(self) -> Subspace:
        return Subspace(self.n, self.w_subset)


@dataclass(frozen=True)
class SimpleBanknote:
    # None marks a note whose state was destroyed by a symbolic rejection
    state: CosetState | DenseState | None


class Verification(NamedTuple):
    accepted: bool
    note: object
    stage: str  # accepted | computational | fourier | signature | decryption | malformed
    probability: Fraction | float


def setup(p: SimpleParams, rng: np.random.Generator) -> SimpleMsk:
    half = p.half
    a = sample_subspace(p.n, half, rng)
    perp = a.complement()
    index_sets = []
    for _ in range(p.big_n):
        i_set = tuple(int(i) + 1 for i in rng.integers(0, half, size=p.t))
        j_set = tuple(int(j) + 1 for j in rng.integers(0, half, size=p.t))
        index_sets.append((i_set, j_set))
    v_list = tuple(sample_vector_in(a, rng) for _ in range(half))
    w_list = tuple(sample_vector_in(perp, rng) for _ in range(half))
    return SimpleMsk(p, a, v_list, w_list, tuple(index_sets))


def franchise(msk: SimpleMsk, key_id: int) -> SimpleSvk:
    """Key for ``key_id``.  Pure; :class:`SimpleBank` guards against re-issuing."""
    i_set, j_set = msk.indices(key_id)
    return SimpleSvk(
        key_id,
        i_set,
        j_set,
        tuple(msk.v_list[i - 1] for i in i_set),
        tuple(msk.w_list[j - 1] for j in j_set),
        msk.params.n,
    )


def full_verification_key(msk: SimpleMsk) -> SimpleSvk:
    """Key with ``V = A`` and ``W = A^perp`` (the unfranchised verifier)."""
    n = msk.params.n
    return SimpleSvk(
        0, (), (), tuple(msk.a.basis_vectors()), tuple(msk.a.complement().basis_vectors()), n
    )


@dataclass
class SimpleBank:
    msk: SimpleMsk
    issued: set[int] = field(default_factory=set)

    def franchise(self, key_id: int | None = None) -> SimpleSvk:
        if key_id is None:
            free = [i for i in range(1, self.msk.params.big_n + 1) if i not in self.issued]
            if not free:
                raise KeyIssueError("all keys have been issued")
            key_id = free[0]
        if key_id in self.issued:
            raise KeyIssueError(f"id {key_id} was already franchised")
        svk = franchise(self.msk, key_id)
        self.issued.add(key_id)
        return svk


def mint(msk: SimpleMsk, backend: str = "symbolic") -> SimpleBanknote:
    state = qstate.coset_from_subspace(msk.a)
    if backend == "dense":
        return SimpleBanknote(qstate.to_dense(state))
    if backend != "symbolic":
        raise ValueError(f"unknown backend {backend!r}")
    return SimpleBanknote(state)


# ---------------------------------------------------------------------------
# verification pipeline shared with the full scheme


def _draw(p, rng: np.random.Generator) -> bool:
    if p == 1:
        return True
    if p == 0:
        return False
    return bool(rng.random() < float(p))


def run_pipeline(state, v: Subspace, w: Subspace, rng: np.random.Generator, offset: int | None = None):
    """Measure ``state`` with the key ``(v, w)``.

    Returns ``(accepted, post_state, stage, probability)`` where
    ``probability`` is the exact chance the input passes both tests.
    Symbolic states lose their post-state on rejection (it leaves the coset
    family); dense states keep whichever branch was sampled.
    """
    if isinstance(state, CosetState):
        if state.n != v.n or state.n != w.n:
            raise DimensionError(f"state on {state.n} qubits, key in dimension {v.n}")
        first = qstate.project_membership(state, w.complement())
        second = None
        if first.accepted_state is not None:
            second = qstate.project_membership(
                qstate.hadamard_all(first.accepted_state), v.complement()
            )
        p_total = first.accept_probability * (second.accept_probability if second else 0)
        if not _draw(first.accept_probability, rng):
            return False, None, "computational", p_total
        if not _draw(second.accept_probability, rng):
            return False, None, "fourier", p_total
        return True, qstate.hadamard_all(second.accepted_state), "accepted", p_total

    if isinstance(state, DenseState):
        reg = 0 if offset is None else offset
        p_total, _ = qstate.dense_verify_probability(state, v, w, offset)
        first = qstate.dense_project_membership(state, w.complement(), offset)
        ok1 = _draw(first.accept_probability, rng)
        mid = first.accepted_state if ok1 else first.rejected_state
        mid = qstate.dense_hadamard_all(mid, reg, v.n)
        second = qstate.dense_project_membership(mid, v.complement(), offset)
        ok2 = _draw(second.accept_probability, rng)
        post = second.accepted_state if ok2 else second.rejected_state
        post = qstate.dense_hadamard_all(post, reg, v.n)
        stage = "accepted" if ok1 and ok2 else ("computational" if not ok1 else "fourier")
        return ok1 and ok2, post, stage, p_total

    raise TypeError(f"cannot verify a state of type {type(state).__name__}")


def verify(svk: SimpleSvk, note: SimpleBanknote, rng: np.random.Generator) -> Verification:
    if note.state is None:
        return Verification(False, note, "malformed", Fraction(0))
    if note.state.n != svk.n:
        raise DimensionError(f"note on {note.state.n} qubits, key for n={svk.n}")
    accepted, post, stage, p = run_pipeline(note.state, svk.v_space, svk.w_space, rng)
    return Verification(accepted, SimpleBanknote(post), stage, p)


def acceptance(svk: SimpleSvk, note: SimpleBanknote):
    """Exact ``(probability, post_state)`` for ``note`` under ``svk`` without sampling."""
    state = note.state
    if state is None:
        return Fraction(0), None
    if isinstance(state, CosetState):
        return qstate.verify_probability(state, svk.v_space, svk.w_space)
    return qstate.dense_verify_probability(state, svk.v_space, svk.w_space)
