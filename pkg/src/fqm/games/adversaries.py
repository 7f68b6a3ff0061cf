"""Adversary strategies for the counterfeiting and sabotage games.

An adversary exposes ``name``, ``key_budget`` (``None`` means "all ``C``
keys") and one or both of::

    counterfeit(ch, rng) -> list[(id, note)] | JointSubmission
    sabotage(ch, rng) -> (note, id1, id2)

where ``ch`` is the :class:`~fqm.games.harness.Challenger`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .. import full, qstate
from ..gf2 import Subspace, sample_subspace
from ..qstate import CosetState, DenseState
from ..simple import SimpleBanknote
from .harness import FullScheme, GameFault, JointSubmission, joint_state


@dataclass(frozen=True)
class AdversaryView:
    keys: tuple
    i_adv: frozenset
    j_adv: frozenset
    v_adv_space: Subspace
    w_adv_space: Subspace

    @classmethod
    def from_simple_keys(cls, keys, n: int) -> AdversaryView:
        keys = tuple(keys)
        vs = [v for k in keys for v in k.v_subset]
        ws = [w for k in keys for w in k.w_subset]
        return cls(
            keys,
            frozenset(i for k in keys for i in k.i_set),
            frozenset(j for k in keys for j in k.j_set),
            Subspace(n, vs),
            Subspace(n, ws),
        )

    @classmethod
    def from_full_keys(cls, keys, note: full.FullBanknote) -> AdversaryView:
        """Decrypt what the pooled keys can open on ``note`` and span it."""
        keys = tuple(keys)
        n = note.state.n if note.state is not None else keys[0].n
        v, w = Subspace.zero(n), Subspace.zero(n)
        for k in keys:
            kv, kw = full.key_spaces(k, note)
            v, w = v + kv, w + kw
        return cls(
            keys,
            frozenset(i for k in keys for i in k.i_set),
            frozenset(j for k in keys for j in k.j_set),
            v,
            w,
        )

    @property
    def n(self) -> int:
        return self.v_adv_space.n


def self_forgery_space(view: AdversaryView, between: Subspace | None = None) -> Subspace:
    """Subspace ``B`` with ``V_adv <= B <= W_adv^perp``; ``V_adv`` itself by default."""
    if not view.keys:
        raise ValueError("self-forgery needs at least one key in the view")
    if between is None:
        return view.v_adv_space
    if not (view.v_adv_space <= between <= view.w_adv_space.complement()):
        raise ValueError("B must satisfy V_adv <= B <= W_adv^perp")
    return between


def adversary_self_forgery(view: AdversaryView, between: Subspace | None = None):
    """Note state ``|B>`` that every key in ``view`` accepts with certainty."""
    return SimpleBanknote(qstate.coset_from_subspace(self_forgery_space(view, between)))


def _distinct_honest(ch, rng) -> tuple[int, int]:
    ids = list(ch.honest_ids)
    if len(ids) < 2:
        raise GameFault("sabotage needs at least two honest ids")
    a, b = rng.choice(len(ids), size=2, replace=False)
    return ids[int(a)], ids[int(b)]


def _random_honest(ch, rng) -> int:
    ids = list(ch.honest_ids)
    return ids[int(rng.integers(len(ids)))]


def _prepare(ch, state, template):
    if ch.scheme.backend == "dense" and isinstance(state, CosetState):
        state = qstate.to_dense(state)
    return ch.scheme.with_state(template, state)


class HonestForwarder:
    """Mints ``mints`` notes and hands them back, padded with one malformed note."""

    key_budget = 0

    def __init__(self, mints: int = 1):
        self.mints = mints
        self.name = f"honest(mints={mints})"

    def counterfeit(self, ch, rng):
        notes = [ch.mint() for _ in range(self.mints)]
        sub = [(_random_honest(ch, rng), nt) for nt in notes]
        sub.append((_random_honest(ch, rng), ch.scheme.junk()))
        return sub

    def sabotage(self, ch, rng):
        note = ch.mint()
        id1, id2 = _distinct_honest(ch, rng)
        return note, id1, id2


class SelfForgery:
    """Pool the ``C`` colluding keys and submit ``|B>`` with ``B = V_adv`` or ``B = W_adv^perp``.

    With the many-note scheme the pooled keys only open ciphertexts of a real
    note, so one note is always minted and its classical fields are reused.
    ``spend_genuine`` puts the minted notes themselves into the challenge.
    """

    def __init__(self, target: str = "v", mints: int = 0, spend_genuine: bool = False,
                 key_budget: int | None = None):
        if target not in ("v", "w"):
            raise ValueError("target must be 'v' or 'w'")
        self.target = target
        self.mints = mints
        self.spend_genuine = spend_genuine
        self.key_budget = key_budget
        self.name = f"self-forgery(target={target})"

    def _forge(self, ch, rng):
        budget = ch.scheme.collusion_c if self.key_budget is None else self.key_budget
        keys = [ch.franchise() for _ in range(budget)]
        mints = self.mints
        if isinstance(ch.scheme, FullScheme):
            mints = max(mints, 1)
        notes = [ch.mint() for _ in range(mints)]
        if isinstance(ch.scheme, FullScheme):
            view = AdversaryView.from_full_keys(keys, notes[0])
            template = notes[0]
        else:
            view = AdversaryView.from_simple_keys(keys, ch.scheme.n)
            template = None
        if self.target == "v":
            b = view.v_adv_space
        else:
            b = view.w_adv_space.complement()
        forged = _prepare(ch, qstate.coset_from_subspace(b), template)
        return notes, forged

    def counterfeit(self, ch, rng):
        notes, forged = self._forge(ch, rng)
        sub = []
        if self.spend_genuine:
            sub = [(_random_honest(ch, rng), nt) for nt in notes]
        while len(sub) < len(notes) + 1:
            sub.append((_random_honest(ch, rng), forged))
        return sub

    def sabotage(self, ch, rng):
        _, forged = self._forge(ch, rng)
        id1, id2 = _distinct_honest(ch, rng)
        return forged, id1, id2


class SubspaceNote:
    """Submit ``|B>`` for a uniformly random ``B`` of dimension ``dim`` (default ``n/2``)."""

    key_budget = 0

    def __init__(self, dim: int | None = None):
        self.dim = dim
        self.name = f"random-subspace(dim={dim})"

    def _note(self, ch, rng):
        n = ch.scheme.n
        b = sample_subspace(n, n // 2 if self.dim is None else self.dim, rng)
        template = ch.mint() if isinstance(ch.scheme, FullScheme) else None
        return _prepare(ch, qstate.coset_from_subspace(b), template), ch.mints

    def counterfeit(self, ch, rng):
        note, m = self._note(ch, rng)
        return [(_random_honest(ch, rng), note) for _ in range(m + 1)]

    def sabotage(self, ch, rng):
        note, _ = self._note(ch, rng)
        id1, id2 = _distinct_honest(ch, rng)
        return note, id1, id2


class RandomDenseState:
    """Haar-random dense note state (requires ``n <= DENSE_CAP``)."""

    key_budget = 0
    name = "random-dense"

    def _note(self, ch, rng):
        template = ch.mint() if isinstance(ch.scheme, FullScheme) else None
        return ch.scheme.with_state(template, DenseState.random(ch.scheme.n, rng))

    def counterfeit(self, ch, rng):
        note = self._note(ch, rng)
        return [(_random_honest(ch, rng), note) for _ in range(ch.mints + 1)]

    def sabotage(self, ch, rng):
        note = self._note(ch, rng)
        id1, id2 = _distinct_honest(ch, rng)
        return note, id1, id2


class EntangledForgery:
    """Submit ``(|B1>^u + |B2>^u)`` normalised, with ``B1 = V_adv`` and ``B2 = W_adv^perp``.

    Dense backend only; ``u * n`` must fit under the dense cap.
    """

    key_budget = None

    def __init__(self, copies: int = 2):
        self.copies = copies
        self.name = f"entangled(copies={copies})"

    def counterfeit(self, ch, rng):
        n = ch.scheme.n
        keys = [ch.franchise() for _ in range(ch.scheme.collusion_c)]
        template = ch.mint() if isinstance(ch.scheme, FullScheme) else None
        if template is not None:
            view = AdversaryView.from_full_keys(keys, template)
        else:
            view = AdversaryView.from_simple_keys(keys, n)
        u = max(self.copies, ch.mints + 1)
        b1 = joint_state([qstate.coset_from_subspace(view.v_adv_space)] * u)
        b2 = joint_state([qstate.coset_from_subspace(view.w_adv_space.complement())] * u)
        amps = b1.amplitudes + b2.amplitudes
        norm = np.linalg.norm(amps)
        if norm < 1e-12:
            amps = b1.amplitudes
        else:
            amps = amps / norm
        state = DenseState(u * n, amps)
        ids = tuple(_random_honest(ch, rng) for _ in range(u))
        templates = ()
        if template is not None:
            templates = tuple(ch.scheme.with_state(template, None) for _ in range(u))
        return JointSubmission(state, ids, templates)


ADVERSARIES = {
    "honest": HonestForwarder,
    "self-forgery": SelfForgery,
    "random-subspace": SubspaceNote,
    "random-dense": RandomDenseState,
    "entangled": EntangledForgery,
}
