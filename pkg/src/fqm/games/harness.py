"""Challenger side of the correctness, counterfeiting and sabotage games.

The harness owns the master key.  An adversary only sees what the
:class:`Challenger` hands out through its query interface (franchise, mint,
verify) and then submits a challenge.  Every trial runs on its own generator
derived from ``(master seed, trial index)``, so any single trial can be
replayed from the seed recorded in the result.
"""
from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any

import numpy as np

from .. import full, qstate, simple
from ..gf2 import Subspace
from ..qstate import CosetState, DenseState
from .stats import at_least, mean_sigma, trial_seed, wilson


class GameFault(Exception):
    """The adversary broke the rules of the game (key budget, ids, note reuse, ...)."""


# ---------------------------------------------------------------------------
# results


@dataclass
class GameResult:
    game: str
    params: dict
    trials: int
    wins: int
    win_rate: float
    interval: tuple[float, float]
    seeds: list[int] = field(default_factory=list)
    outcomes: list[bool] = field(default_factory=list)
    probabilities: list[Any] = field(default_factory=list)
    wall_ms: list[float] = field(default_factory=list)
    extras: dict = field(default_factory=dict)
    columns: dict[str, list] = field(default_factory=dict)  # extra per-trial values

    @classmethod
    def collect(cls, game, params, seeds, outcomes, probabilities, wall_ms, extras=None, columns=None):
        wins = int(sum(outcomes))
        trials = len(outcomes)
        known = [p for p in probabilities if p is not None]
        extras = dict(extras or {})
        if trials and len(known) == trials:
            mean, sigma = mean_sigma(known)
            extras.setdefault("expected_win_rate", mean)
            extras.setdefault("expected_sigma", sigma)
        return cls(
            game,
            dict(params),
            trials,
            wins,
            wins / trials if trials else 0.0,
            wilson(wins, trials),
            list(seeds),
            list(outcomes),
            list(probabilities),
            list(wall_ms),
            extras,
            dict(columns or {}),
        )

    def summary(self) -> dict:
        return {
            "game": self.game,
            "trials": self.trials,
            "wins": self.wins,
            "win_rate": self.win_rate,
            "interval_95": list(self.interval),
            **{k: _plain(v) for k, v in self.extras.items()},
        }

    def rows(self) -> list[dict]:
        out = []
        for k, (s, o, p) in enumerate(zip(self.seeds, self.outcomes, self.probabilities)):
            out.append(
                {
                    "trial": k,
                    "seed": s,
                    "outcome": int(bool(o)),
                    "probability": None if p is None else float(p),
                    "wall_ms": self.wall_ms[k] if k < len(self.wall_ms) else None,
                    **{name: col[k] for name, col in self.columns.items()},
                }
            )
        return out


def _plain(v):
    if isinstance(v, Fraction):
        return float(v)
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, tuple):
        return [_plain(x) for x in v]
    return v


# ---------------------------------------------------------------------------
# scheme adapters


class SimpleScheme:
    """Game adapter for the single-subspace scheme."""

    name = "simple"

    def __init__(self, params: simple.SimpleParams, backend: str = "symbolic"):
        if backend == "dense" and params.n > qstate.DENSE_CAP:
            raise qstate.DenseCapError(f"n={params.n} exceeds dense cap {qstate.DENSE_CAP}")
        self.params = params
        self.backend = backend

    n = property(lambda self: self.params.n)
    big_n = property(lambda self: self.params.big_n)
    collusion_c = property(lambda self: self.params.collusion_c)
    t = property(lambda self: self.params.t)

    def describe(self) -> dict:
        p = self.params
        return {"scheme": self.name, "backend": self.backend, "n": p.n, "t": p.t,
                "big_n": p.big_n, "collusion_c": p.collusion_c}

    def setup(self, rng):
        return simple.setup(self.params, rng)

    def issue_keys(self, msk, rng) -> dict:
        return {i: simple.franchise(msk, i) for i in range(1, self.big_n + 1)}

    def full_key(self, msk):
        return simple.full_verification_key(msk)

    def mint(self, msk, rng):
        return simple.mint(msk, self.backend)

    def verify(self, svk, note, rng):
        return simple.verify(svk, note, rng)

    def acceptance(self, svk, note):
        return simple.acceptance(svk, note)

    def key_spaces(self, svk, note) -> tuple[Subspace, Subspace]:
        return svk.v_space, svk.w_space

    def with_state(self, note, state):
        return simple.SimpleBanknote(state)

    def junk(self, template=None):
        return simple.SimpleBanknote(None)

    def secret_subspace(self, msk, note) -> Subspace:
        return msk.a


class FullScheme:
    """Game adapter for the many-note scheme; N and C are enforced by the games only."""

    name = "full"

    def __init__(
        self,
        params: full.FullParams,
        backend: str = "symbolic",
        provider: str = "standard",
        big_n: int | None = None,
        collusion_c: int | None = None,
    ):
        if backend == "dense" and params.n > qstate.DENSE_CAP:
            raise qstate.DenseCapError(f"n={params.n} exceeds dense cap {qstate.DENSE_CAP}")
        # reuse the simple-scheme defaults and checks for N and C
        counts = simple.SimpleParams(params.n, params.t, big_n, collusion_c)
        self.params = params
        self.backend = backend
        self.provider = provider
        self.big_n = counts.big_n
        self.collusion_c = counts.collusion_c

    n = property(lambda self: self.params.n)
    t = property(lambda self: self.params.t)

    def describe(self) -> dict:
        p = self.params
        return {"scheme": self.name, "backend": self.backend, "n": p.n, "t": p.t,
                "big_n": self.big_n, "collusion_c": self.collusion_c, "provider": self.provider}

    def setup(self, rng):
        return full.setup(self.params, rng, self.provider)

    def issue_keys(self, msk, rng) -> dict:
        return {i: full.franchise(msk, rng) for i in range(1, self.big_n + 1)}

    def full_key(self, msk):
        raise GameFault("the full scheme has no master verification key; every note has its own subspace")

    def mint(self, msk, rng):
        return full.mint(msk, self.params, rng, self.backend)

    def verify(self, svk, note, rng):
        return full.verify(svk, note, rng)

    def acceptance(self, svk, note):
        return full.acceptance(svk, note)

    def key_spaces(self, svk, note) -> tuple[Subspace, Subspace]:
        return full.key_spaces(svk, note)

    def with_state(self, note, state):
        return full.FullBanknote(state, note.ciphertexts, note.signature)

    def junk(self, template=None):
        return full.FullBanknote(None, (), b"")

    def secret_subspace(self, msk, note) -> Subspace:
        if not isinstance(note.state, CosetState):
            raise TypeError("secret subspace is read from a symbolic honest note")
        return note.state.space


# ---------------------------------------------------------------------------
# challenges


@dataclass(frozen=True)
class JointSubmission:
    """``u`` notes sharing one (possibly entangled) dense state.

    Note ``k`` lives on qubits ``k*n .. (k+1)*n - 1``.  ``templates[k]``
    supplies the classical fields (ignored by the simple scheme).
    """

    state: DenseState
    ids: tuple[int, ...]
    templates: tuple = ()


def joint_state(states) -> DenseState:
    """Tensor product with the first state on the lowest qubits."""
    amps = np.ones(1, dtype=np.complex128)
    n = 0
    for st in states:
        d = qstate.to_dense(st) if isinstance(st, CosetState) else st
        amps = np.kron(d.amplitudes, amps)
        n += d.n
    return DenseState(n, amps)


class Challenger:
    def __init__(self, scheme, rng: np.random.Generator, verifier: str = "franchised"):
        self.scheme = scheme
        self.rng = rng
        self.msk = scheme.setup(rng)
        self.keys = scheme.issue_keys(self.msk, rng)
        self.verifier = verifier
        self.full_key = scheme.full_key(self.msk) if verifier == "full" else None
        self.mints = 0
        self.franchised: list[int] = []
        self.verify_log: list[tuple[int, bool]] = []
        self._issued: dict[int, Any] = {}
        self._spent: dict[int, Any] = {}
        self._first_note = None

    @property
    def honest_ids(self) -> range:
        return range(1, self.scheme.big_n - self.scheme.collusion_c + 1)

    @property
    def adversary_ids(self) -> range:
        return range(self.scheme.big_n - self.scheme.collusion_c + 1, self.scheme.big_n + 1)

    def key_for(self, key_id: int):
        return self.full_key if self.full_key is not None else self.keys[key_id]

    # --- queries -----------------------------------------------------------

    def franchise(self):
        if len(self.franchised) >= self.scheme.collusion_c:
            raise GameFault(f"key budget C={self.scheme.collusion_c} exhausted")
        key_id = self.adversary_ids[len(self.franchised)]
        self.franchised.append(key_id)
        return self.keys[key_id]

    def mint(self):
        self.mints += 1
        note = self.scheme.mint(self.msk, self.rng)
        self._issued[id(note)] = note
        if self._first_note is None:
            self._first_note = note
        return note

    def adversary_dims(self) -> tuple[int | None, int | None]:
        """Realized ``(dim V_adv, dim W_adv)`` of the franchised keys; ``None`` if not determined.

        For the many-note scheme the spans are taken on the first minted note.
        """
        n = self.scheme.n
        v, w = Subspace.zero(n), Subspace.zero(n)
        for key_id in self.franchised:
            if self._first_note is None and isinstance(self.scheme, FullScheme):
                return None, None
            try:
                kv, kw = self.scheme.key_spaces(self.keys[key_id], self._first_note)
            except full.ClassicalCheckFailed:
                return None, None
            v, w = v + kv, w + kw
        return v.dim, w.dim

    def _consume(self, note) -> bool:
        key = id(note)
        if key in self._spent and self._spent[key] is note:
            raise GameFault("a bank-issued note was used twice")
        if key in self._issued and self._issued[key] is note:
            self._spent[key] = self._issued.pop(key)
            return True
        return False

    def _check_honest(self, key_id: int) -> None:
        if key_id not in self.honest_ids:
            raise GameFault(f"id {key_id} is not an honest id in [1, {len(self.honest_ids)}]")

    def verify(self, key_id: int, note):
        self._check_honest(key_id)
        tracked = self._consume(note)
        res = self.scheme.verify(self.key_for(key_id), note, self.rng)
        self.verify_log.append((key_id, res.accepted))
        if tracked:
            self._issued[id(res.note)] = res.note
        return res.accepted, res.note

    # --- judging -----------------------------------------------------------

    def judge_counterfeit(self, submission):
        """Return ``(accepted_count, exact_win_probability)``; win means ``> mints`` accepted."""
        if isinstance(submission, JointSubmission):
            return self._judge_joint(submission)
        items = list(submission)
        if len(items) <= self.mints:
            raise GameFault(f"challenge needs more than m={self.mints} notes, got {len(items)}")
        for key_id, note in items:
            self._check_honest(key_id)
            self._consume(note)
        probs = []
        accepted = 0
        for key_id, note in items:
            svk = self.key_for(key_id)
            p, _ = self.scheme.acceptance(svk, note)
            probs.append(p)
            accepted += bool(self.scheme.verify(svk, note, self.rng).accepted)
        return accepted, at_least(probs, self.mints + 1)

    def _judge_joint(self, sub: JointSubmission):
        n = self.scheme.n
        u = len(sub.ids)
        if u <= self.mints:
            raise GameFault(f"challenge needs more than m={self.mints} notes, got {u}")
        if sub.state.n != u * n:
            raise GameFault(f"joint state has {sub.state.n} qubits, expected {u}*{n}")
        templates = list(sub.templates) or [None] * u
        if len(templates) != u:
            raise GameFault("one classical template per note is required")
        spaces = []
        for key_id, tpl in zip(sub.ids, templates):
            self._check_honest(key_id)
            if tpl is not None:
                self._consume(tpl)
            try:
                spaces.append(self.scheme.key_spaces(self.key_for(key_id), tpl))
            except full.ClassicalCheckFailed:
                spaces.append(None)

        def exact(state, k, count):
            if k == u:
                return 1.0 if count > self.mints else 0.0
            if spaces[k] is None:
                return exact(state, k + 1, count)
            v, w = spaces[k]
            off = k * n
            first = qstate.dense_project_membership(state, w.complement(), off)
            total = 0.0
            if first.rejected_state is not None:
                total += (1 - first.accept_probability) * exact(first.rejected_state, k + 1, count)
            if first.accepted_state is not None:
                mid = qstate.dense_hadamard_all(first.accepted_state, off, n)
                second = qstate.dense_project_membership(mid, v.complement(), off)
                for p, st, c in (
                    (second.accept_probability, second.accepted_state, 1),
                    (1 - second.accept_probability, second.rejected_state, 0),
                ):
                    if st is not None and p > 0:
                        back = qstate.dense_hadamard_all(st, off, n)
                        total += first.accept_probability * p * exact(back, k + 1, count + c)
            return total

        p_win = exact(sub.state, 0, 0)
        state = sub.state
        accepted = 0
        for k in range(u):
            if spaces[k] is None:
                continue
            ok, state, _, _ = simple.run_pipeline(state, *spaces[k], self.rng, offset=k * n)
            accepted += ok
        return accepted, p_win

    def judge_sabotage(self, note, id1: int, id2: int):
        """Return ``(won, exact_probability)``; won means accepted by ``id1`` then rejected by ``id2``."""
        if id1 == id2:
            raise GameFault("sabotage needs two distinct ids")
        self._check_honest(id1)
        self._check_honest(id2)
        self._consume(note)
        k1, k2 = self.key_for(id1), self.key_for(id2)
        p1, post = self.scheme.acceptance(k1, note)
        p = Fraction(0) if isinstance(p1, Fraction) else 0.0
        if post is not None:
            p2, _ = self.scheme.acceptance(k2, self.scheme.with_state(note, post))
            p = p1 * (1 - p2)
        first = self.scheme.verify(k1, note, self.rng)
        if not first.accepted:
            return False, p
        second = self.scheme.verify(k2, first.note, self.rng)
        return not second.accepted, p


# ---------------------------------------------------------------------------
# games


def _check_budget(adv, scheme) -> None:
    budget = getattr(adv, "key_budget", 0)
    budget = scheme.collusion_c if budget is None else budget
    if budget > scheme.collusion_c:
        raise GameFault(f"adversary declares {budget} keys, collusion bound is {scheme.collusion_c}")


def map_trials(fn, trials: int, seed: int, threads: int = 1) -> list:
    """``[(seed_k, fn(rng_k), wall_ms_k)]`` in trial order; scheduling does not affect results."""

    def one(k):
        s = trial_seed(seed, k)
        t0 = time.perf_counter()
        out = fn(np.random.default_rng(s))
        return s, out, (time.perf_counter() - t0) * 1e3

    if threads > 1 and trials > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, range(trials)))
    return [one(k) for k in range(trials)]


_DIM_COLS = ("dim_v_adv", "dim_w_adv")


def _run(game, scheme, trials, seed, body, extras_fn=None, extra_params=None, threads=1):
    seeds, outcomes, probs, wall = [], [], [], []
    extras: dict = {}
    columns: dict[str, list] = {}
    for s, (won, p, info), ms in map_trials(body, trials, seed, threads):
        if isinstance(info, dict) and "dims" in info:
            for name, d in zip(_DIM_COLS, info.pop("dims")):
                columns.setdefault(name, []).append(d)
            info = info.get("info")
        wall.append(ms)
        seeds.append(s)
        outcomes.append(bool(won))
        probs.append(p)
        if extras_fn:
            extras_fn(extras, info)
    params = {**scheme.describe(), "seed": seed, **(extra_params or {})}
    return GameResult.collect(game, params, seeds, outcomes, probs, wall, extras, columns)


def run_correctness(scheme, trials: int, seed: int, threads: int = 1) -> GameResult:
    """Franchise, mint and verify honestly ``trials`` times; record acceptance and post-state infidelity."""

    def body(rng):
        msk = scheme.setup(rng)
        if isinstance(scheme, SimpleScheme):
            key_id = int(rng.integers(1, scheme.big_n + 1))
            svk = simple.franchise(msk, key_id)
        else:
            svk = full.franchise(msk, rng)
        note = scheme.mint(msk, rng)
        p, _ = scheme.acceptance(svk, note)
        res = scheme.verify(svk, note, rng)
        infid = 1.0
        if res.accepted:
            infid = 1.0 - float(qstate.state_fidelity(res.note.state, note.state))
        return res.accepted, p, infid

    def acc(extras, infid):
        extras["max_infidelity"] = max(extras.get("max_infidelity", 0.0), infid)

    res = _run("correctness", scheme, trials, seed, body, acc, threads=threads)
    res.extras.setdefault("max_infidelity", 0.0)
    return res


def run_counterfeit_game(adv, scheme, trials: int, seed: int, threads: int = 1) -> GameResult:
    _check_budget(adv, scheme)

    def body(rng):
        ch = Challenger(scheme, rng)
        sub = adv.counterfeit(ch, rng)
        accepted, p = ch.judge_counterfeit(sub)
        return accepted > ch.mints, p, {"dims": ch.adversary_dims(), "info": (ch.mints, accepted)}

    def acc(extras, info):
        m, a = info
        extras["max_mints"] = max(extras.get("max_mints", 0), m)
        extras["total_accepted"] = extras.get("total_accepted", 0) + a

    return _run(
        "counterfeit", scheme, trials, seed, body, acc, {"adversary": adv.name}, threads=threads
    )


def run_sabotage_game(
    adv, scheme, trials: int, seed: int, verifier: str = "franchised", threads: int = 1
) -> GameResult:
    """``verifier="full"`` makes both checks use ``V = A, W = A^perp`` (simple scheme only)."""
    if verifier not in ("franchised", "full"):
        raise ValueError(f"verifier must be 'franchised' or 'full', got {verifier!r}")
    _check_budget(adv, scheme)

    def body(rng):
        ch = Challenger(scheme, rng, verifier)
        note, id1, id2 = adv.sabotage(ch, rng)
        won, p = ch.judge_sabotage(note, id1, id2)
        return won, p, {"dims": ch.adversary_dims(), "info": None}

    return _run(
        "sabotage",
        scheme,
        trials,
        seed,
        body,
        extra_params={"adversary": adv.name, "verifier": verifier},
        threads=threads,
    )
