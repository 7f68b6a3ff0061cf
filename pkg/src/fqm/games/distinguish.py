"""Full-versus-franchised oracle distinguishing game and the "good master key" predicate.

The challenger flips ``b``.  For ``b = 0`` queries are answered by membership
in ``A`` / ``A^perp``.  For ``b = 1`` they are answered with the honest keys of
``M(msk)``, the master key whose hidden vectors were moved by a random
``M`` from the automorphism group of ``(A, A^perp)``.  The adversary knows
the real master key, so only the re-keyed honest vectors are hidden from it.
"""
from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from ..gf2 import (
    GF2Matrix,
    GF2Vector,
    Subspace,
    is_automorphism,
    member_many,
    pack_words,
    random_words,
    sample_automorphism,
)
from ..simple import SimpleMsk
from .harness import map_trials
from .stats import abs_interval, newcombe


class OracleError(ValueError):
    pass


@dataclass(frozen=True)
class OracleQuery:
    id: int
    s: int
    x: GF2Vector


def _adversary_ids(msk: SimpleMsk) -> range:
    return msk.params.adversary_ids


def _n_honest(msk: SimpleMsk) -> int:
    return msk.params.big_n - msk.params.collusion_c


def _check_query(q: OracleQuery, n_honest: int, n: int) -> None:
    if not 1 <= q.id <= n_honest:
        raise OracleError(f"query id {q.id} outside honest range [1, {n_honest}]")
    if q.s not in (0, 1):
        raise OracleError(f"selector must be 0 or 1, got {q.s}")
    if q.x.n != n:
        raise OracleError(f"query vector has length {q.x.n}, expected {n}")


def oracle_full(a: Subspace, q: OracleQuery, n_honest: int) -> bool:
    """``s = 0``: is ``x`` in ``A``.  ``s = 1``: is ``x`` in ``A^perp``.  The id is only range-checked."""
    _check_query(q, n_honest, a.n)
    return a.member(q.x) if q.s == 0 else a.complement().member(q.x)


def oracle_fran(msk_prime: SimpleMsk, q: OracleQuery) -> bool:
    """``s = 0``: is ``x`` in ``W'_id^perp``.  ``s = 1``: is ``x`` in ``V'_id^perp``."""
    _check_query(q, _n_honest(msk_prime), msk_prime.params.n)
    if q.s == 0:
        return msk_prime.w_space(q.id).complement().member(q.x)
    return msk_prime.v_space(q.id).complement().member(q.x)


def oracle_full_many(a: Subspace, s: int, xs: np.ndarray) -> np.ndarray:
    """Batched :func:`oracle_full` on packed query words (see :func:`fqm.gf2.pack_words`)."""
    return member_many(a if s == 0 else a.complement(), xs)


def oracle_fran_many(msk_prime: SimpleMsk, key_id: int, s: int, xs: np.ndarray) -> np.ndarray:
    if not 1 <= key_id <= _n_honest(msk_prime):
        raise OracleError(f"query id {key_id} outside honest range")
    space = msk_prime.w_space(key_id) if s == 0 else msk_prime.v_space(key_id)
    return member_many(space.complement(), xs)


def adversary_index_unions(msk: SimpleMsk, adversary_ids=None) -> tuple[frozenset, frozenset]:
    ids = _adversary_ids(msk) if adversary_ids is None else adversary_ids
    i_adv, j_adv = set(), set()
    for key_id in ids:
        i_set, j_set = msk.indices(key_id)
        i_adv.update(i_set)
        j_adv.update(j_set)
    return frozenset(i_adv), frozenset(j_adv)


def m_of_msk(msk: SimpleMsk, m: GF2Matrix, adversary_ids=None) -> SimpleMsk:
    """Apply ``m`` to every secret vector the colluding keys do not contain."""
    if not is_automorphism(m, msk.a):
        raise ValueError("matrix is not in the automorphism group of (A, A^perp)")
    i_adv, j_adv = adversary_index_unions(msk, adversary_ids)
    vs = tuple(v if i in i_adv else m.matvec(v) for i, v in enumerate(msk.v_list, start=1))
    ws = tuple(w if j in j_adv else m.matvec(w) for j, w in enumerate(msk.w_list, start=1))
    return replace(msk, v_list=vs, w_list=ws)


def is_good_msk(msk: SimpleMsk, adversary_ids=None) -> bool:
    """Every honest key adds at least ``t/4`` fresh dimensions to the colluders' span, in both V and W."""
    p = msk.params
    ids = _adversary_ids(msk) if adversary_ids is None else adversary_ids
    n = p.n
    v_adv = Subspace(n, (v for k in ids for v in (msk.v_list[i - 1] for i in msk.indices(k)[0])))
    w_adv = Subspace(n, (w for k in ids for w in (msk.w_list[j - 1] for j in msk.indices(k)[1])))
    need = p.t / 4
    adv = set(ids)
    for key_id in range(1, p.big_n + 1):
        if key_id in adv:
            continue
        if (v_adv + msk.v_space(key_id)).dim < v_adv.dim + need:
            return False
        if (w_adv + msk.w_space(key_id)).dim < w_adv.dim + need:
            return False
    return True


# ---------------------------------------------------------------------------
# oracle handle and distinguishers


class Oracle:
    """What a distinguisher may call; counts queries."""

    def __init__(self, msk: SimpleMsk, b: int, msk_prime: SimpleMsk | None):
        self._msk = msk
        self._b = b
        self._prime = msk_prime
        self.n_honest = _n_honest(msk)
        self.n = msk.params.n
        self.queries = 0

    def __call__(self, q: OracleQuery) -> bool:
        self.queries += 1
        if self._b == 0:
            return oracle_full(self._msk.a, q, self.n_honest)
        return oracle_fran(self._prime, q)

    def many(self, key_id: int, s: int, xs: np.ndarray) -> np.ndarray:
        if not 1 <= key_id <= self.n_honest:
            raise OracleError(f"query id {key_id} outside honest range")
        self.queries += len(xs)
        if self._b == 0:
            return oracle_full_many(self._msk.a, s, xs)
        return oracle_fran_many(self._prime, key_id, s, xs)


class CoinFlip:
    name = "coin"

    def guess(self, msk: SimpleMsk, oracle: Oracle, rng: np.random.Generator) -> int:
        return int(rng.integers(2))


class MembershipScan:
    """Query ``q`` random ``x`` outside ``A`` with ``s = 0`` at random honest ids; say "franchised" on any accept."""

    def __init__(self, queries: int = 100):
        self.queries = queries
        self.name = f"scan(q={queries})"

    def guess(self, msk: SimpleMsk, oracle: Oracle, rng: np.random.Generator) -> int:
        if oracle.n_honest == 0 or self.queries == 0:
            return 0
        n = msk.params.n
        xs = random_words(self.queries, n, rng)
        inside = member_many(msk.a, xs)
        while inside.any():
            xs[inside] = random_words(int(inside.sum()), n, rng)
            inside = member_many(msk.a, xs)
        ids = rng.integers(1, oracle.n_honest + 1, size=self.queries)
        for key_id in np.unique(ids):
            if oracle.many(int(key_id), 0, xs[ids == key_id]).any():
                return 1
        return 0


class InsideQueries:
    """Query ``q`` random elements of ``A`` with ``s = 0``; both oracles accept them."""

    def __init__(self, queries: int = 100):
        self.queries = queries
        self.name = f"inside(q={queries})"

    def guess(self, msk: SimpleMsk, oracle: Oracle, rng: np.random.Generator) -> int:
        if oracle.n_honest == 0:
            return 0
        basis = msk.a.rows
        coeffs = rng.integers(0, 2, size=(self.queries, len(basis)))
        xs = [0] * self.queries
        for k in range(self.queries):
            for c, r in zip(coeffs[k], basis):
                if c:
                    xs[k] ^= r
        packed = pack_words(xs, msk.params.n)
        ids = rng.integers(1, oracle.n_honest + 1, size=self.queries)
        for key_id in np.unique(ids):
            if not oracle.many(int(key_id), 0, packed[ids == key_id]).all():
                return 1
        return 0


DISTINGUISHERS = {"coin": CoinFlip, "scan": MembershipScan, "inside": InsideQueries}


@dataclass
class DistinguishResult:
    distinguisher: str
    params: dict
    trials: int
    seeds: list[int] = field(default_factory=list)
    bits: list[int] = field(default_factory=list)
    guesses: list[int] = field(default_factory=list)
    queries: list[int] = field(default_factory=list)
    wall_ms: list[float] = field(default_factory=list)

    def counts(self) -> tuple[int, int, int, int]:
        """``(n0, k0, n1, k1)``: trials with ``b = 0`` and how many guessed 1, same for ``b = 1``."""
        n0 = sum(1 for b in self.bits if b == 0)
        n1 = len(self.bits) - n0
        k0 = sum(1 for b, g in zip(self.bits, self.guesses) if b == 0 and g == 1)
        k1 = sum(1 for b, g in zip(self.bits, self.guesses) if b == 1 and g == 1)
        return n0, k0, n1, k1

    @property
    def advantage(self) -> float:
        n0, k0, n1, k1 = self.counts()
        p0 = k0 / n0 if n0 else 0.0
        p1 = k1 / n1 if n1 else 0.0
        return abs(p0 - p1)

    @property
    def interval(self) -> tuple[float, float]:
        """95% interval for the advantage."""
        n0, k0, n1, k1 = self.counts()
        if n0 == 0 or n1 == 0:
            return 0.0, 1.0
        return abs_interval(*newcombe(k1, n1, k0, n0))

    def summary(self) -> dict:
        n0, k0, n1, k1 = self.counts()
        return {
            "game": "distinguish",
            "distinguisher": self.distinguisher,
            "trials": self.trials,
            "trials_b0": n0,
            "guessed_fran_b0": k0,
            "trials_b1": n1,
            "guessed_fran_b1": k1,
            "advantage": self.advantage,
            "interval_95": list(self.interval),
            "correct": sum(int(b == g) for b, g in zip(self.bits, self.guesses)),
        }

    def rows(self) -> list[dict]:
        return [
            {"trial": k, "seed": s, "b": b, "guess": g, "outcome": int(b == g), "queries": q,
             "probability": None, "wall_ms": w}
            for k, (s, b, g, q, w) in enumerate(
                zip(self.seeds, self.bits, self.guesses, self.queries, self.wall_ms)
            )
        ]


def scan_bound(queries: int, t: int) -> float:
    """Upper bound ``q * 2^(1 - t/4)`` on the membership-scan advantage."""
    return queries * 2.0 ** (1 - t / 4)


def run_distinguish_game(
    dist, msk: SimpleMsk, trials: int, seed: int, threads: int = 1
) -> DistinguishResult:
    p = msk.params
    res = DistinguishResult(
        dist.name,
        {"n": p.n, "t": p.t, "big_n": p.big_n, "collusion_c": p.collusion_c, "seed": seed},
        trials,
    )


    def one(rng):
        b = int(rng.integers(2))
        prime = m_of_msk(msk, sample_automorphism(msk.a, rng)) if b == 1 else None
        oracle = Oracle(msk, b, prime)
        return b, int(dist.guess(msk, oracle, rng)), oracle.queries

    for s, (b, guess, q), ms in map_trials(one, trials, seed, threads):
        res.seeds.append(s)
        res.bits.append(b)
        res.guesses.append(guess)
        res.queries.append(q)
        res.wall_ms.append(ms)
    return res
