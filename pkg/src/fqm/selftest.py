"""Cross-backend equivalence and invariant checks run by ``fqm selftest``."""
from __future__ import annotations

import json
import time
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import numpy as np

from . import full, qstate, simple
from .games.distinguish import m_of_msk
from .gf2 import GF2Vector, Subspace, is_automorphism, sample_automorphism, sample_subspace
from .qstate import CosetState


@dataclass
class Check:
    name: str
    ok: bool
    cases: int
    detail: str = ""

    def as_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "cases": self.cases, "detail": self.detail}


def _space(rows, n: int) -> Subspace:
    return Subspace(n, [GF2Vector.from_str(r) for r in rows])


def _load(directory: Path, name: str):
    return json.loads((directory / name).read_text())


def _fixture_check(directory: Path, name: str, fn) -> Check:
    label = f"fixture:{name}"
    try:
        data = _load(directory, name)
    except (OSError, ValueError) as exc:
        return Check(label, False, 0, f"cannot load: {exc}")
    bad = []
    for k, case in enumerate(data if isinstance(data, list) else [data]):
        try:
            err = fn(case)
        except Exception as exc:  # a corrupted case must be reported, not crash the run
            err = f"{type(exc).__name__}: {exc}"
        if err:
            bad.append(f"case {k}: {err}")
    return Check(label, not bad, len(data) if isinstance(data, list) else 1, "; ".join(bad[:5]))


def _hadamard_case(case) -> str | None:
    n = case["n"]
    a, perp = _space(case["a"], n), _space(case["perp"], n)
    if a.complement() != perp:
        return "symbolic complement differs"
    dense = qstate.dense_hadamard_all(qstate.to_dense(qstate.coset_from_subspace(a)))
    f = qstate.dense_fidelity(dense, qstate.to_dense(qstate.coset_from_subspace(perp)))
    if f < 1 - 1e-10:
        return f"dense fidelity {f}"
    return None


def _acceptance_case(case) -> str | None:
    n = case["n"]
    b, v, w = (_space(case[k], n) for k in ("b", "v", "w"))
    want = Fraction(case["p"])
    got = qstate.acceptance_probability(b, v, w)
    if got != want:
        return f"closed form {got} != {want}"
    sym, _ = qstate.verify_probability(qstate.coset_from_subspace(b), v, w)
    if sym != want:
        return f"symbolic pipeline {sym} != {want}"
    return None


def _projection_case(case) -> str | None:
    st = CosetState.from_text(case["state"])
    t = _space(case["t"], case["n"])
    out = qstate.project_membership(st, t)
    if out.accept_probability != Fraction(case["p"]):
        return f"probability {out.accept_probability} != {case['p']}"
    if case["post"] is None:
        return None if out.accepted_state is None else "expected no accepting branch"
    want = CosetState.from_text(case["post"])
    if qstate.fidelity(out.accepted_state, want) != 1:
        return "post-state differs"
    return None


def _banknote_case(case) -> str | None:
    raw = bytes.fromhex(case["hex"])
    note = full.deserialize(raw)
    if full.serialize(note) != raw:
        return "re-serialization differs"
    space = note.state.space
    if space.n != case["n"] or space.dim != case["dim"]:
        return "header fields differ"
    if space != _space(case["basis"], case["n"]):
        return "basis differs"
    if not space.member(GF2Vector.from_str(case["member"])):
        return "member vector not in subspace"
    return None


def _random_checks(rng: np.random.Generator) -> list[Check]:
    out = []

    bad, cases = [], 0
    for n in range(1, 11):
        for _ in range(8):
            a = sample_subspace(n, int(rng.integers(0, n + 1)), rng)
            cases += 1
            if a.complement().complement() != a or a.dim + a.complement().dim != n:
                bad.append(f"n={n} complement")
            h = qstate.dense_hadamard_all(qstate.to_dense(qstate.coset_from_subspace(a)))
            f = qstate.state_fidelity(h, qstate.hadamard_all(qstate.coset_from_subspace(a)))
            if f < 1 - 1e-10:
                bad.append(f"n={n} hadamard fidelity {f}")
    out.append(Check("hadamard-duality", not bad, cases, "; ".join(bad[:5])))

    bad, cases = [], 0
    for _ in range(120):
        n = int(rng.integers(1, 9))
        b, v, w = (sample_subspace(n, int(rng.integers(0, n + 1)), rng) for _ in range(3))
        cases += 1
        sym = qstate.acceptance_probability(b, v, w)
        dense, _ = qstate.dense_verify_probability(qstate.to_dense(qstate.coset_from_subspace(b)), v, w)
        if abs(float(sym) - dense) > 1e-10:
            bad.append(f"n={n}: {sym} vs {dense}")
    out.append(Check("acceptance-oracle-agreement", not bad, cases, "; ".join(bad[:5])))

    bad, cases = [], 0
    for n in (4, 8, 16, 32):
        a = sample_subspace(n, n // 2, rng)
        for _ in range(3):
            cases += 1
            if not is_automorphism(sample_automorphism(a, rng), a):
                bad.append(f"n={n}")
    out.append(Check("automorphism-membership", not bad, cases, "; ".join(bad)))

    bad, cases = [], 0
    for n in (8, 16, 36):
        p = simple.SimpleParams(n)
        msk = simple.setup(p, rng)
        note = simple.mint(msk)
        for key_id in range(1, p.big_n + 1):
            cases += 1
            res = simple.verify(simple.franchise(msk, key_id), note, rng)
            if not (res.accepted and res.probability == 1 and res.note.state == note.state):
                bad.append(f"simple n={n} id={key_id}")
        fp = full.FullParams(n)
        fmsk = full.setup(fp, rng, "fast")
        for _ in range(5):
            cases += 1
            fnote = full.mint(fmsk, fp, rng)
            res = full.verify(full.franchise(fmsk, rng), fnote, rng)
            if not (res.accepted and res.note.state == fnote.state):
                bad.append(f"full n={n}")
    out.append(Check("correctness", not bad, cases, "; ".join(bad[:5])))

    bad, cases = [], 0
    p = simple.SimpleParams(8, t=2, big_n=4, collusion_c=1)
    for _ in range(3):
        msk = simple.setup(p, rng)
        prime = m_of_msk(msk, sample_automorphism(msk.a, rng))
        a_perp = msk.a.complement()
        for key_id in p.honest_ids:
            w_perp = prime.w_space(key_id).complement()
            v_perp = prime.v_space(key_id).complement()
            for x in range(1 << 8):
                cases += 2
                if msk.a.member(x) and not w_perp.member(x):
                    bad.append(f"s=0 x={x}")
                if a_perp.member(x) and not v_perp.member(x):
                    bad.append(f"s=1 x={x}")
    out.append(Check("oracle-one-sidedness", not bad, cases, "; ".join(bad[:5])))
    return out


def default_fixture_dir() -> Path:
    return Path(str(resources.files("fqm") / "fixtures"))


def run_selftest(fixtures: Path | None = None, seed: int = 0) -> dict:
    t0 = time.perf_counter()
    directory = Path(fixtures) if fixtures is not None else default_fixture_dir()
    checks = [
        _fixture_check(directory, "hadamard.json", _hadamard_case),
        _fixture_check(directory, "acceptance.json", _acceptance_case),
        _fixture_check(directory, "projection.json", _projection_case),
        _fixture_check(directory, "banknote.json", _banknote_case),
    ]
    checks += _random_checks(np.random.default_rng(seed))
    return {
        "passed": all(c.ok for c in checks),
        "checks": [c.as_dict() for c in checks],
        "failures": [c.name for c in checks if not c.ok],
        "seconds": round(time.perf_counter() - t0, 3),
    }
