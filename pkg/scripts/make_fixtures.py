"""Regenerate ``src/fqm/fixtures`` from brute-force computations.

Expected values come from enumeration and the dense statevector backend, not
from the closed forms the self-test checks.

    python3 scripts/make_fixtures.py
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from fqm import full, qstate, simple
from fqm.gf2 import GF2Vector, Subspace, sample_subspace, sample_vector_in
from fqm.qstate import CosetState

OUT = Path(__file__).resolve().parents[1] / "src" / "fqm" / "fixtures"


def rows(s: Subspace) -> list[str]:
    return [GF2Vector(r, s.n).to_str() for r in s.rows]


def brute_perp(s: Subspace) -> Subspace:
    elems = list(s.elements())
    ys = [y for y in range(1 << s.n) if all(bin(y & x).count("1") % 2 == 0 for x in elems)]
    return Subspace(s.n, ys)


def as_fraction(p: float) -> str:
    return str(Fraction(p).limit_denominator(1 << 20))


def main() -> None:
    rng = np.random.default_rng(20240601)
    OUT.mkdir(parents=True, exist_ok=True)

    had = []
    for n in range(1, 9):
        for d in sorted({0, n // 2, n, int(rng.integers(0, n + 1))}):
            a = sample_subspace(n, d, rng)
            had.append({"n": n, "a": rows(a), "perp": rows(brute_perp(a))})
    (OUT / "hadamard.json").write_text(json.dumps(had, indent=1) + "\n")

    acc = []
    for _ in range(40):
        n = int(rng.integers(2, 9))
        b = sample_subspace(n, int(rng.integers(0, n + 1)), rng)
        v = sample_subspace(n, int(rng.integers(0, n + 1)), rng)
        w = sample_subspace(n, int(rng.integers(0, n + 1)), rng)
        p, _ = qstate.dense_verify_probability(qstate.to_dense(qstate.coset_from_subspace(b)), v, w)
        acc.append({"n": n, "b": rows(b), "v": rows(v), "w": rows(w), "p": as_fraction(p)})
    (OUT / "acceptance.json").write_text(json.dumps(acc, indent=1) + "\n")

    proj = []
    for _ in range(30):
        n = int(rng.integers(2, 8))
        s = sample_subspace(n, int(rng.integers(0, n + 1)), rng)
        st = CosetState(s, GF2Vector(int(rng.integers(1 << n)), n), GF2Vector(int(rng.integers(1 << n)), n))
        t = sample_subspace(n, int(rng.integers(0, n + 1)), rng)
        out = qstate.dense_project_membership(qstate.to_dense(st), t)
        post = None
        if out.accepted_state is not None:
            amps = out.accepted_state.amplitudes
            support = [x for x in range(1 << n) if abs(amps[x]) > 1e-9]
            x0 = support[0]
            space = Subspace(n, [x ^ x0 for x in support])
            ref = amps[x0]
            # character: solve sign pattern by brute force over the dual
            char = next(
                c for c in range(1 << n)
                if all(
                    np.isclose(amps[x], ref * (-1) ** bin(c & (x ^ x0)).count("1")) for x in support
                )
            )
            post = CosetState(space, GF2Vector(x0, n), GF2Vector(char, n)).to_text()
        proj.append({"state": st.to_text(), "t": rows(t), "n": n,
                     "p": as_fraction(out.accept_probability), "post": post})
    (OUT / "projection.json").write_text(json.dumps(proj, indent=1) + "\n")

    msk = simple.setup(simple.SimpleParams(8), rng)
    note = simple.mint(msk)
    a = msk.a
    vec = sample_vector_in(a, rng)
    (OUT / "banknote.json").write_text(
        json.dumps(
            {
                "hex": full.serialize(note).hex(),
                "n": 8,
                "dim": a.dim,
                "basis": rows(a),
                "member": vec.to_str(),
            },
            indent=1,
        )
        + "\n"
    )


if __name__ == "__main__":
    main()
