"""One bank, ten users, each with a different verification key for the same note."""
from __future__ import annotations

import numpy as np

from fqm import simple


def main(n: int = 36, seed: int = 1) -> None:
    rng = np.random.default_rng(seed)
    p = simple.SimpleParams(n)
    msk = simple.setup(p, rng)
    bank = simple.SimpleBank(msk)
    note = simple.mint(msk)
    print(f"n={n}, t={p.t}: every key holds {p.t} vectors of A and {p.t} of A^perp")
    for _ in range(p.big_n):
        svk = bank.franchise()
        res = simple.verify(svk, note, rng)
        print(f"  user {svk.id:2d}: dim V={svk.v_space.dim}, dim W={svk.w_space.dim}, "
              f"accepted={res.accepted} (p={res.probability})")
        note = res.note
    print("the note survives all checks unchanged")


if __name__ == "__main__":
    main()
