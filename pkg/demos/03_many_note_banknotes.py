"""Each note gets its own subspace; its keys ride along encrypted and signed."""
from __future__ import annotations

import numpy as np

from fqm import full


def main(n: int = 16, seed: int = 2, provider: str = "standard") -> None:
    rng = np.random.default_rng(seed)
    p = full.FullParams(n)
    msk = full.setup(p, rng, provider)
    svk = full.franchise(msk, rng)
    notes = [full.mint(msk, p, rng) for _ in range(3)]
    for k, note in enumerate(notes):
        res = full.verify(svk, note, rng)
        print(f"note {k}: {len(note.ciphertexts)} ciphertexts, accepted={res.accepted}")
    raw = full.serialize(notes[0])
    print(f"wire size: {len(raw)} bytes")
    tampered = bytearray(raw)
    tampered[-1] ^= 1
    res = full.verify(svk, full.deserialize(bytes(tampered)), rng)
    print(f"one flipped signature bit -> accepted={res.accepted}, stage={res.stage}")
    swapped = full.FullBanknote(notes[1].state, notes[0].ciphertexts, notes[0].signature)
    prob, _ = full.acceptance(svk, swapped)
    print(f"note 1's state with note 0's classical part passes with probability {float(prob):.3g}")


if __name__ == "__main__":
    main()
