"""Applying H to every qubit of |A> gives |A^perp>: checked symbolically and on the dense statevector."""
from __future__ import annotations

import numpy as np

from fqm import qstate
from fqm.gf2 import sample_subspace


def main(n: int = 6, seed: int = 0) -> None:
    rng = np.random.default_rng(seed)
    a = sample_subspace(n, n // 2, rng)
    print(f"A (dim {a.dim} in GF(2)^{n}):\n{a.to_text()}\n")
    print(f"A^perp:\n{a.complement().to_text()}\n")
    state = qstate.coset_from_subspace(a)
    symbolic = qstate.hadamard_all(state)
    print("symbolic H|A> == |A^perp>:", symbolic == qstate.coset_from_subspace(a.complement()))
    dense = qstate.dense_hadamard_all(qstate.to_dense(state))
    f = qstate.dense_fidelity(dense, qstate.to_dense(symbolic))
    print(f"dense fidelity with |A^perp>: {f:.15f}")


if __name__ == "__main__":
    main()
