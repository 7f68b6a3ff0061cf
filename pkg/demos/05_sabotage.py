"""A note accepted by one user and rejected by the next: possible with franchised keys, not with the full key."""
from __future__ import annotations

from fqm import simple
from fqm.games import RandomDenseState, SelfForgery, SimpleScheme, run_sabotage_game


def main(trials: int = 200, seed: int = 4) -> None:
    franchised = run_sabotage_game(SelfForgery(), SimpleScheme(simple.SimpleParams(16)), trials, seed)
    print(f"self-forged note, franchised keys, n=16: sabotage rate {franchised.win_rate:.3f} "
          f"(exact {franchised.extras['expected_win_rate']:.3f})")
    scheme = SimpleScheme(simple.SimpleParams(8), "dense")
    for verifier in ("franchised", "full"):
        res = run_sabotage_game(RandomDenseState(), scheme, trials, seed, verifier)
        print(f"random dense state, {verifier} keys, n=8: sabotage rate {res.win_rate:.3f}")


if __name__ == "__main__":
    main()
