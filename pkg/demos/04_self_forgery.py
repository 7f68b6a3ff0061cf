"""Colluding users can forge notes that their own keys accept, but honest keys usually reject them."""
from __future__ import annotations

from fqm import simple
from fqm.games import AdversaryView, SelfForgery, SimpleScheme, adversary_self_forgery, run_counterfeit_game
from fqm.games.stats import trial_rng


def main(n: int = 64, trials: int = 200, seed: int = 3) -> None:
    p = simple.SimpleParams(n)
    msk = simple.setup(p, trial_rng(seed, 0))
    keys = [simple.franchise(msk, i) for i in p.adversary_ids]
    view = AdversaryView.from_simple_keys(keys, n)
    note = adversary_self_forgery(view)
    print(f"colluders {list(p.adversary_ids)} pool dim V_adv = {view.v_adv_space.dim}")
    for k in keys:
        print(f"  own key {k.id}: accepts with probability {simple.acceptance(k, note)[0]}")
    for i in list(p.honest_ids)[:4]:
        print(f"  honest key {i}: accepts with probability {simple.acceptance(simple.franchise(msk, i), note)[0]}")
    res = run_counterfeit_game(SelfForgery(), SimpleScheme(p), trials, seed)
    print(f"counterfeit game over {trials} banks: win rate {res.win_rate:.3f} "
          f"(exact expectation {res.extras['expected_win_rate']:.3f})")


if __name__ == "__main__":
    main()
