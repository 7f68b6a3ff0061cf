"""Full-membership oracle versus franchised oracle: the membership scan can tell them apart at small t."""
from __future__ import annotations

import numpy as np

from fqm import simple
from fqm.games import CoinFlip, InsideQueries, MembershipScan, is_good_msk, run_distinguish_game, scan_bound


def main(n: int = 64, trials: int = 200, seed: int = 5) -> None:
    p = simple.SimpleParams(n)
    msk = simple.setup(p, np.random.default_rng(seed))
    print(f"n={n}, t={p.t}, good master key: {is_good_msk(msk)}")
    for dist in (CoinFlip(), InsideQueries(100), MembershipScan(100)):
        res = run_distinguish_game(dist, msk, trials, seed)
        lo, hi = res.interval
        print(f"  {dist.name:12s} advantage {res.advantage:.3f}  95% CI [{lo:.3f}, {hi:.3f}]")
    print(f"bound for the scan: q * 2^(1 - t/4) = {scan_bound(100, p.t):g}")


if __name__ == "__main__":
    main()
