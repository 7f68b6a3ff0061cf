"""Security games: correctness, counterfeiting, sabotage and oracle distinguishing."""
from __future__ import annotations

from .adversaries import (
    ADVERSARIES,
    AdversaryView,
    EntangledForgery,
    HonestForwarder,
    RandomDenseState,
    SelfForgery,
    SubspaceNote,
    adversary_self_forgery,
    self_forgery_space,
)
from .distinguish import (
    DISTINGUISHERS,
    CoinFlip,
    DistinguishResult,
    InsideQueries,
    MembershipScan,
    OracleError,
    OracleQuery,
    is_good_msk,
    m_of_msk,
    oracle_fran,
    oracle_full,
    run_distinguish_game,
    scan_bound,
)
from .harness import (
    Challenger,
    FullScheme,
    GameFault,
    GameResult,
    JointSubmission,
    SimpleScheme,
    joint_state,
    run_correctness,
    run_counterfeit_game,
    run_sabotage_game,
)
from .stats import trial_rng, trial_seed, wilson

__all__ = [name for name in dir() if not name.startswith("_")]
