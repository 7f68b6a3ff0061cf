"""Command-line experiment runner.

Every command derives all randomness from ``--seed``, so the same
configuration reproduces byte-identical reports.  Per-trial wall-clock times
are only written with ``--timing``.

Exit codes: 0 on clean completion (whatever the game outcome), 1 on an
internal error or a failed self-test / benchmark gate, 2 on an invalid
configuration.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import platform
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__, full, qstate, simple
from .games import adversaries as adv_mod
from .games import distinguish as dist_mod
from .games.harness import (
    FullScheme,
    GameFault,
    SimpleScheme,
    run_correctness,
    run_counterfeit_game,
    run_sabotage_game,
)
from .gf2 import Subspace, sample_automorphism, sample_subspace

DEFAULTS = {
    "scheme": "simple",
    "backend": "symbolic",
    "n": 16,
    "t": None,
    "big_n": None,
    "collusion_c": None,
    "lam": None,
    "provider": "standard",
    "adversary": None,
    "target": "v",
    "mints": 0,
    "queries": 100,
    "verifier": "franchised",
    "trials": 100,
    "seed": 0,
    "threads": 1,
    "out": None,
    "format": "both",
    "timing": False,
    "id": None,
    "index": 0,
    "note": None,
}

# role tags for seed derivation in the single-shot commands
_ROLE_MSK, _ROLE_KEY, _ROLE_MINT, _ROLE_VERIFY = 1, 2, 3, 4


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"invalid {field_name}: {message}")
        self.field = field_name


def _rng(seed: int, role: int, index: int = 0) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(seed), spawn_key=(role, index)))


# ---------------------------------------------------------------------------
# configuration


def _common(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("experiment")
    g.add_argument("--config", help="JSON file with any of the options below; flags override it")
    g.add_argument("--scheme", choices=["simple", "full"])
    g.add_argument("--backend", choices=["symbolic", "dense"])
    g.add_argument("--n", type=int)
    g.add_argument("--t", type=int)
    g.add_argument("--big-n", dest="big_n", type=int)
    g.add_argument("--collusion-c", dest="collusion_c", type=int)
    g.add_argument("--lam", type=int, help="security parameter (defaults to n)")
    g.add_argument("--provider", choices=["standard", "fast"])
    g.add_argument("--trials", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--threads", type=int)
    g.add_argument("--out", help="output path prefix; writes PREFIX.json and/or PREFIX.csv")
    g.add_argument("--format", choices=["json", "csv", "both"])
    g.add_argument("--timing", action="store_true", default=None, help="record per-trial wall_ms")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fqm", description="Franchised quantum money experiments")
    parser.add_argument("--version", action="version", version=f"fqm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("correctness", help="honest franchise/mint/verify trials")
    _common(p)

    p = sub.add_parser("mint", help="mint one note from the seeded bank and write it")
    _common(p)
    p.add_argument("--index", type=int, help="which note of the seeded bank to mint")

    p = sub.add_parser("franchise", help="print a verification key of the seeded bank")
    _common(p)
    p.add_argument("--id", type=int)

    p = sub.add_parser("verify", help="verify a serialized note with a key of the seeded bank")
    _common(p)
    p.add_argument("--id", type=int)
    p.add_argument("--note", help="note file written by 'fqm mint'")

    attack = sub.add_parser("attack", help="run a security game")
    games = attack.add_subparsers(dest="game", required=True)
    for name in ("counterfeit", "sabotage"):
        p = games.add_parser(name)
        _common(p)
        p.add_argument("--adversary", choices=sorted(adv_mod.ADVERSARIES))
        p.add_argument("--mints", type=int)
        p.add_argument("--target", choices=["v", "w"], help="self-forgery subspace")
        if name == "sabotage":
            p.add_argument("--verifier", choices=["franchised", "full"])
        else:
            p.add_argument("--copies", type=int, help="entangled adversary: notes in the joint state")
    p = games.add_parser("distinguish")
    _common(p)
    p.add_argument("--adversary", choices=sorted(dist_mod.DISTINGUISHERS))
    p.add_argument("--queries", type=int)

    p = sub.add_parser("selftest", help="cross-backend equivalence and invariant checks")
    p.add_argument("--fixtures", help="fixture directory (defaults to the packaged one)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", help="write the JSON report here")

    p = sub.add_parser("bench", help="time core kernels; optional regression gate")
    p.add_argument("--repeat", type=int, default=20)
    p.add_argument("--baseline", help="JSON from an earlier 'fqm bench --out'")
    p.add_argument("--tolerance", type=float, default=3.0, help="allowed slowdown factor")
    p.add_argument("--out", help="write the JSON report here")
    return parser


def resolve_config(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        try:
            loaded = json.loads(Path(args.config).read_text())
        except (OSError, ValueError) as exc:
            raise ConfigError("config", str(exc)) from exc
        if not isinstance(loaded, dict):
            raise ConfigError("config", "top level must be a JSON object")
        for key, value in loaded.items():
            key = key.replace("-", "_")
            if key not in DEFAULTS and key not in ("copies", "game"):
                raise ConfigError(key, "unknown option")
            cfg[key] = value
    for key, value in vars(args).items():
        if value is not None and key not in ("config", "command", "game"):
            cfg[key] = value
    cfg["command"] = args.command
    if getattr(args, "game", None):
        cfg["game"] = args.game
    return cfg


def _int_field(cfg: dict, key: str, minimum: int | None = None, optional: bool = False) -> None:
    v = cfg.get(key)
    if v is None and optional:
        return
    if isinstance(v, bool) or not isinstance(v, int):
        raise ConfigError(key, f"must be an integer, got {v!r}")
    if minimum is not None and v < minimum:
        raise ConfigError(key, f"must be >= {minimum}, got {v}")


def validate(cfg: dict) -> None:
    if cfg["scheme"] not in ("simple", "full"):
        raise ConfigError("scheme", f"must be simple or full, got {cfg['scheme']!r}")
    if cfg["backend"] not in ("symbolic", "dense"):
        raise ConfigError("backend", f"must be symbolic or dense, got {cfg['backend']!r}")
    if cfg["provider"] not in ("standard", "fast"):
        raise ConfigError("provider", f"unknown provider {cfg['provider']!r}")
    if cfg["format"] not in ("json", "csv", "both"):
        raise ConfigError("format", f"must be json, csv or both, got {cfg['format']!r}")
    _int_field(cfg, "n", 1)
    for key in ("t", "big_n", "collusion_c", "lam"):
        _int_field(cfg, key, 0, optional=True)
    _int_field(cfg, "trials", 0)
    _int_field(cfg, "seed", 0)
    _int_field(cfg, "threads", 1)
    _int_field(cfg, "mints", 0)
    _int_field(cfg, "queries", 0)
    _int_field(cfg, "index", 0)
    if cfg["backend"] == "dense" and cfg["n"] > qstate.DENSE_CAP:
        raise ConfigError("backend", f"dense backend needs n <= {qstate.DENSE_CAP}, got n={cfg['n']}")
    try:
        simple.SimpleParams(cfg["n"], cfg["t"], cfg["big_n"], cfg["collusion_c"], cfg["lam"])
    except simple.ParamError as exc:
        raise ConfigError(exc.field, exc.message) from exc


def make_scheme(cfg: dict):
    if cfg["scheme"] == "simple":
        p = simple.SimpleParams(cfg["n"], cfg["t"], cfg["big_n"], cfg["collusion_c"], cfg["lam"])
        return SimpleScheme(p, cfg["backend"])
    p = full.FullParams(cfg["n"], cfg["t"], cfg["lam"])
    return FullScheme(p, cfg["backend"], cfg["provider"], cfg["big_n"], cfg["collusion_c"])


def make_adversary(cfg: dict):
    name = cfg.get("adversary") or "honest"
    if name not in adv_mod.ADVERSARIES:
        raise ConfigError("adversary", f"unknown adversary {name!r}")
    if name == "honest":
        return adv_mod.HonestForwarder(max(cfg["mints"], 1))
    if name == "self-forgery":
        return adv_mod.SelfForgery(cfg["target"], cfg["mints"])
    if name == "random-subspace":
        return adv_mod.SubspaceNote()
    if name == "random-dense":
        if cfg["backend"] != "dense":
            raise ConfigError("adversary", "random-dense needs --backend dense")
        return adv_mod.RandomDenseState()
    if cfg["backend"] != "dense":
        raise ConfigError("adversary", "entangled needs --backend dense")
    copies = cfg.get("copies") or 2
    if copies * cfg["n"] > qstate.DENSE_CAP:
        raise ConfigError("copies", f"{copies} notes of {cfg['n']} qubits exceed the dense cap")
    return adv_mod.EntangledForgery(copies)


# ---------------------------------------------------------------------------
# reports


def environment_stamp() -> dict:
    import cryptography
    import scipy

    return {
        "fqm": __version__,
        "python": platform.python_version(),
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "cryptography": cryptography.__version__,
    }


_PARAM_COLS = ("scheme", "backend", "n", "t", "big_n", "collusion_c")


def _echo(cfg: dict) -> dict:
    return {k: v for k, v in sorted(cfg.items()) if k not in ("out", "format", "config")}


def render(cfg: dict, summary: dict, rows: list[dict], params: dict, extra_cols=()) -> tuple[str, str]:
    report = {"config": _echo(cfg), "summary": summary, "environment": environment_stamp()}
    js = json.dumps(report, indent=2, sort_keys=True) + "\n"
    cols = ["trial", "seed", *_PARAM_COLS, *extra_cols, "outcome", "probability", "wall_ms"]
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
    w.writeheader()
    timing = bool(cfg.get("timing"))
    for r in rows:
        row = {c: params.get(c, "") for c in _PARAM_COLS}
        row.update(r)
        prob = r.get("probability")
        row["probability"] = "" if prob is None else repr(float(prob))
        ms = r.get("wall_ms")
        row["wall_ms"] = f"{ms:.3f}" if timing and ms is not None else ""
        w.writerow(row)
    tail = {c: params.get(c, "") for c in _PARAM_COLS}
    tail.update(trial="summary", seed=cfg["seed"], outcome=summary.get("wins", summary.get("correct", "")))
    rate = summary.get("win_rate", summary.get("advantage"))
    tail["probability"] = "" if rate is None else repr(float(rate))
    tail["wall_ms"] = ""
    w.writerow(tail)
    return js, buf.getvalue()


def emit(cfg: dict, js: str, csv_text: str) -> None:
    out = cfg.get("out")
    if not out:
        sys.stdout.write(js)
        return
    prefix = Path(out)
    if prefix.suffix in (".json", ".csv"):
        prefix = prefix.with_suffix("")
    prefix.parent.mkdir(parents=True, exist_ok=True)
    if cfg["format"] in ("json", "both"):
        prefix.with_suffix(".json").write_text(js)
    if cfg["format"] in ("csv", "both"):
        prefix.with_suffix(".csv").write_text(csv_text)
    sys.stdout.write(js)


# ---------------------------------------------------------------------------
# commands


def _game_report(cfg: dict, result) -> int:
    js, text = render(cfg, result.summary(), result.rows(), result.params, tuple(result.columns))
    emit(cfg, js, text)
    return 0


def cmd_correctness(cfg: dict) -> int:
    scheme = make_scheme(cfg)
    return _game_report(cfg, run_correctness(scheme, cfg["trials"], cfg["seed"], cfg["threads"]))


def cmd_attack(cfg: dict) -> int:
    game = cfg["game"]
    if game == "distinguish":
        return cmd_distinguish(cfg)
    scheme = make_scheme(cfg)
    adv = make_adversary(cfg)
    if game == "counterfeit":
        res = run_counterfeit_game(adv, scheme, cfg["trials"], cfg["seed"], cfg["threads"])
    else:
        if cfg["verifier"] == "full" and cfg["scheme"] != "simple":
            raise ConfigError("verifier", "full verification keys exist only for the simple scheme")
        res = run_sabotage_game(adv, scheme, cfg["trials"], cfg["seed"], cfg["verifier"], cfg["threads"])
    return _game_report(cfg, res)


def cmd_distinguish(cfg: dict) -> int:
    if cfg["scheme"] != "simple":
        raise ConfigError("scheme", "the distinguishing game is defined over the simple master key")
    name = cfg.get("adversary") or "scan"
    if name not in dist_mod.DISTINGUISHERS:
        raise ConfigError("adversary", f"unknown distinguisher {name!r}")
    dist = dist_mod.CoinFlip() if name == "coin" else dist_mod.DISTINGUISHERS[name](cfg["queries"])
    p = simple.SimpleParams(cfg["n"], cfg["t"], cfg["big_n"], cfg["collusion_c"], cfg["lam"])
    msk = simple.setup(p, _rng(cfg["seed"], _ROLE_MSK))
    res = dist_mod.run_distinguish_game(dist, msk, cfg["trials"], cfg["seed"], cfg["threads"])
    summary = res.summary()
    if name == "scan":
        summary["bound"] = dist_mod.scan_bound(cfg["queries"], p.t)
        summary["below_bound"] = summary["interval_95"][1] <= summary["bound"]
    summary["good_msk"] = dist_mod.is_good_msk(msk)
    params = {"scheme": "simple", "backend": "symbolic", "n": p.n, "t": p.t,
              "big_n": p.big_n, "collusion_c": p.collusion_c}
    js, text = render(cfg, summary, res.rows(), params, extra_cols=("b", "guess", "queries"))
    emit(cfg, js, text)
    return 0


def _bank(cfg: dict):
    scheme = make_scheme(cfg)
    return scheme, scheme.setup(_rng(cfg["seed"], _ROLE_MSK))


def _key(cfg: dict, scheme, msk):
    key_id = cfg.get("id") or 1
    if not 1 <= key_id <= scheme.big_n:
        raise ConfigError("id", f"must be in [1, {scheme.big_n}], got {key_id}")
    if isinstance(scheme, SimpleScheme):
        return key_id, simple.franchise(msk, key_id)
    return key_id, full.franchise(msk, _rng(cfg["seed"], _ROLE_KEY, key_id))


def cmd_mint(cfg: dict) -> int:
    scheme, msk = _bank(cfg)
    note = scheme.mint(msk, _rng(cfg["seed"], _ROLE_MINT, cfg["index"]))
    data = full.serialize(note)
    out = cfg.get("out")
    summary = {"command": "mint", "index": cfg["index"], "bytes": len(data)}
    if out:
        Path(out).parent.mkdir(parents=True, exist_ok=True)
        Path(out).write_bytes(data)
        summary["path"] = str(out)
    else:
        summary["hex"] = data.hex()
    sys.stdout.write(json.dumps({"config": _echo(cfg), "summary": summary}, indent=2, sort_keys=True) + "\n")
    return 0


def _vectors(vs) -> list[str]:
    return [v.to_str() for v in vs]


def cmd_franchise(cfg: dict) -> int:
    scheme, msk = _bank(cfg)
    key_id, svk = _key(cfg, scheme, msk)
    info = {"command": "franchise", "id": key_id, "i_set": list(svk.i_set), "j_set": list(svk.j_set)}
    if isinstance(svk, simple.SimpleSvk):
        info["v"] = _vectors(svk.v_subset)
        info["w"] = _vectors(svk.w_subset)
        info["dim_v"], info["dim_w"] = svk.v_space.dim, svk.w_space.dim
    else:
        info["sig_pk"] = svk.sig_pk.hex()
        info["v_keys"] = [k.key.hex() for k in svk.v_keys]
        info["w_keys"] = [k.key.hex() for k in svk.w_keys]
    text = json.dumps({"config": _echo(cfg), "key": info}, indent=2, sort_keys=True) + "\n"
    if cfg.get("out"):
        Path(cfg["out"]).write_text(text)
    sys.stdout.write(text)
    return 0


def cmd_verify(cfg: dict) -> int:
    if not cfg.get("note"):
        raise ConfigError("note", "a note file is required")
    try:
        raw = Path(cfg["note"]).read_bytes()
    except OSError as exc:
        raise ConfigError("note", str(exc)) from exc
    try:
        note = full.deserialize(raw)
    except full.BanknoteFormatError as exc:
        raise ConfigError("note", f"unreadable note: {exc}") from exc
    scheme, msk = _bank(cfg)
    key_id, svk = _key(cfg, scheme, msk)
    if note.state.n != scheme.n:
        raise ConfigError("n", f"note has n={note.state.n}, configuration has n={scheme.n}")
    if cfg["scheme"] == "simple" and isinstance(note, full.FullBanknote):
        raise ConfigError("scheme", "note carries ciphertexts; use --scheme full")
    if cfg["scheme"] == "full" and not isinstance(note, full.FullBanknote):
        raise ConfigError("scheme", "note has no ciphertexts; use --scheme simple")
    p, _ = scheme.acceptance(svk, note)
    res = scheme.verify(svk, note, _rng(cfg["seed"], _ROLE_VERIFY, key_id))
    summary = {"command": "verify", "id": key_id, "accepted": bool(res.accepted),
               "stage": res.stage, "probability": float(p)}
    text = json.dumps({"config": _echo(cfg), "summary": summary}, indent=2, sort_keys=True) + "\n"
    if cfg.get("out"):
        Path(cfg["out"]).write_text(text)
    sys.stdout.write(text)
    return 0


def cmd_selftest(args) -> int:
    from .selftest import run_selftest

    report = run_selftest(args.fixtures, args.seed)
    text = json.dumps(report, indent=2) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    for c in report["checks"]:
        status = "PASS" if c["ok"] else "FAIL"
        line = f"{status} {c['name']} ({c['cases']} cases)"
        print(line + (f": {c['detail']}" if c["detail"] else ""))
    print("selftest " + ("passed" if report["passed"] else "FAILED: " + ", ".join(report["failures"])))
    return 0 if report["passed"] else 1


def _time(fn, repeat: int) -> float:
    samples = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        samples.append(time.perf_counter() - t0)
    return float(np.median(samples) * 1e6)


def cmd_bench(args) -> int:
    if args.repeat < 1:
        raise ConfigError("repeat", "must be >= 1")
    rng = np.random.default_rng(0)
    a64 = sample_subspace(64, 32, rng)
    b64 = sample_subspace(64, 32, rng)
    p64 = simple.SimpleParams(64)
    msk64 = simple.setup(p64, rng)
    svk64 = simple.franchise(msk64, 1)
    note64 = simple.mint(msk64)
    p12 = simple.SimpleParams(12)
    msk12 = simple.setup(p12, rng)
    svk12 = simple.franchise(msk12, 1)
    note12 = simple.mint(msk12, "dense")
    kernels = {
        "gf2_complement_n64_us": lambda: a64.complement(),
        "gf2_intersect_n64_us": lambda: a64.intersect(b64),
        "gf2_sum_n64_us": lambda: Subspace(64, list(a64.rows) + list(b64.rows)),
        "gf2_automorphism_n64_us": lambda: sample_automorphism(a64, rng),
        "verify_symbolic_n64_us": lambda: simple.verify(svk64, note64, rng),
        "verify_dense_n12_us": lambda: simple.verify(svk12, note12, rng),
    }
    results = {k: _time(fn, args.repeat) for k, fn in kernels.items()}
    report = {"benchmarks": results, "repeat": args.repeat, "environment": environment_stamp()}
    status = 0
    if args.baseline:
        try:
            base = json.loads(Path(args.baseline).read_text())["benchmarks"]
        except (OSError, ValueError, KeyError) as exc:
            raise ConfigError("baseline", str(exc)) from exc
        slow = {k: results[k] / base[k] for k in results if k in base and base[k] > 0}
        regressions = sorted(k for k, r in slow.items() if r > args.tolerance)
        report["ratios"] = slow
        report["regressions"] = regressions
        status = 1 if regressions else 0
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    sys.stdout.write(text)
    return status


COMMANDS = {
    "correctness": cmd_correctness,
    "mint": cmd_mint,
    "franchise": cmd_franchise,
    "verify": cmd_verify,
    "attack": cmd_attack,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "selftest":
            return cmd_selftest(args)
        if args.command == "bench":
            return cmd_bench(args)
        cfg = resolve_config(args)
        validate(cfg)
        return COMMANDS[args.command](cfg)
    except ConfigError as exc:
        print(f"fqm: error: {exc}", file=sys.stderr)
        return 2
    except (GameFault, qstate.DenseCapError) as exc:
        print(f"fqm: error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - report, don't dump a traceback
        print(f"fqm: internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
