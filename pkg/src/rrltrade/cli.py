"""Command-line front end: config-driven experiment runner.

Subcommands
-----------
``features``  build the processed per-stock feature matrices and dump them
              with the PCA model and a provenance manifest
``backtest``  walk-forward run of one strategy: result.csv + metrics.json
``compare``   every configured strategy across the configured portfolio
              sizes, plus a transaction-cost sweep with wealth curves
``stats``     close-price summary table for the aligned panel

Every artifact is written deterministically (sorted JSON keys, fixed float
repr, LF newlines) so identical config + inputs + seed give byte-identical
files. Exit codes: 0 success, 2 config error, 3 data error, 4 numerical
failure.
"""
from __future__ import annotations

import argparse
import csv
import hashlib
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .backtest import (
    StrategyContext,
    compute_metrics,
    cost_sweep,
    make_plan,
    run,
)
from .benchmarks import make_strategy
from .config import RunConfig, config_to_dict, load_config
from .data import OhlcvPanel, align, load_ohlcv, summary_stats
from .errors import ConfigError, RrltradeError
from .indicators import INDICATOR_ORDER, compute_indicators, normalize_table
from .pca import transform as pca_transform
from .pipeline import PreparedData, pca_dwt_features, prepare
from .svg import line_chart

logger = logging.getLogger(__name__)

METRIC_ORDER = ("NP", "APY", "ASR", "MDD", "CR")


# ---------------------------------------------------------------------------
# deterministic writers

def _fnum(x: float) -> str:
    """Shortest round-trip decimal for a float; stable across runs."""
    return repr(float(x))


def _jsonify(obj):
    """Recursively make ``obj`` JSON-safe; non-finite floats become strings."""
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (np.floating, float)):
        f = float(obj)
        if f != f:
            return "NaN"
        if f == float("inf"):
            return "Infinity"
        if f == float("-inf"):
            return "-Infinity"
        return f
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, Path):
        return obj.as_posix()
    return obj


def _write_json(path: Path, payload) -> None:
    text = json.dumps(_jsonify(payload), indent=2, sort_keys=True, allow_nan=False)
    path.write_text(text + "\n", encoding="utf-8")


def _write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(row)


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(65536), b""):
            h.update(chunk)
    return h.hexdigest()


def _write_manifest(out_dir: Path, cfg: RunConfig, command: str) -> None:
    payload = {
        "command": command,
        "tool": "rrltrade",
        "inputs": {
            s.ticker: {"path": s.path.as_posix(), "sha256": _sha256(s.path)}
            for s in cfg.stocks
        },
        "parameters": config_to_dict(cfg),
    }
    _write_json(out_dir / "manifest.json", payload)


# ---------------------------------------------------------------------------
# shared assembly

def _load_panel(cfg: RunConfig, k: int | None = None) -> OhlcvPanel:
    entries = cfg.stocks if k is None else cfg.stocks[:k]
    series = [
        load_ohlcv(e.path, symbol=e.ticker, use_adjusted_close=cfg.use_adjusted_close)
        for e in entries
    ]
    return align(series, mode=cfg.alignment)


def _context(cfg: RunConfig, k: int) -> StrategyContext:
    panel = _load_panel(cfg, k)
    prepared = prepare(panel, cfg.indicators)
    plan = make_plan(prepared.horizon, cfg.trainer.window, cfg.test_window)
    return StrategyContext(
        prepared,
        cfg.preprocess,
        cfg.trainer,
        plan,
        carry_weights=cfg.carry_weights,
        warm_start=cfg.warm_start,
    )


def _horizon_dates(prepared: PreparedData) -> list[str]:
    """ISO dates for horizon rows, read off the first stock's calendar."""
    d = prepared.panel.series[0].dates
    return [d[prepared.warmup + i].isoformat() for i in range(prepared.horizon)]


def _ensure_outdir(cfg: RunConfig) -> Path:
    out = cfg.output_dir
    out.mkdir(parents=True, exist_ok=True)
    return out


def _bps_label(delta: float) -> str:
    bps = delta * 1e4
    return f"{bps:g}bps"


# ---------------------------------------------------------------------------
# subcommands

def cmd_features(cfg: RunConfig, args: argparse.Namespace) -> int:
    if cfg.preprocess.mode != "paper":
        # per-window causal fits live inside backtest/compare; the inspection
        # dump is inherently full-series
        print(
            "features: emitting full-series artifacts; causal refits happen "
            "per window inside backtest/compare",
            file=sys.stderr,
        )
        cfg = replace(cfg, preprocess=replace(cfg.preprocess, mode="paper"))
    out = _ensure_outdir(cfg)
    panel = _load_panel(cfg, cfg.k)
    prepared = prepare(panel, cfg.indicators)
    feats, models, n = pca_dwt_features(prepared, cfg.preprocess)
    dates = _horizon_dates(prepared)

    for a, ticker in enumerate(prepared.symbols):
        header = ["period", "date"] + [f"f{j + 1}" for j in range(n)]
        rows = [
            [i, dates[i]] + [_fnum(v) for v in feats[i, a, :]]
            for i in range(prepared.horizon)
        ]
        _write_csv(out / f"feature_{ticker}.csv", header, rows)

    model_payload = {
        ticker: {
            "mean": model.mean,
            "components": model.components,
            "eigenvalues": model.eigenvalues,
            "explained_ratio": model.explained_ratio,
            "k95": model.k95,
            "n_used": n,
        }
        for ticker, model in zip(prepared.symbols, models)
    }
    _write_json(out / "pca_model.json", model_payload)

    if args.dump_features:
        for a, ticker in enumerate(prepared.symbols):
            header = ["period", "date"] + list(INDICATOR_ORDER)
            rows = [
                [i, dates[i]] + [_fnum(v) for v in prepared.indicators[i, a, :]]
                for i in range(prepared.horizon)
            ]
            _write_csv(out / f"indicators_{ticker}.csv", header, rows)

    if args.dump_denoised:
        # pre = z-scored PCA scores, post = wavelet-denoised scores
        for a, ticker in enumerate(prepared.symbols):
            table = normalize_table(prepared.indicators[:, a, :])
            scores = pca_transform(models[a], table, n)
            header = (
                ["period", "date"]
                + [f"score{j + 1}" for j in range(n)]
                + [f"denoised{j + 1}" for j in range(n)]
            )
            rows = [
                [i, dates[i]]
                + [_fnum(v) for v in scores[i]]
                + [_fnum(v) for v in feats[i, a, :]]
                for i in range(prepared.horizon)
            ]
            _write_csv(out / f"denoised_{ticker}.csv", header, rows)

    _write_manifest(out, cfg, "features")
    print(f"features: wrote {len(prepared.symbols)} stocks x {n} features to {out}")
    return 0


def _pick_strategy(cfg: RunConfig, name: str | None):
    specs = {s.kind: s for s in cfg.strategies}
    if name is None:
        spec = cfg.strategies[0]
    elif name in specs:
        spec = specs[name]
    else:
        raise ConfigError(f"--strategy {name!r} not in configured strategies {sorted(specs)}")
    return make_strategy(spec)


def cmd_backtest(cfg: RunConfig, args: argparse.Namespace) -> int:
    out = _ensure_outdir(cfg)
    ctx = _context(cfg, cfg.k)
    strategy = _pick_strategy(cfg, args.strategy)
    result = run(ctx, strategy)
    metrics = compute_metrics(result, cfg.rf_annual, cfg.periods_per_year)
    dates = _horizon_dates(ctx.prepared)

    header = (
        ["period", "date"]
        + [f"w_{t}" for t in result.symbols]
        + ["R", "W"]
    )
    rows = []
    for i in range(result.periods):
        g = result.first_test + i
        rows.append(
            [g, dates[g]]
            + [_fnum(v) for v in result.weights[i]]
            + [_fnum(result.profits[i]), _fnum(result.wealth[i])]
        )
    _write_csv(out / "result.csv", header, rows)
    _write_json(out / "metrics.json", {result.strategy: metrics.as_dict()})

    if args.dump_training:
        t_rows = []
        for meta in result.window_meta:
            for epoch, sharpe in enumerate(meta.get("sharpe_log", []), start=1):
                t_rows.append([result.strategy, meta["window"], epoch, _fnum(sharpe)])
        _write_csv(out / "training_log.csv", ["strategy", "window", "epoch", "sharpe"], t_rows)

    if args.dump_pca:
        models, n = ctx.pca_summary()
        if models:
            payload = {
                ticker: {
                    "mean": model.mean,
                    "components": model.components,
                    "eigenvalues": model.eigenvalues,
                    "explained_ratio": model.explained_ratio,
                    "k95": model.k95,
                    "n_used": n,
                }
                for ticker, model in zip(ctx.prepared.symbols, models)
            }
            _write_json(out / "pca_model.json", payload)

    _write_manifest(out, cfg, "backtest")
    vals = metrics.as_dict()
    print(
        f"backtest[{result.strategy}] k={cfg.k} delta={cfg.trainer.cost_rate}: "
        + ", ".join(f"{m}={vals[m]:.4f}" for m in METRIC_ORDER)
    )
    return 0


def cmd_compare(cfg: RunConfig, args: argparse.Namespace) -> int:
    if len(cfg.strategies) < 2:
        raise ConfigError("compare needs at least 2 configured strategies")
    out = _ensure_outdir(cfg)

    contexts: dict[int, StrategyContext] = {}

    def ctx_for(k: int) -> StrategyContext:
        if k not in contexts:
            contexts[k] = _context(cfg, k)
        return contexts[k]

    # comparison table across portfolio sizes at the configured cost rate
    comp_rows: list[list] = []
    for k in cfg.cardinalities:
        ctx = ctx_for(k)
        for spec in cfg.strategies:
            strategy = make_strategy(spec)
            result = run(ctx, strategy)
            vals = compute_metrics(result, cfg.rf_annual, cfg.periods_per_year).as_dict()
            for metric in METRIC_ORDER:
                comp_rows.append([metric, k, result.strategy, _fnum(vals[metric])])
    _write_csv(out / "comparison.csv", ["metric", "k", "strategy", "value"], comp_rows)

    # cost sweep at k with wealth curves
    ctx = ctx_for(cfg.k)
    strategies = [make_strategy(s) for s in cfg.strategies]
    sweep = cost_sweep(ctx, strategies, cfg.delta_list)
    dates = _horizon_dates(ctx.prepared)
    names = [s.name for s in strategies]
    for delta in cfg.delta_list:
        per = sweep[float(delta)]
        label = _bps_label(delta)
        some = per[names[0]]
        header = ["period", "date"] + [f"W_{n}" for n in names]
        rows = []
        for i in range(some.periods):
            g = some.first_test + i
            rows.append(
                [g, dates[g]] + [_fnum(per[n].wealth[i]) for n in names]
            )
        _write_csv(out / f"sweep_{label}.csv", header, rows)
        if args.svg:
            chart = line_chart(
                {n: per[n].wealth for n in names},
                title=f"wealth curves, cost {label}",
            )
            (out / f"wealth_{label}.svg").write_text(chart, encoding="utf-8")

    _write_manifest(out, cfg, "compare")
    n_rows = len(comp_rows)
    print(
        f"compare: {n_rows} comparison rows "
        f"(k in {list(cfg.cardinalities)}), sweep deltas {list(cfg.delta_list)} -> {out}"
    )
    return 0


def cmd_stats(cfg: RunConfig, args: argparse.Namespace) -> int:
    out = _ensure_outdir(cfg)
    panel = _load_panel(cfg)
    stats = summary_stats(panel)
    header = ["ticker", "periods", "mean", "std", "min", "max", "range"]
    rows = [
        [t, panel.length] + [_fnum(stats[t][c]) for c in ("mean", "std", "min", "max", "range")]
        for t in panel.symbols
    ]
    _write_csv(out / "stats.csv", header, rows)
    widths = [10, 8, 12, 12, 12, 12, 12]
    print("  ".join(h.rjust(w) for h, w in zip(header, widths)))
    for row in rows:
        cells = [str(row[0]), str(row[1])] + [f"{float(v):.4f}" for v in row[2:]]
        print("  ".join(c.rjust(w) for c, w in zip(cells, widths)))
    print(f"stats: wrote {out / 'stats.csv'}")
    return 0


# ---------------------------------------------------------------------------
# argument parsing

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rrltrade",
        description="Walk-forward portfolio trading experiments "
        "(indicators -> PCA -> wavelet denoise -> recurrent trader).",
    )
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, help="TOML run config path")
    common.add_argument("--seed", type=int, default=None, help="override trainer seed")
    common.add_argument(
        "--mode",
        choices=("paper", "causal"),
        default=None,
        help="preprocessing fit scope: full-series (paper) or per-window (causal)",
    )
    common.add_argument(
        "--gradient",
        choices=("collapsed", "exact"),
        default=None,
        help="recurrent gradient accumulation mode",
    )
    common.add_argument("--output", default=None, help="override output directory")
    common.add_argument("-v", "--verbose", action="store_true", help="info-level logging")

    sub = parser.add_subparsers(dest="command", required=True)

    p_feat = sub.add_parser(
        "features", parents=[common], help="build + dump processed feature artifacts"
    )
    p_feat.add_argument(
        "--dump-features", action="store_true", help="also dump raw indicator tables"
    )
    p_feat.add_argument(
        "--dump-denoised",
        action="store_true",
        help="also dump pre/post wavelet-denoising score series",
    )
    p_feat.set_defaults(func=cmd_features)

    p_back = sub.add_parser(
        "backtest", parents=[common], help="walk-forward backtest of one strategy"
    )
    p_back.add_argument(
        "--strategy", default=None, help="strategy kind to run (default: first configured)"
    )
    p_back.add_argument(
        "--dump-training", action="store_true", help="dump per-window epoch/Sharpe log"
    )
    p_back.add_argument(
        "--dump-pca", action="store_true", help="dump the fitted PCA models as JSON"
    )
    p_back.set_defaults(func=cmd_backtest)

    p_cmp = sub.add_parser(
        "compare", parents=[common], help="strategy comparison table + cost sweep"
    )
    p_cmp.add_argument(
        "--svg",
        action=argparse.BooleanOptionalAction,
        default=True,
        help="emit wealth-curve SVG per cost rate (default on)",
    )
    p_cmp.set_defaults(func=cmd_compare)

    p_stat = sub.add_parser(
        "stats", parents=[common], help="close-price summary table of the aligned panel"
    )
    p_stat.set_defaults(func=cmd_stats)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        cfg = load_config(
            args.config,
            seed=args.seed,
            mode=args.mode,
            gradient=args.gradient,
            output_dir=args.output,
        )
        return args.func(cfg, args)
    except RrltradeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
