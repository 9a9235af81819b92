"""Command-line front end.

Subcommands: ingest, energy-series, charts, pte, ei, di, detect, eval,
roc, synth. Exit status is 0 on success, 1 on validation errors (bad
flags, malformed files, parameter violations), 2 on runtime errors.
All report files start with a provenance header (tool version, config
hash, input hash) and are byte-identical across reruns and worker counts.
"""

import argparse
import hashlib
import math
import os
import sys

import numpy as np

from . import __version__, charts
from .config import AnalysisConfig, config_from_file
from .connectivity import connectivity_tensor, load_tensor, save_tensor
from .desync import compute_di, desync_series
from .ei import compute_ei, with_selection
from .evaluation import (
    classify,
    detection_metrics,
    fuse,
    fused_roc_auc,
    normalize_scores,
    roc_auc,
)
from .recording import (
    EpochAnnotation,
    FilterSpec,
    RecordingFormatError,
    apply_comb_filter,
    exclude_channels,
    load_annotation,
    load_recording,
    save_annotation,
    save_native,
)
from .spectral import BandPair, energy_series
from .synthetic import CouplingEdge, SynthEvent, SynthScenario, generate
from .windows import build_plan


class CliError(ValueError):
    """Validation failure surfaced to the user with exit status 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise CliError(message)


def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def _input_hash(paths) -> str:
    digest = hashlib.sha256()
    for path in paths:
        with open(path, "rb") as fh:
            digest.update(fh.read())
    return digest.hexdigest()[:12]


def _provenance(cfg: AnalysisConfig, input_paths, extra=()) -> list:
    lines = [
        f"# tool=ezdetect {__version__}",
        f"# config_hash={cfg.config_hash()}",
        f"# input_hash={_input_hash(input_paths)}",
    ]
    lines.extend(f"# {k}={v}" for k, v in extra)
    return lines


def _write_table(path, header_lines, columns, rows) -> None:
    out = list(header_lines)
    out.append(",".join(columns))
    for row in rows:
        out.append(",".join(_fmt(v) for v in row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")


def _write_text(path, header_lines, body_lines) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("\n".join(list(header_lines) + list(body_lines)) + "\n")


# --------------------------------------------------------------------------
# argument plumbing


def _add_common(p):
    p.add_argument("--config", help="key=value config file; flags override it")
    p.add_argument("--threads", type=int, help="worker bound for the tensor job "
                   "(default: DESYNC_THREADS env var, then all cores)")


def _add_rec(p, ann_required=False):
    p.add_argument("--rec", required=True, help="recording file")
    p.add_argument("--format", choices=("native", "csv"), default="native")
    p.add_argument("--fs", type=float, help="sampling rate in Hz (csv format only)")
    if ann_required is not None:
        p.add_argument("--ann", required=ann_required, help="annotation sidecar file")


_FLAG_TO_FIELD = {
    "window": "window_s",
    "shift": "shift_s",
    "tau_max": "tau_max_s",
    "lag_step": "lag_step_s",
    "delta": "delta_s",
    "gamma": "gamma",
    "alpha": "alpha",
    "eta": "eta",
    "m": "m",
    "m_pct": "m_pct",
    "comb": "comb_hz",
    "cusum_init": "cusum_init",
    "bin_rule": "bin_rule",
    "threads": "threads",
}


def _add_params(p, names):
    if "window" in names:
        p.add_argument("--window", type=float, help="window duration, s")
        p.add_argument("--shift", type=float, help="window shift, s")
    if "bands" in names:
        p.add_argument("--bands", help="energy bands as HIGH_LO:HIGH_HI,LOW_LO:LOW_HI")
    if "tau" in names:
        p.add_argument("--tau-max", dest="tau_max", type=float, help="max lag, s")
        p.add_argument("--lag-step", dest="lag_step", type=float, help="lag grid step, s")
        p.add_argument("--bin-rule", dest="bin_rule", choices=("ceil", "round"))
    if "chart" in names:
        p.add_argument("--gamma", type=float, help="CUSUM drift weight")
        p.add_argument("--delta", type=float, help="tonicity horizon, s")
        p.add_argument("--cusum-init", dest="cusum_init", choices=("zero", "literal"))
    if "alpha" in names:
        p.add_argument("--alpha", type=float, help="EWMA decay")
    if "m" in names:
        p.add_argument("--m", type=int, help="number of channels to select")
        p.add_argument("--m-pct", dest="m_pct", type=float,
                       help="selection size as percent of channels")
    if "eta" in names:
        p.add_argument("--eta", type=float, help="detection threshold in [0, 1]")


def _resolve_config(args) -> AnalysisConfig:
    cfg = AnalysisConfig()
    if getattr(args, "config", None):
        cfg = config_from_file(args.config, cfg)
    updates = {}
    for flag, field in _FLAG_TO_FIELD.items():
        value = getattr(args, flag, None)
        if value is not None:
            updates[field] = value
    if getattr(args, "bands", None):
        try:
            high, low = args.bands.split(",")
            hi_lo, hi_hi = (float(v) for v in high.split(":"))
            lo_lo, lo_hi = (float(v) for v in low.split(":"))
        except ValueError:
            raise CliError(f"cannot parse --bands {args.bands!r}; "
                           "expected HIGH_LO:HIGH_HI,LOW_LO:LOW_HI") from None
        updates.update(band_high_lo=hi_lo, band_high_hi=hi_hi,
                       band_low_lo=lo_lo, band_low_hi=lo_hi)
    if updates.get("threads") is None and cfg.threads is None:
        env = os.environ.get("DESYNC_THREADS")
        if env:
            try:
                updates["threads"] = int(env)
            except ValueError:
                raise CliError(f"DESYNC_THREADS={env!r} is not an integer") from None
    from dataclasses import replace

    cfg = replace(cfg, **updates)
    cfg.validate()
    return cfg


def _bands(cfg: AnalysisConfig) -> BandPair:
    return BandPair(high=(cfg.band_high_lo, cfg.band_high_hi),
                    low=(cfg.band_low_lo, cfg.band_low_hi))


def _load_rec(args):
    if args.format == "csv" and args.fs is None:
        raise CliError("csv format requires --fs")
    return load_recording(args.rec, format=args.format, fs=args.fs)


def _load_ann(args, cfg, rec):
    ann = load_annotation(args.ann)
    if math.isnan(ann.t_base):
        from dataclasses import replace

        ann = replace(ann, t_base=ann.t_start + cfg.t_base_offset_s)
    ann.validate(rec)
    return ann


def _analysis_inputs(args, cfg):
    """Recording (with exclusions applied), annotation, and window plan."""
    rec = _load_rec(args)
    ann = _load_ann(args, cfg, rec)
    if ann.excluded_channels:
        rec = exclude_channels(rec, ann.excluded_channels)
    cfg.validate_for_fs(rec.fs)
    plan = build_plan(rec, cfg.window_s, cfg.shift_s)
    return rec, ann, plan


# --------------------------------------------------------------------------
# subcommands


def _cmd_ingest(args):
    cfg = _resolve_config(args)
    rec = _load_rec(args)
    if args.ann:
        ann = _load_ann(args, cfg, rec)
        if args.exclude:
            rec = exclude_channels(rec, ann.excluded_channels)
    elif args.exclude:
        raise CliError("--exclude needs --ann")
    if args.comb:
        spec = FilterSpec(comb_center=cfg.comb_hz,
                          notch_bandwidth=cfg.notch_bandwidth_hz,
                          max_harmonic=cfg.max_harmonic_hz)
        rec = apply_comb_filter(rec, spec)
    save_native(rec, args.out)
    return 0


def _cmd_energy_series(args):
    cfg = _resolve_config(args)
    rec = _load_rec(args)
    cfg.validate_for_fs(rec.fs)
    plan = build_plan(rec, cfg.window_s, cfg.shift_s)
    series = energy_series(rec, plan, _bands(cfg))
    rows = [
        (rec.channel_names[i], plan.window_times[w], series[i, w])
        for i in range(rec.n_channels)
        for w in range(plan.n_windows)
    ]
    _write_table(args.out, _provenance(cfg, [args.rec]), ("channel", "t", "E"), rows)
    return 0


def _cmd_charts(args):
    cfg = _resolve_config(args)
    rec, ann, plan = _analysis_inputs(args, cfg)
    if args.source == "energy":
        series = energy_series(rec, plan, _bands(cfg))
    else:
        tensor = connectivity_tensor(rec, plan, cfg.tau_max_s, cfg.lag_step_s,
                                     bin_rule=cfg.bin_rule, threads=cfg.threads)
        series = desync_series(tensor, cfg.alpha)[0].levels
    times = plan.window_times
    rows = []
    for i, name in enumerate(rec.channel_names):
        if args.kind == "cusum":
            stats = charts.baseline_stats(times, series[i], (ann.t_base, ann.t_start))
            chart = charts.cusum(times, series[i], stats, cfg.gamma,
                                 (ann.t_start, ann.t_end),
                                 init=cfg.cusum_init, norm=cfg.cusum_norm, source_id=name)
        else:
            chart = charts.ewma_chart(times, series[i], cfg.alpha, source_id=name)
        rows.extend((name, t, v) for t, v in zip(chart.times, chart.values))
    extra = (("source", args.source), ("kind", args.kind))
    _write_table(args.out, _provenance(cfg, [args.rec, args.ann], extra),
                 ("channel", "t", "value"), rows)
    return 0


def _cmd_pte(args):
    cfg = _resolve_config(args)
    rec = _load_rec(args)
    plan = build_plan(rec, cfg.window_s, cfg.shift_s)
    tensor = connectivity_tensor(rec, plan, cfg.tau_max_s, cfg.lag_step_s,
                                 bin_rule=cfg.bin_rule, threads=cfg.threads)
    save_tensor(tensor, args.out)
    return 0


def _score_rows(table, result, eta):
    positives = classify(result, eta)
    rows = []
    for i, name in enumerate(table.channel_names):
        rows.append((
            name,
            table.raw_score[i],
            result.normalized[i],
            bool(table.selected[i]),
            name in positives,
            table.activation_time[i],
            table.tonicity[i],
            table.peak_value[i],
        ))
    return rows


_SCORE_COLS = ("channel", "raw", "normalized", "selected", "classified",
               "activation_s", "tonicity", "chart_peak")


def _report_lines(table, result, eta):
    positives = sorted(classify(result, eta))
    return [
        f"detector={table.detector}",
        f"m={table.m}",
        f"eta={_fmt(eta)}",
        f"n_channels={len(table.channel_names)}",
        f"selected={','.join(sorted(table.selected_channels))}",
        f"classified={','.join(positives)}",
    ]


def _cmd_ei(args):
    cfg = _resolve_config(args)
    rec, ann, plan = _analysis_inputs(args, cfg)
    m = cfg.resolve_m(rec.n_channels)
    table = compute_ei(rec, plan, ann, _bands(cfg), cfg.gamma, cfg.delta_s, m,
                       cusum_init=cfg.cusum_init, cusum_norm=cfg.cusum_norm)
    result = normalize_scores(table)
    prov = _provenance(cfg, [args.rec, args.ann])
    _write_table(args.out, prov, _SCORE_COLS, _score_rows(table, result, cfg.eta))
    if args.report:
        _write_text(args.report, prov, _report_lines(table, result, cfg.eta))
    return 0


def _cmd_di(args):
    cfg = _resolve_config(args)
    rec, ann, plan = _analysis_inputs(args, cfg)
    m = cfg.resolve_m(rec.n_channels)
    tensor = None
    input_paths = [args.rec, args.ann]
    if args.tensor_in:
        tensor = load_tensor(args.tensor_in)
        input_paths.append(args.tensor_in)
    else:
        tensor = connectivity_tensor(rec, plan, cfg.tau_max_s, cfg.lag_step_s,
                                     bin_rule=cfg.bin_rule, threads=cfg.threads)
    series, _ = desync_series(tensor, cfg.alpha)
    table = compute_di(rec, plan, ann, cfg.tau_max_s, cfg.lag_step_s, cfg.alpha,
                       cfg.gamma, cfg.delta_s, m,
                       bin_rule=cfg.bin_rule, threads=cfg.threads,
                       cusum_init=cfg.cusum_init, cusum_norm=cfg.cusum_norm,
                       tensor=tensor)
    result = normalize_scores(table)
    prov = _provenance(cfg, input_paths)
    _write_table(args.out, prov, _SCORE_COLS, _score_rows(table, result, cfg.eta))
    if args.series_out:
        rows = [
            (series.channel_names[i], series.window_times[w], series.levels[i, w],
             bool(series.no_outbound[i, w]))
            for i in range(len(series.channel_names))
            for w in range(len(series.window_times))
        ]
        _write_table(args.series_out, prov, ("channel", "t", "D", "no_outbound"), rows)
    if args.report:
        _write_text(args.report, prov, _report_lines(table, result, cfg.eta))
    return 0


def _run_both(rec, ann, plan, cfg, tensor=None):
    n = rec.n_channels
    ei_full = compute_ei(rec, plan, ann, _bands(cfg), cfg.gamma, cfg.delta_s, n,
                         cusum_init=cfg.cusum_init, cusum_norm=cfg.cusum_norm)
    di_full = compute_di(rec, plan, ann, cfg.tau_max_s, cfg.lag_step_s, cfg.alpha,
                         cfg.gamma, cfg.delta_s, n,
                         bin_rule=cfg.bin_rule, threads=cfg.threads,
                         cusum_init=cfg.cusum_init, cusum_norm=cfg.cusum_norm,
                         tensor=tensor)
    return ei_full, di_full


def _cmd_detect(args):
    cfg = _resolve_config(args)
    rec, ann, plan = _analysis_inputs(args, cfg)
    m = cfg.resolve_m(rec.n_channels)
    tensor = load_tensor(args.tensor_in) if args.tensor_in else None
    input_paths = [args.rec, args.ann] + ([args.tensor_in] if args.tensor_in else [])
    ei_full, di_full = _run_both(rec, ann, plan, cfg, tensor)
    ei_table = with_selection(ei_full, m)
    di_table = with_selection(di_full, m)
    ei_res = normalize_scores(ei_table)
    di_res = normalize_scores(di_table)
    pred_ei = classify(ei_res, cfg.eta)
    pred_di = classify(di_res, cfg.eta)
    pred_and = fuse(pred_ei, pred_di, "AND")
    pred_or = fuse(pred_ei, pred_di, "OR")
    rows = []
    for i, name in enumerate(rec.channel_names):
        rows.append((
            name,
            ei_table.raw_score[i], ei_res.normalized[i], bool(ei_table.selected[i]),
            ei_table.activation_time[i],
            di_table.raw_score[i], di_res.normalized[i], bool(di_table.selected[i]),
            di_table.activation_time[i],
            name in pred_ei, name in pred_di, name in pred_and, name in pred_or,
        ))
    cols = ("channel",
            "ei_raw", "ei_norm", "ei_selected", "ei_activation_s",
            "di_raw", "di_norm", "di_selected", "di_activation_s",
            "pred_ei", "pred_di", "pred_and", "pred_or")
    prov = _provenance(cfg, input_paths, (("m", m),))
    _write_table(args.out, prov, cols, rows)
    if args.report:
        body = []
        for name, pred in (("EI", pred_ei), ("DI", pred_di),
                           ("EI-and-DI", pred_and), ("EI-or-DI", pred_or)):
            body.append(f"positives_{name}={','.join(sorted(pred))}")
        _write_text(args.report, prov, [f"m={m}", f"eta={_fmt(cfg.eta)}"] + body)
    return 0


def _cmd_eval(args):
    cfg = _resolve_config(args)
    rec, ann, plan = _analysis_inputs(args, cfg)
    if not ann.ez_channels:
        raise CliError("no ground truth: annotation lists no ez channels")
    m = cfg.resolve_m(rec.n_channels)
    tensor = load_tensor(args.tensor_in) if args.tensor_in else None
    input_paths = [args.rec, args.ann] + ([args.tensor_in] if args.tensor_in else [])
    ei_full, di_full = _run_both(rec, ann, plan, cfg, tensor)
    preds = {}
    for label, table in (("EI", ei_full), ("DI", di_full)):
        preds[label] = classify(normalize_scores(with_selection(table, m)), cfg.eta)
    preds["EI-and-DI"] = fuse(preds["EI"], preds["DI"], "AND")
    preds["EI-or-DI"] = fuse(preds["EI"], preds["DI"], "OR")
    truth = set(ann.ez_channels)
    rows = []
    for label, pred in preds.items():
        rep = detection_metrics(pred, truth, rec.channel_names)
        rows.append((label, rep.sensitivity, rep.precision, rep.accuracy,
                     rep.tp, rep.fp, rep.tn, rep.fn))
    cols = ("detector", "sensitivity", "precision", "accuracy", "tp", "fp", "tn", "fn")
    prov = _provenance(cfg, input_paths, (("m", m),))
    _write_table(args.out, prov, cols, rows)
    return 0


def _parse_sweep(text):
    try:
        lo, hi = (int(v) for v in text.split(":"))
    except ValueError:
        raise CliError(f"cannot parse --sweep {text!r}; expected LO:HI") from None
    if not 1 <= lo <= hi <= 100:
        raise CliError(f"sweep bounds must satisfy 1 <= lo <= hi <= 100, got {text}")
    return np.arange(lo, hi + 1, dtype=float)


def _cmd_roc(args):
    cfg = _resolve_config(args)
    rec, ann, plan = _analysis_inputs(args, cfg)
    if not ann.ez_channels:
        raise CliError("no ground truth: annotation lists no ez channels")
    sweep = _parse_sweep(args.sweep)
    tensor = load_tensor(args.tensor_in) if args.tensor_in else None
    input_paths = [args.rec, args.ann] + ([args.tensor_in] if args.tensor_in else [])
    ei_full, di_full = _run_both(rec, ann, plan, cfg, tensor)
    truth = set(ann.ez_channels)
    reports = {
        "EI": roc_auc(ei_full, truth, sweep=sweep),
        "DI": roc_auc(di_full, truth, sweep=sweep),
        "EI-and-DI": fused_roc_auc(ei_full, di_full, "AND", truth, sweep=sweep),
        "EI-or-DI": fused_roc_auc(ei_full, di_full, "OR", truth, sweep=sweep),
    }
    rows = []
    for label, rep in reports.items():
        for p in rep.roc_points:
            rows.append((label, p.m_pct, p.m, p.tp, p.fp, p.tn, p.fn, p.fpr, p.tpr))
    cols = ("detector", "m_pct", "m", "tp", "fp", "tn", "fn", "fpr", "tpr")
    prov = _provenance(cfg, input_paths)
    _write_table(args.out, prov, cols, rows)
    if args.report:
        body = [f"auc_{label}={_fmt(rep.auc)}" for label, rep in reports.items()]
        _write_text(args.report, prov, body)
    return 0


def _parse_scenario(path) -> SynthScenario:
    fields = {}
    edges = []
    events = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise CliError(f"{path}:{lineno}: malformed scenario line {line!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if key == "edge":
                try:
                    route, lag, strength = value.split(",")
                    src, dst = route.split("->")
                    edges.append(CouplingEdge(src.strip(), dst.strip(),
                                              float(lag), float(strength)))
                except ValueError:
                    raise CliError(
                        f"{path}:{lineno}: expected edge=SRC->DST,LAG_S,STRENGTH"
                    ) from None
            elif key == "event":
                parts = value.split(",")
                if len(parts) not in (3, 4):
                    raise CliError(
                        f"{path}:{lineno}: expected event=KIND,TIME_S,T1|T2[,LO-HI]"
                    )
                kind, time_s, targets = parts[0].strip(), parts[1], parts[2]
                band = (30.0, 250.0)
                if len(parts) == 4:
                    try:
                        lo, hi = (float(v) for v in parts[3].split("-"))
                    except ValueError:
                        raise CliError(f"{path}:{lineno}: bad band {parts[3]!r}") from None
                    band = (lo, hi)
                try:
                    events.append(SynthEvent(
                        time_s=float(time_s), kind=kind,
                        targets=tuple(t.strip() for t in targets.split("|") if t.strip()),
                        band=band,
                    ))
                except ValueError:
                    raise CliError(f"{path}:{lineno}: bad event time {time_s!r}") from None
            else:
                fields[key] = value
    try:
        scenario = SynthScenario(
            n_channels=int(fields["n_channels"]),
            fs=float(fields.get("fs", 512.0)),
            duration_s=float(fields.get("duration_s", 70.0)),
            edges=tuple(edges),
            events=tuple(events),
            noise_level=float(fields.get("noise_level", 0.2)),
            seed=int(fields.get("seed", 0)),
            t_base=float(fields["t_base_s"]) if "t_base_s" in fields else None,
            t_start=float(fields["t_start_s"]) if "t_start_s" in fields else None,
            t_end=float(fields["t_end_s"]) if "t_end_s" in fields else None,
            burst_gain=float(fields.get("burst_gain", 1.0)),
        )
    except KeyError as exc:
        raise CliError(f"{path}: scenario missing required key {exc}") from None
    except ValueError as exc:
        raise CliError(f"{path}: bad scenario value ({exc})") from None
    known = {"n_channels", "fs", "duration_s", "noise_level", "seed",
             "t_base_s", "t_start_s", "t_end_s", "burst_gain"}
    unknown = set(fields) - known
    if unknown:
        raise CliError(f"{path}: unknown scenario keys {sorted(unknown)}")
    return scenario


def _cmd_synth(args):
    scenario = _parse_scenario(args.scenario)
    rec, ann = generate(scenario)
    save_native(rec, args.out_rec)
    save_annotation(ann, args.out_ann)
    return 0


# --------------------------------------------------------------------------
# parser wiring


def build_parser() -> _Parser:
    parser = _Parser(prog="ezdetect",
                     description="Rank intracranial EEG channels by epileptogenicity.")
    parser.add_argument("--version", action="version", version=f"ezdetect {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("ingest", help="validate, optionally filter, and convert a recording")
    _add_common(p)
    _add_rec(p, ann_required=False)
    p.add_argument("--comb", action="store_true", help="apply the powerline comb filter")
    p.add_argument("--exclude", action="store_true", help="drop the annotation's excluded channels")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_ingest)

    p = sub.add_parser("energy-series", help="per-channel, per-window energy ratios")
    _add_common(p)
    _add_rec(p, ann_required=None)
    _add_params(p, ("window", "bands"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_energy_series)

    p = sub.add_parser("charts", help="control-chart series for plotting")
    _add_common(p)
    _add_rec(p, ann_required=True)
    _add_params(p, ("window", "bands", "tau", "chart", "alpha"))
    p.add_argument("--source", choices=("energy", "desync"), default="energy")
    p.add_argument("--kind", choices=("cusum", "ewma"), default="cusum")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_charts)

    p = sub.add_parser("pte", help="directed connectivity tensor dump")
    _add_common(p)
    _add_rec(p, ann_required=None)
    _add_params(p, ("window", "tau"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_pte)

    p = sub.add_parser("ei", help="energy-ratio index score table")
    _add_common(p)
    _add_rec(p, ann_required=True)
    _add_params(p, ("window", "bands", "chart", "m", "eta"))
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="also write a structured-text report")
    p.set_defaults(func=_cmd_ei)

    p = sub.add_parser("di", help="desynchronization index score table")
    _add_common(p)
    _add_rec(p, ann_required=True)
    _add_params(p, ("window", "tau", "chart", "alpha", "m", "eta"))
    p.add_argument("--tensor-in", dest="tensor_in", help="reuse a tensor dump")
    p.add_argument("--out", required=True)
    p.add_argument("--series-out", dest="series_out",
                   help="also write the per-window desynchronization levels")
    p.add_argument("--report", help="also write a structured-text report")
    p.set_defaults(func=_cmd_di)

    p = sub.add_parser("detect", help="EI + DI + both fusions in one pass")
    _add_common(p)
    _add_rec(p, ann_required=True)
    _add_params(p, ("window", "bands", "tau", "chart", "alpha", "m", "eta"))
    p.add_argument("--tensor-in", dest="tensor_in", help="reuse a tensor dump")
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="also write a structured-text report")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("eval", help="detection metrics against the annotation's ez labels")
    _add_common(p)
    _add_rec(p, ann_required=True)
    _add_params(p, ("window", "bands", "tau", "chart", "alpha", "m", "eta"))
    p.add_argument("--tensor-in", dest="tensor_in", help="reuse a tensor dump")
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("roc", help="ROC over the top-M sweep, all four detectors")
    _add_common(p)
    _add_rec(p, ann_required=True)
    _add_params(p, ("window", "bands", "tau", "chart", "alpha"))
    p.add_argument("--sweep", default="1:100", help="percent range LO:HI (default 1:100)")
    p.add_argument("--tensor-in", dest="tensor_in", help="reuse a tensor dump")
    p.add_argument("--out", required=True)
    p.add_argument("--report", help="also write per-detector AUC summary")
    p.set_defaults(func=_cmd_roc)

    p = sub.add_parser("synth", help="generate a ground-truthed synthetic epoch")
    _add_common(p)
    p.add_argument("--scenario", required=True, help="scenario description file")
    p.add_argument("--out-rec", dest="out_rec", required=True)
    p.add_argument("--out-ann", dest="out_ann", required=True)
    p.set_defaults(func=_cmd_synth)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except (CliError, RecordingFormatError, ValueError, KeyError, FileNotFoundError) as exc:
        message = exc.args[0] if exc.args else exc
        print(f"ezdetect: error: {message}", file=sys.stderr)
        return 1
    except Exception as exc:  # pragma: no cover - defensive
        print(f"ezdetect: runtime error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
