"""Command-line frontend: simulation, ensembles, verification, plot data.

Every command is deterministic given its flags: reports carry no
timestamps, numbers depend only on seeds, and rerunning a command yields
byte-identical output. Exit codes: 0 success, 1 runtime error or
verification breach, 2 flag errors. Tolerance flags default to the pinned
verification configuration; any override is recorded in the report header
and in the machine-readable trailer.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import verify
from .coeffs import coefficients
from .ensemble import (
    EnsembleSpec,
    EnsembleSummary,
    derive_stream,
    load_summary,
    persist_summary,
    run_ensemble,
)
from .observables import arcsine_cdf, arcsine_cdf_half
from . import _kernels

_TRAILER_MARK = "--- machine readable ---"


def _parse_int_list(text: str) -> tuple[int, ...]:
    try:
        vals = tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated integer list: {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _parse_float_list(text: str) -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not a comma-separated float list: {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _read_config(path: str) -> dict[str, str]:
    """key = value lines; blank lines and # comments ignored."""
    out: dict[str, str] = {}
    for raw in Path(path).read_text().splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ValueError(f"config line without '=': {raw!r}")
        key, val = line.split("=", 1)
        out[key.strip().replace("-", "_")] = val.strip()
    return out


def _resolve(args: argparse.Namespace, defaults: dict, converters: dict) -> tuple[dict, dict]:
    """Fold flag values over config values over defaults.

    Flags were declared with default=None so an explicit flag always wins;
    config fills the gaps; pinned defaults fill the rest. Returns the
    resolved values and the subset that differs from the defaults.
    """
    config: dict[str, str] = {}
    if getattr(args, "config", None):
        try:
            config = _read_config(args.config)
        except ValueError as exc:
            raise FlagError(str(exc)) from exc
    resolved = {}
    overrides = {}
    for key, default in defaults.items():
        flag_val = getattr(args, key, None)
        if flag_val is not None:
            resolved[key] = flag_val
        elif key in config:
            conv = converters.get(key, str)
            try:
                resolved[key] = conv(config[key])
            except ValueError as exc:
                raise FlagError(f"config value for {key}: {exc}") from exc
        else:
            resolved[key] = default
        if resolved[key] != default:
            overrides[key] = resolved[key]
    unknown = set(config) - set(defaults)
    if unknown:
        raise FlagError(f"config keys not understood by this command: {sorted(unknown)}")
    return resolved, overrides


def _print_results(
    command: str,
    overrides: dict,
    results: list[verify.CriterionResult],
    extra_payload: dict | None = None,
) -> int:
    print(f"erwlab {command}")
    if overrides:
        print(
            "overrides: "
            + ", ".join(f"{k}={overrides[k]}" for k in sorted(overrides))
        )
    breaches = []
    for res in results:
        print(f"criterion: {res.name}")
        for ln in res.lines:
            mark = "PASS" if ln.passed else "FAIL"
            print(f"  [{mark}] {ln.label}: {ln.observed} (require: {ln.requirement})")
            if not ln.passed:
                breaches.append((res.name, ln))
        for note in res.notes:
            print(f"  note: {note}")
        print(f"  => {'PASS' if res.passed else 'FAIL'}")
    for name, ln in breaches:
        print(
            f"BREACH: {name}: {ln.label}: required {ln.requirement}, observed {ln.observed}"
        )
    code = 0 if all(r.passed for r in results) else 1
    payload = {
        "command": command,
        "overrides": {k: overrides[k] for k in sorted(overrides)},
        "criteria": [
            {
                "name": r.name,
                "passed": r.passed,
                "lines": [
                    {
                        "label": ln.label,
                        "passed": ln.passed,
                        "observed": ln.observed,
                        "requirement": ln.requirement,
                    }
                    for ln in r.lines
                ],
                "notes": list(r.notes),
            }
            for r in results
        ],
        "exit_code": code,
    }
    if extra_payload:
        payload.update(extra_payload)
    print(_TRAILER_MARK)
    print(json.dumps(payload, sort_keys=True))
    return code


# ---------------------------------------------------------------------------
# simulate

def _decade_checkpoints(horizon: int) -> tuple[int, ...]:
    cps = [10**k for k in range(1, 19) if 10**k < horizon]
    cps.append(horizon)
    return tuple(cps)


def _cmd_simulate(args) -> int:
    defaults = {
        "p": 0.75,
        "q": 0.5,
        "n": 50_000,
        "seed": 0,
        "trace_every": 0,
        "trace_out": "",
    }
    converters = {"p": float, "q": float, "n": int, "seed": int, "trace_every": int, "trace_out": str}
    vals, overrides = _resolve(args, defaults, converters)
    if not (0.0 <= vals["p"] <= 1.0 and 0.0 <= vals["q"] <= 1.0):
        raise FlagError("p and q must be probabilities")
    if vals["n"] < 1:
        raise FlagError("n must be at least 1")
    if vals["trace_every"] < 0:
        raise FlagError("trace-every must be nonnegative")

    horizon = vals["n"]
    drift = vals["p"] - 0.5
    cps = np.array(_decade_checkpoints(horizon), dtype=np.int64)
    spans = _kernels.walk_spans(derive_stream(vals["seed"], 0), drift, vals["q"], cps)
    coeffs = coefficients(horizon)

    print(f"erwlab simulate  p={vals['p']:g} q={vals['q']:g} n={horizon} seed={vals['seed']}")
    if overrides:
        print("overrides: " + ", ".join(f"{k}={overrides[k]}" for k in sorted(overrides)))
    print(f"{'n':>10} {'S':>8} {'Z':>8} {'G':>10} {'R':>10} {'M':>12}")
    for ci, n_cp in enumerate(cps):
        s, z, g, r = (int(v) for v in spans[ci])
        m = float(coeffs.a[n_cp]) * s
        r_txt = str(r) if r >= 0 else f">{n_cp}"
        print(f"{n_cp:>10} {s:>8} {z:>8} {g:>10} {r_txt:>10} {m:>12.5f}")

    trace_path = None
    if vals["trace_every"] > 0:
        trace_path = vals["trace_out"] or "trace.csv"
        rows = _kernels.walk_trace(
            derive_stream(vals["seed"], 0), drift, vals["q"], horizon, vals["trace_every"]
        )
        with open(trace_path, "w") as fh:
            fh.write(
                "n,s,z,g,r_known,m,log_z_over_log_n,log_g_over_log_n,log_z_over_log_g\n"
            )
            for n_row, s, z, g, r in rows:
                m = float(coeffs.a[n_row]) * s
                log_n = math.log(n_row) if n_row > 1 else math.nan
                lz = math.log(z) / log_n if z > 0 and n_row > 1 else math.nan
                lg = math.log(g) / log_n if g > 0 and n_row > 1 else math.nan
                lr = math.log(z) / math.log(g) if z > 1 and g > 1 else math.nan
                fh.write(
                    f"{n_row},{s},{z},{g},{r},{m:.10g},{lz:.10g},{lg:.10g},{lr:.10g}\n"
                )
        print(f"trace written to {trace_path} (every {vals['trace_every']} steps)")

    s, z, g, r = (int(v) for v in spans[-1])
    payload = {
        "command": "simulate",
        "overrides": {k: overrides[k] for k in sorted(overrides)},
        "final": {
            "n": horizon,
            "s": s,
            "z": z,
            "g": g,
            "r": r if r >= 0 else None,
            "m": float(coeffs.a[horizon]) * s,
        },
        "trace": trace_path,
        "exit_code": 0,
    }
    print(_TRAILER_MARK)
    print(json.dumps(payload, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# ensemble

def _cmd_ensemble(args) -> int:
    defaults = {
        "seed": 0,
        "replicas": 1000,
        "n_base": 10_000,
        "t_grid": "",
        "p": 0.75,
        "q": 0.5,
        "embedding": False,
        "excursion_check": False,
        "excursion_steps": 512,
        "excursion_refine": 256.0,
        "block_size": 1024,
        "out": "ensemble_summary.json",
        "workers": None,
        "checkpoint_dir": "",
        "resume": False,
    }
    converters = {
        "seed": int,
        "replicas": int,
        "n_base": int,
        "t_grid": str,
        "p": float,
        "q": float,
        "embedding": lambda s: s.lower() == "true",
        "excursion_check": lambda s: s.lower() == "true",
        "excursion_steps": int,
        "excursion_refine": float,
        "block_size": int,
        "out": str,
        "workers": int,
        "checkpoint_dir": str,
        "resume": lambda s: s.lower() == "true",
    }
    vals, overrides = _resolve(args, defaults, converters)
    t_grid = _parse_float_list(vals["t_grid"]) if vals["t_grid"] else None
    try:
        kwargs = dict(
            master_seed=vals["seed"],
            replicas=vals["replicas"],
            p=vals["p"],
            q=vals["q"],
            n_base=vals["n_base"],
            embedding=vals["embedding"],
            excursion_check=vals["excursion_check"],
            excursion_steps=vals["excursion_steps"],
            excursion_refine=vals["excursion_refine"],
            block_size=vals["block_size"],
        )
        if t_grid is not None:
            kwargs["t_grid"] = t_grid
        spec = EnsembleSpec(**kwargs)
    except ValueError as exc:
        raise FlagError(str(exc)) from exc

    summary = run_ensemble(
        spec,
        workers=vals["workers"],
        checkpoint_dir=vals["checkpoint_dir"] or None,
        resume=vals["resume"],
    )
    out_path = persist_summary(summary, vals["out"])

    print(f"erwlab ensemble  seed={spec.master_seed} replicas={spec.replicas} n_base={spec.n_base}")
    if overrides:
        print("overrides: " + ", ".join(f"{k}={overrides[k]}" for k in sorted(overrides)))
    print(f"{'t':>8} {'n':>10} {'censored':>9} {'ks_z':>8} {'ks_g':>8} {'tail_p':>8} {'theory':>8}")
    for cp in summary.checkpoints:
        tail_p = f"{cp.tail.p_hat:.4f}" if cp.tail else "-"
        theory = f"{cp.tail.theory:.4f}" if cp.tail else "-"
        print(
            f"{cp.t:>8.4f} {cp.n:>10} {cp.censored:>9} {cp.ks_z:>8.4f} {cp.ks_g:>8.4f} "
            f"{tail_p:>8} {theory:>8}"
        )
    if summary.embedding:
        emb = summary.embedding
        print(
            f"embedding at n={emb.n}: mean drift {emb.mean_drift:.4f}, "
            f"var {emb.var_drift:.4f}, mean compensated {emb.mean_compensated:.4f}"
        )
    if summary.excursions:
        exc = summary.excursions
        print(
            f"excursions: {exc.matches}/{exc.replicas} matched at {exc.steps} steps "
            f"(refine {exc.refine:g}), {exc.bad_zeros} zero-placement violations"
        )
    print(f"summary written to {out_path}")
    payload = {
        "command": "ensemble",
        "overrides": {k: overrides[k] for k in sorted(overrides)},
        "summary_path": str(out_path),
        "replicas": spec.replicas,
        "checkpoints": [cp.n for cp in summary.checkpoints],
        "exit_code": 0,
    }
    print(_TRAILER_MARK)
    print(json.dumps(payload, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# verify commands

def _cmd_verify_arcsine(args) -> int:
    defaults = {
        "n_base": 1_000_000,
        "replicas": 5_000,
        "seed": 20260817,
        "ks_g_bound": 0.15,
        "ks_z_bound": 0.20,
        "quarter_tol": 0.15,
        "workers": None,
    }
    converters = {k: (float if "bound" in k or "tol" in k else int) for k in defaults}
    vals, overrides = _resolve(args, defaults, converters)
    summary = verify.arcsine_ensemble(
        seed=vals["seed"],
        replicas=vals["replicas"],
        n_base=vals["n_base"],
        workers=vals["workers"],
    )
    results = [
        verify.criterion_arcsine_laws(
            summary=summary,
            ks_g_bound=vals["ks_g_bound"],
            ks_z_bound=vals["ks_z_bound"],
            quarter_tol=vals["quarter_tol"],
        ),
        verify.criterion_ratio_law(summary=summary),
    ]
    return _print_results("verify-arcsine", overrides, results)


def _cmd_verify_tail(args) -> int:
    defaults = {
        "n_list": "100,10000,1000000",
        "replicas": 100_000,
        "seed": 606,
        "band_low": 0.55,
        "band_high": 1.35,
    }
    converters = {
        "n_list": str,
        "replicas": int,
        "seed": int,
        "band_low": float,
        "band_high": float,
    }
    vals, overrides = _resolve(args, defaults, converters)
    horizons = _parse_int_list(vals["n_list"])
    if any(n < 2 for n in horizons):
        raise FlagError("every n must be at least 2")
    res = verify.criterion_return_tail(
        seed=vals["seed"],
        replicas=vals["replicas"],
        horizons=horizons,
        band=(vals["band_low"], vals["band_high"]),
    )
    return _print_results("verify-tail", overrides, [res])


def _cmd_verify_embedding(args) -> int:
    defaults = {
        "n": 10,
        "replicas": 100_000,
        "seed": 707,
        "mode": "both",
        "grid_refine": 1024.0,
        "concentration": False,
        "excursions": False,
    }
    converters = {
        "n": int,
        "replicas": int,
        "seed": int,
        "mode": str,
        "grid_refine": float,
        "concentration": lambda s: s.lower() == "true",
        "excursions": lambda s: s.lower() == "true",
    }
    vals, overrides = _resolve(args, defaults, converters)
    if vals["mode"] not in ("both", "series", "grid"):
        raise FlagError(f"mode must be both, series, or grid, not {vals['mode']!r}")
    modes = ("series", "grid") if vals["mode"] == "both" else (vals["mode"],)
    results = [
        verify.criterion_embedding_exactness(
            seed=vals["seed"],
            sign_replicas=vals["replicas"],
            sign_n=vals["n"],
            delta_replicas=vals["replicas"],
            exit_draws=vals["replicas"],
            grid_refine=vals["grid_refine"],
            modes=modes,
        )
    ]
    if vals["concentration"]:
        results.append(verify.criterion_clock_concentration())
    if vals["excursions"]:
        results.append(verify.criterion_excursion_count())
    return _print_results("verify-embedding", overrides, results)


def _cmd_verify_oracles(args) -> int:
    defaults = {"seed": 101, "replicas": 1_000_000, "horizons": "4,8,12"}
    converters = {"seed": int, "replicas": int, "horizons": str}
    vals, overrides = _resolve(args, defaults, converters)
    horizons = _parse_int_list(vals["horizons"])
    if any(not 1 <= n <= 14 for n in horizons):
        raise FlagError("oracle horizons must lie in [1, 14]")
    results = [
        verify.criterion_oracle_exactness(
            seed=vals["seed"], replicas=vals["replicas"], horizons=horizons
        ),
        verify.criterion_sampler_equivalence(),
        verify.path_law_check(),
        verify.criterion_second_moment(),
    ]
    return _print_results("verify-oracles", overrides, results)


# ---------------------------------------------------------------------------
# plot-data

def _svg_render(path: Path, curves, x_label: str, y_label: str) -> None:
    """Tiny deterministic SVG line renderer; no plotting dependency."""
    width, height, margin = 640.0, 420.0, 52.0
    xs = np.concatenate([c[0] for c in curves])
    ys = np.concatenate([c[1] for c in curves])
    x_lo, x_hi = float(np.min(xs)), float(np.max(xs))
    y_lo, y_hi = float(np.min(ys)), float(np.max(ys))
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    def sx(x: float) -> float:
        return margin + (x - x_lo) / (x_hi - x_lo) * (width - 2 * margin)

    def sy(y: float) -> float:
        return height - margin - (y - y_lo) / (y_hi - y_lo) * (height - 2 * margin)

    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd")
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:g}" height="{height:g}" '
        f'viewBox="0 0 {width:g} {height:g}">',
        f'<rect width="{width:g}" height="{height:g}" fill="white"/>',
        f'<line x1="{margin}" y1="{height - margin}" x2="{width - margin}" '
        f'y2="{height - margin}" stroke="black" stroke-width="1"/>',
        f'<line x1="{margin}" y1="{margin}" x2="{margin}" y2="{height - margin}" '
        f'stroke="black" stroke-width="1"/>',
    ]
    for frac in (0.0, 0.5, 1.0):
        xv = x_lo + frac * (x_hi - x_lo)
        yv = y_lo + frac * (y_hi - y_lo)
        parts.append(
            f'<text x="{sx(xv):.2f}" y="{height - margin + 18:.2f}" font-size="11" '
            f'font-family="sans-serif" text-anchor="middle">{xv:.4g}</text>'
        )
        parts.append(
            f'<text x="{margin - 8:.2f}" y="{sy(yv) + 4:.2f}" font-size="11" '
            f'font-family="sans-serif" text-anchor="end">{yv:.4g}</text>'
        )
    parts.append(
        f'<text x="{width / 2:.2f}" y="{height - 12:.2f}" font-size="12" '
        f'font-family="sans-serif" text-anchor="middle">{x_label}</text>'
    )
    parts.append(
        f'<text x="14" y="{height / 2:.2f}" font-size="12" font-family="sans-serif" '
        f'text-anchor="middle" transform="rotate(-90 14 {height / 2:.2f})">{y_label}</text>'
    )
    legend_y = margin + 6.0
    for i, (cx, cy, label) in enumerate(curves):
        pts = " ".join(f"{sx(float(x)):.2f},{sy(float(y)):.2f}" for x, y in zip(cx, cy))
        color = colors[i % len(colors)]
        parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{width - margin - 4:.2f}" y="{legend_y + 14 * i:.2f}" font-size="11" '
            f'font-family="sans-serif" text-anchor="end" fill="{color}">{label}</text>'
        )
    parts.append("</svg>")
    path.write_text("\n".join(parts) + "\n")


def _cmd_plot_data(args) -> int:
    defaults = {"summary": "", "what": "", "out": "."}
    converters = {"summary": str, "what": str, "out": str}
    vals, overrides = _resolve(args, defaults, converters)
    if not vals["summary"]:
        raise FlagError("--summary is required")
    what = vals["what"]
    if what not in ("arcsine", "arcsine-half", "tail", "embedding-hist"):
        raise FlagError(
            f"--what must be arcsine, arcsine-half, tail, or embedding-hist, not {what!r}"
        )
    summary = load_summary(vals["summary"])
    out_dir = Path(vals["out"])
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / f"{what}.csv"
    svg_path = out_dir / f"{what}.svg"

    if what in ("arcsine", "arcsine-half"):
        cp = summary.checkpoints[-1]
        replicas = summary.spec.replicas
        if what == "arcsine":
            x = cp.g_values
            # unconditional ECDF: censored replicas are mass below the support
            ecdf = (cp.censored + np.arange(1, len(x) + 1)) / replicas
            ref = arcsine_cdf(x)
            y_label = "P(log last zero / log n <= x)"
        else:
            x = cp.z_values
            ecdf = np.arange(1, len(x) + 1) / max(len(x), 1)
            ref = arcsine_cdf_half(x)
            y_label = "P(log zero count / log n <= x | a return happened)"
        if len(x) == 0:
            raise RuntimeError("summary has no kept replicas at the final checkpoint")
        with open(csv_path, "w") as fh:
            fh.write("x,ecdf,reference\n")
            for xi, ei, ri in zip(x, ecdf, ref):
                fh.write(f"{xi:.10g},{ei:.10g},{ri:.10g}\n")
        _svg_render(
            svg_path,
            [(x, ecdf, "empirical"), (x, ref, "limit law")],
            "x",
            y_label,
        )
    elif what == "tail":
        rows = [cp.tail for cp in summary.checkpoints if cp.tail is not None]
        if not rows:
            raise RuntimeError("summary has no tail estimates")
        with open(csv_path, "w") as fh:
            fh.write("n,p_hat,ci_low,ci_high,theory\n")
            for te in rows:
                fh.write(
                    f"{te.n},{te.p_hat:.10g},{te.ci_low:.10g},{te.ci_high:.10g},{te.theory:.10g}\n"
                )
        ns = np.array([math.log10(te.n) for te in rows])
        _svg_render(
            svg_path,
            [
                (ns, np.array([te.p_hat for te in rows]), "estimate"),
                (ns, np.array([te.theory for te in rows]), "theory"),
            ],
            "log10 n",
            "P(no return by n)",
        )
    else:
        if summary.embedding is None:
            raise RuntimeError("summary carries no embedding block")
        drift = summary.embedding.drift_values
        counts, edges = np.histogram(drift, bins=40)
        with open(csv_path, "w") as fh:
            fh.write("bin_left,bin_right,count\n")
            for i, c in enumerate(counts):
                fh.write(f"{edges[i]:.10g},{edges[i + 1]:.10g},{int(c)}\n")
        centers = (edges[:-1] + edges[1:]) / 2.0
        _svg_render(
            svg_path,
            [(centers, counts.astype(np.float64), "histogram")],
            "clock drift at the horizon",
            "replicas per bin",
        )

    print(f"erwlab plot-data  what={what}")
    if overrides:
        print("overrides: " + ", ".join(f"{k}={overrides[k]}" for k in sorted(overrides)))
    print(f"csv written to {csv_path}")
    print(f"svg written to {svg_path}")
    payload = {
        "command": "plot-data",
        "overrides": {k: overrides[k] for k in sorted(overrides)},
        "outputs": [str(csv_path), str(svg_path)],
        "exit_code": 0,
    }
    print(_TRAILER_MARK)
    print(json.dumps(payload, sort_keys=True))
    return 0


# ---------------------------------------------------------------------------
# wiring

class FlagError(ValueError):
    """Invalid flag or config value; maps to exit code 2."""


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="erwlab",
        description="Simulation and statistical verification laboratory for the "
        "critical memory-reinforced random walk.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one replica and report its statistics")
    sim.add_argument("--p", type=float, default=None, help="step-repeat probability (default 0.75)")
    sim.add_argument("--q", type=float, default=None, help="first-step up probability (default 0.5)")
    sim.add_argument("--n", type=int, default=None, help="horizon (default 50000)")
    sim.add_argument("--seed", type=int, default=None, help="master seed (default 0)")
    sim.add_argument("--trace-every", type=int, default=None, help="emit a CSV row every k steps")
    sim.add_argument("--trace-out", type=str, default=None, help="trace CSV path (default trace.csv)")
    sim.add_argument("--config", type=str, default=None, help="key = value config file")
    sim.set_defaults(func=_cmd_simulate)

    ens = sub.add_parser("ensemble", help="run a replica ensemble and persist its summary")
    ens.add_argument("--seed", type=int, default=None)
    ens.add_argument("--replicas", type=int, default=None)
    ens.add_argument("--n-base", type=int, default=None)
    ens.add_argument("--t-grid", type=str, default=None, help="comma-separated exponents in (0, 1]")
    ens.add_argument("--p", type=float, default=None)
    ens.add_argument("--q", type=float, default=None)
    ens.add_argument("--embedding", action="store_const", const=True, default=None)
    ens.add_argument("--excursion-check", action="store_const", const=True, default=None)
    ens.add_argument("--excursion-steps", type=int, default=None)
    ens.add_argument("--excursion-refine", type=float, default=None)
    ens.add_argument("--block-size", type=int, default=None)
    ens.add_argument("--out", type=str, default=None, help="summary path (default ensemble_summary.json)")
    ens.add_argument("--workers", type=int, default=None)
    ens.add_argument("--checkpoint-dir", type=str, default=None)
    ens.add_argument("--resume", action="store_const", const=True, default=None)
    ens.add_argument("--config", type=str, default=None)
    ens.set_defaults(func=_cmd_ensemble)

    va = sub.add_parser("verify-arcsine", help="limit laws of the zero set")
    va.add_argument("--n-base", type=int, default=None)
    va.add_argument("--replicas", type=int, default=None)
    va.add_argument("--seed", type=int, default=None)
    va.add_argument("--ks-g-bound", type=float, default=None)
    va.add_argument("--ks-z-bound", type=float, default=None)
    va.add_argument("--quarter-tol", type=float, default=None)
    va.add_argument("--workers", type=int, default=None)
    va.add_argument("--config", type=str, default=None)
    va.set_defaults(func=_cmd_verify_arcsine)

    vt = sub.add_parser("verify-tail", help="no-return tail against its scaled limit")
    vt.add_argument("--n-list", type=str, default=None, help="comma-separated horizons")
    vt.add_argument("--replicas", type=int, default=None)
    vt.add_argument("--seed", type=int, default=None)
    vt.add_argument("--band-low", type=float, default=None)
    vt.add_argument("--band-high", type=float, default=None)
    vt.add_argument("--config", type=str, default=None)
    vt.set_defaults(func=_cmd_verify_tail)

    ve = sub.add_parser("verify-embedding", help="exit-time construction checks")
    ve.add_argument("--n", type=int, default=None, help="sign-law horizon (default 10)")
    ve.add_argument("--replicas", type=int, default=None)
    ve.add_argument("--seed", type=int, default=None)
    ve.add_argument("--mode", type=str, default=None, help="series, grid, or both")
    ve.add_argument("--grid-refine", type=float, default=None)
    ve.add_argument(
        "--concentration",
        action="store_const",
        const=True,
        default=None,
        help="also run the clock-concentration criterion (two clauses fail honestly)",
    )
    ve.add_argument(
        "--excursions",
        action="store_const",
        const=True,
        default=None,
        help="also run the excursion-count criterion",
    )
    ve.add_argument("--config", type=str, default=None)
    ve.set_defaults(func=_cmd_verify_embedding)

    vo = sub.add_parser("verify-oracles", help="simulation against exhaustive enumeration")
    vo.add_argument("--seed", type=int, default=None)
    vo.add_argument("--replicas", type=int, default=None)
    vo.add_argument("--horizons", type=str, default=None, help="comma-separated, each <= 14")
    vo.add_argument("--config", type=str, default=None)
    vo.set_defaults(func=_cmd_verify_oracles)

    pd = sub.add_parser("plot-data", help="emit CSV and SVG from a persisted summary")
    pd.add_argument("--summary", type=str, default=None, help="summary JSON path")
    pd.add_argument(
        "--what", type=str, default=None, help="arcsine, arcsine-half, tail, or embedding-hist"
    )
    pd.add_argument("--out", type=str, default=None, help="output directory (default .)")
    pd.add_argument("--config", type=str, default=None)
    pd.set_defaults(func=_cmd_plot_data)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (FlagError, argparse.ArgumentTypeError) as exc:
        print(f"flag error: {exc}", file=sys.stderr)
        return 2
    except (ValueError, OSError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
