"""railnoise command line.

Exit codes: 0 success, 2 configuration/validation error, 3 numerical error
(singular resonance, failed fit or root bracket), 4 I/O error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .beam import find_bending_modes, mode_q_factors
from .config import PROFILES, load_config
from .errors import RailNoiseError, SolverError
from .noise import parse_segments, save_spectrum, synth_spectrum
from .phase import (
    frequency_grid,
    known_resonances,
    optical_phase,
    phase_noise_spectrum,
    rms_bending,
)
from .suspension import pendular_modes, solve_amplitudes
from .visibility import VisibilityModel, fit_visibility, visibility

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    return f"{float(value):.9g}"


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def render_table(rows, columns, fmt, meta=None):
    """Rows (dicts) as CSV (9 significant digits) or JSON (full precision)."""
    if fmt == "json":
        doc = dict(meta or {})
        doc["rows"] = [{c: r.get(c) for c in columns} for r in rows]
        return json.dumps(_jsonable(doc), indent=2) + "\n"
    buf = io.StringIO()
    for key, value in (meta or {}).items():
        buf.write(f"# {key}={_fmt(value)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for r in rows:
        writer.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def _emit(text, output):
    if output is None:
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def _config(args):
    return load_config(args.config, args.profile, args.set or ())


def _mean_damping(suspension):
    return 0.5 * (suspension.minus_end.damping + suspension.plus_end.damping)


def cmd_modes(args):
    cfg = _config(args)
    n_max = cfg.n_max if args.n_max is None else args.n_max
    modes = find_bending_modes(cfg.rail, n_max)
    mu = _mean_damping(cfg.suspension)
    if mu > 0:
        modes = mode_q_factors(cfg.rail, mu, modes, mass=cfg.suspension.mass(cfg.rail))
    rows = [
        {
            "n": m.index,
            "kappa_L": m.kappa_L,
            "nu_hz": m.frequency_hz,
            "parity": m.parity,
            "q_factor": m.q_factor,
        }
        for m in modes
    ]
    meta = {
        "nu0_closed_form_hz": modes.omega0_closed_form / (2 * math.pi),
        "omega0_rad_s": modes.omega0,
        "period_T0_s": modes.period_T0,
    }
    _emit(render_table(rows, ["n", "kappa_L", "nu_hz", "parity", "q_factor"], args.format, meta), args.output)


def cmd_pendular(args):
    cfg = _config(args)
    pm = pendular_modes(cfg.rail, cfg.suspension)
    row = {
        "mass_kg": cfg.suspension.mass(cfg.rail),
        "nu_osc_hz": pm.nu_osc,
        "nu_rot_hz": pm.nu_rot,
        "q_osc": pm.q_osc,
        "q_rot": pm.q_rot,
    }
    _emit(render_table([row], list(row), args.format), args.output)


def _band(cfg, args):
    lo = cfg.band[0] if args.nu_min is None else args.nu_min
    hi = cfg.band[1] if args.nu_max is None else args.nu_max
    return lo, hi


def cmd_response(args):
    cfg = _config(args)
    band = _band(cfg, args)
    nu = frequency_grid(band, known_resonances(cfg.rail, cfg.suspension), cfg.grid)
    x_minus, x_plus = (1.0, 0.0) if args.end == "minus" else (0.0, 1.0)
    amps = solve_amplitudes(cfg.rail, cfg.suspension, 2 * np.pi * nu, x_minus, x_plus)
    rows = [
        {"nu_hz": f, "abs_a_over_x_sq": abs(a) ** 2, "abs_b_over_x_sq": abs(b) ** 2}
        for f, a, b in zip(nu, np.atleast_1d(amps.a), np.atleast_1d(amps.b))
    ]
    meta = {"driven_end": args.end}
    _emit(render_table(rows, ["nu_hz", "abs_a_over_x_sq", "abs_b_over_x_sq"], args.format, meta), args.output)


def cmd_phase_noise(args):
    cfg = _config(args)
    band = _band(cfg, args)
    noise_minus, noise_plus = cfg.noise_spectra()
    common = dict(
        band=band,
        grid=cfg.grid,
        allow_low_frequency=not cfg.low_freq_guard,
        interpolation=cfg.interpolation,
    )
    result = phase_noise_spectrum(cfg.rail, cfg.suspension, cfg.interferometer, noise_minus, noise_plus, **common)
    rb = rms_bending(cfg.rail, cfg.suspension, cfg.interferometer, noise_minus, noise_plus, **common)
    rows = [
        {"nu_hz": f, "phi2_total": t, "phi2_sagnac": s, "psd_minus": pm, "psd_plus": pp}
        for f, t, s, pm, pp in zip(result.nu, result.phi2_total, result.phi2_sagnac, result.psd_minus, result.psd_plus)
    ]
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ext = "json" if args.format == "json" else "csv"
    (out_dir / f"phase_noise.{ext}").write_text(
        render_table(rows, ["nu_hz", "phi2_total", "phi2_sagnac", "psd_minus", "psd_plus"], args.format)
    )
    summary = {
        "band_hz": list(result.band),
        "n_points": int(result.nu.size),
        "mean_square_total_per_p2": result.mean_square_total,
        "mean_square_sagnac_per_p2": result.mean_square_sagnac,
        "sagnac_share": result.sagnac_share,
        "rms_bending_m": rb,
    }
    text = json.dumps(_jsonable(summary), indent=2) + "\n"
    (out_dir / "summary.json").write_text(text)
    sys.stdout.write(text)


def cmd_rms_bending(args):
    cfg = _config(args)
    noise_minus, noise_plus = cfg.noise_spectra()
    rb = rms_bending(
        cfg.rail,
        cfg.suspension,
        cfg.interferometer,
        noise_minus,
        noise_plus,
        band=_band(cfg, args),
        grid=cfg.grid,
        allow_low_frequency=not cfg.low_freq_guard,
        interpolation=cfg.interpolation,
    )
    row = {"rms_bending_m": rb}
    k_opt = cfg.interferometer.optical_grating_wavevector
    if k_opt is not None:
        row["optical_phase_rms_rad"] = optical_phase(rb, 1, k_opt)
    _emit(render_table([row], list(row), args.format), args.output)


def read_visibility_data(path):
    """Rows ``p, v[, sigma_v]`` from a CSV file; ``#`` comments and a header allowed."""
    rows = []
    with open(path, newline="") as fh:
        for raw in csv.reader(fh):
            fields = [f.strip() for f in raw if f.strip()]
            if not fields or fields[0].startswith("#"):
                continue
            try:
                values = [float(f) for f in fields]
            except ValueError:
                if not rows:
                    continue  # header
                raise
            if len(values) not in (2, 3):
                raise ValueError(f"expected 2 or 3 columns, got {len(values)}")
            rows.append((int(values[0]), values[1], values[2] if len(values) == 3 else None))
    return rows


def cmd_visibility(args):
    cfg = None
    if args.config or args.profile or args.set:
        cfg = _config(args)
    data_path = args.data or (cfg.visibility_data if cfg else None)
    meta, rows, columns = {}, [], []

    fitted = None
    if data_path is not None:
        fitted = fit_visibility(read_visibility_data(data_path))

    if args.mode == "forward":
        v_max = args.v_max if args.v_max is not None else (cfg.v_max if cfg else None)
        phi1 = args.phi1_sq if args.phi1_sq is not None else (cfg.phi1_sq if cfg else None)
        if v_max is None or phi1 is None:
            raise SystemExit("visibility forward mode needs --v-max and --phi1-sq (or a config)")
        p_max = args.p_max if args.p_max is not None else (cfg.p_max if cfg else 3)
        model = VisibilityModel(v_max, phi1)
        rows = [{"p": p, "visibility": float(visibility(model, p))} for p in range(p_max + 1)]
        columns = ["p", "visibility"]
        meta = {"v_max": v_max, "phi1_sq": phi1}
    elif args.mode == "fit":
        if fitted is None:
            raise SystemExit("visibility fit mode needs --data")
        rows = [
            {
                "v_max": fitted.v_max,
                "v_max_err": fitted.v_max_err,
                "phi1_sq": fitted.phi1_sq,
                "phi1_sq_err": fitted.phi1_sq_err,
            }
        ]
        columns = list(rows[0])
    else:  # compare
        if args.model_phi2 is not None:
            model_phi2 = args.model_phi2
        elif args.summary is not None:
            model_phi2 = json.loads(Path(args.summary).read_text())["mean_square_total_per_p2"]
        else:
            raise SystemExit("visibility compare mode needs --model-phi2 or --summary")
        if fitted is not None:
            fitted_phi2, fitted_err = fitted.phi1_sq, fitted.phi1_sq_err
        elif args.phi1_sq is not None:
            fitted_phi2, fitted_err = args.phi1_sq, None
        else:
            raise SystemExit("visibility compare mode needs --data or --phi1-sq")
        rows = [
            {
                "model_phi1_sq": model_phi2,
                "fitted_phi1_sq": fitted_phi2,
                "fitted_phi1_sq_err": fitted_err,
                "ratio": model_phi2 / fitted_phi2,
            }
        ]
        columns = list(rows[0])
    _emit(render_table(rows, columns, args.format, meta), args.output)


def cmd_synth_noise(args):
    text = args.segments
    points = args.points_per_decade
    if text is None:
        if not (args.config or args.profile or args.set):
            raise SystemExit("synth-noise needs --segments or a config with noise.segments")
        cfg = _config(args)
        src = cfg.noise_plus
        if src is None or src.segments is None:
            raise SystemExit("config has no noise.segments to synthesize")
        text = src.segments
        points = points or cfg.synth_points_per_decade
    spectrum = synth_spectrum(parse_segments(text), points or 50)
    if args.format == "json":
        rows = [{"freq_hz": f, "psd_m2_per_hz": p} for f, p in zip(spectrum.nu, spectrum.psd)]
        _emit(render_table(rows, ["freq_hz", "psd_m2_per_hz"], "json"), args.output)
    elif args.output is None:
        save_spectrum(spectrum, sys.stdout)
    else:
        save_spectrum(spectrum, args.output)


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--config", help="INI config file (default: $RAILNOISE_CONFIG)")
    src.add_argument("--profile", choices=PROFILES, help="shipped parameter profile")
    common.add_argument("--set", action="append", metavar="SECTION.KEY=VALUE", help="override a config value")
    common.add_argument("--format", choices=("csv", "json"), default="csv")
    common.add_argument("--output", "-o", help="write the table here instead of stdout")

    band = argparse.ArgumentParser(add_help=False)
    band.add_argument("--nu-min", type=float)
    band.add_argument("--nu-max", type=float)

    parser = argparse.ArgumentParser(prog="railnoise", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("modes", parents=[common], help="free bending modes and Q factors")
    p.add_argument("--n-max", type=int)
    p.set_defaults(func=cmd_modes)

    p = sub.add_parser("pendular", parents=[common], help="pendular resonances of the suspension")
    p.set_defaults(func=cmd_pendular)

    p = sub.add_parser("response", parents=[common, band], help="|a/x|^2 and |b/x|^2 versus frequency")
    p.add_argument("--end", choices=("minus", "plus"), default="plus", help="driven support")
    p.set_defaults(func=cmd_response)

    p = sub.add_parser("phase-noise", parents=[common, band], help="phase-noise spectra and band integrals")
    p.add_argument("--out-dir", default=".", help="directory for phase_noise.* and summary.json")
    p.set_defaults(func=cmd_phase_noise)

    p = sub.add_parser("rms-bending", parents=[common, band], help="rms grating misalignment")
    p.set_defaults(func=cmd_rms_bending)

    p = sub.add_parser("visibility", parents=[common], help="visibility versus diffraction order")
    p.add_argument("mode", choices=("forward", "fit", "compare"), nargs="?", default="forward")
    p.add_argument("--v-max", type=float)
    p.add_argument("--phi1-sq", type=float)
    p.add_argument("--p-max", type=int)
    p.add_argument("--data", help="CSV of p, v[, sigma_v]")
    p.add_argument("--model-phi2", type=float, help="model <Phi^2>/p^2 in rad^2")
    p.add_argument("--summary", help="summary.json written by phase-noise")
    p.set_defaults(func=cmd_visibility)

    p = sub.add_parser("synth-noise", parents=[common], help="synthesize a piecewise power-law PSD")
    p.add_argument("--segments", help="nu_start:nu_end:psd_start:slope;...")
    p.add_argument("--points-per-decade", type=int)
    p.set_defaults(func=cmd_synth_noise)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except SolverError as exc:
        print(f"railnoise: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (RailNoiseError, ValueError) as exc:
        print(f"railnoise: invalid input: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except BrokenPipeError:
        # reader went away (e.g. piped into head); not an error
        sys.stdout = open(os.devnull, "w")
        return EXIT_OK
    except OSError as exc:
        print(f"railnoise: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except SystemExit as exc:
        if isinstance(exc.code, str):
            print(f"railnoise: {exc.code}", file=sys.stderr)
            return EXIT_CONFIG
        raise
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
