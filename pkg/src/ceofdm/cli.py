"""Command-line front end: generate, analyze, scan, compare-lfm.

Every run writes its data files plus a manifest.json into --out.  Data files
are pure functions of the inputs, so re-running a command reproduces them
byte for byte; only the manifest timestamp changes.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .closed_form import (acf_uniform, af_surface, spectrum, write_acf_csv,
                          write_spectrum_csv, write_surface_csv)
from .eoa import eoa_closed_form, h_for_tbp, rho_norm_max
from .gbf import compute_coefficients, write_coefficients_csv
from .oracle import (OracleConfig, af_numeric_grid, rdcf_numeric,
                     rms_bandwidth_numeric, rms_pulselength_numeric)
from .sidelobes import metric_surface, sidelobe_report, write_scan_csv
from .waveform import (PskCode, WaveformSpec, load_spec, oversample_floor,
                       random_psk_code, sample, sample_times, save_spec,
                       wrap_phase)


def _utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _write_manifest(out_dir: Path, command: str, spec_file, outputs,
                    parameters) -> None:
    manifest = {
        "command": command,
        "spec_file": str(spec_file) if spec_file is not None else None,
        "outputs": sorted(str(p) for p in outputs),
        "parameters": parameters,
        "tool_version": __version__,
        "timestamp": _utc_now(),
    }
    with open(out_dir / "manifest.json", "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _parameters(args) -> dict:
    skip = {"func"}
    out = {}
    for key, val in sorted(vars(args).items()):
        if key in skip:
            continue
        out[key] = str(val) if isinstance(val, Path) else val
    return out


def _oracle_fs(spec: WaveformSpec) -> float:
    # Snap the node count to a power of two at or above both twice the
    # sampling floor and 8192 so Simpson grids stay clean across reruns.
    n = max(2.0 * oversample_floor(spec) * spec.T, 8192.0)
    return float(2 ** math.ceil(math.log2(n))) / spec.T


def _resolve_h(args, L: int) -> float:
    if args.h is not None:
        return args.h
    return h_for_tbp(args.T, args.tbp / args.T, L)


def cmd_gen(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    h = _resolve_h(args, args.L)
    if args.phi_file is not None:
        phi = np.loadtxt(args.phi_file, dtype=float, ndmin=1)
        if phi.shape != (args.L,):
            raise ValueError(
                f"phi file holds {phi.size} phases, expected {args.L}")
        code = PskCode(L=args.L, gamma=np.ones(args.L), phi=wrap_phase(phi))
    elif args.seed is not None:
        code = random_psk_code(args.L, args.mpsk, args.seed)
    else:
        code = PskCode(L=args.L, gamma=np.ones(args.L),
                       phi=np.zeros(args.L), m_psk=args.mpsk)
    spec = WaveformSpec(T=args.T, h=h, code=code)

    spec_path = out_dir / "spec.json"
    save_spec(spec, spec_path)

    fs = args.fs if args.fs is not None else 2.0 * oversample_floor(spec)
    t = sample_times(spec, fs)
    s = sample(spec, fs)
    samples_path = out_dir / "samples.csv"
    with open(samples_path, "w") as fh:
        fh.write("t,re,im\n")
        for ti, si in zip(t, s):
            fh.write(f"{ti:.17g},{si.real:.17g},{si.imag:.17g}\n")

    _write_manifest(out_dir, "gen", spec_path,
                    [spec_path.name, samples_path.name], _parameters(args))
    print(f"wrote {spec_path} (h = {h:.6g}) and {samples_path}")
    return 0


def cmd_analyze(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    spec = load_spec(args.spec)
    coeffs = compute_coefficients(spec, args.tol)
    outputs = []

    coeff_path = out_dir / "coefficients.csv"
    write_coefficients_csv(coeffs, coeff_path)
    outputs.append(coeff_path.name)

    cfg = OracleConfig(fs=_oracle_fs(spec)) if args.oracle else None

    if args.spectrum:
        f_max = args.f_max if args.f_max is not None \
            else (2.0 * spec.L + 8.0) / spec.T
        f = np.linspace(-f_max, f_max, args.f_n)
        samples = spectrum(spec, f, tol=args.tol, coeffs=coeffs)
        path = out_dir / "spectrum.csv"
        write_spectrum_csv(samples, path)
        outputs.append(path.name)

    if args.acf:
        tau, R = acf_uniform(spec, n_tau=args.acf_n, tol=args.tol,
                             coeffs=coeffs)
        path = out_dir / "acf.csv"
        if cfg is None:
            write_acf_csv(tau, R, path)
        else:
            ref = af_numeric_grid(spec, tau, np.zeros(1), cfg)[:, 0]
            with open(path, "w") as fh:
                fh.write("tau,re,im,abs2,oracle_re,oracle_im,abs_err\n")
                for j in range(len(tau)):
                    err = abs(R[j] - ref[j])
                    fh.write(f"{tau[j]:.17g},{R[j].real:.17g},"
                             f"{R[j].imag:.17g},{abs(R[j])**2:.17g},"
                             f"{ref[j].real:.17g},{ref[j].imag:.17g},"
                             f"{err:.17g}\n")
        outputs.append(path.name)

    if args.af is not None:
        tau_n, nu_n = args.af
        tau = np.linspace(-0.9 * spec.T, 0.9 * spec.T, tau_n)
        nu = np.linspace(-10.0 / spec.T, 10.0 / spec.T, nu_n)
        surf = af_surface(spec, tau, nu, tol=args.tol, coeffs=coeffs)
        path = out_dir / "af.csv"
        write_surface_csv(surf, path)
        outputs.append(path.name)

    if args.eoa:
        params = eoa_closed_form(spec)
        report = {
            "beta2": params.beta2,
            "tau2": params.tau2,
            "rho": params.rho,
            "rho_norm": params.rho_norm,
            "rho_norm_max": rho_norm_max(spec.L),
            "f0": params.f0,
            "h": spec.h,
            "L": spec.L,
            "T": spec.T,
        }
        path = out_dir / "eoa.json"
        with open(path, "w") as fh:
            json.dump(report, fh, indent=2, sort_keys=True)
            fh.write("\n")
        outputs.append(path.name)
        if cfg is not None:
            closed = {"beta2": params.beta2, "tau2": params.tau2,
                      "rho": params.rho}
            numeric = {"beta2": rms_bandwidth_numeric(spec, cfg),
                       "tau2": rms_pulselength_numeric(spec, cfg),
                       "rho": rdcf_numeric(spec, cfg)}
            rows = []
            for name in ("beta2", "tau2", "rho"):
                err = abs(closed[name] - numeric[name])
                scale = max(abs(closed[name]), 1e-300)
                rows.append({"quantity": name,
                             "closed_form": closed[name],
                             "numeric": numeric[name],
                             "abs_err": err,
                             "rel_err": err / scale,
                             "fs": cfg.fs,
                             "rule": cfg.quad_rule})
            path = out_dir / "oracle_eoa.json"
            with open(path, "w") as fh:
                json.dump(rows, fh, indent=2, sort_keys=True)
                fh.write("\n")
            outputs.append(path.name)

    if args.sidelobes:
        rep = sidelobe_report(spec, n_tau=args.acf_n, tol=args.tol)
        path = out_dir / "sidelobes.json"
        with open(path, "w") as fh:
            json.dump({"delta_tau": rep.delta_tau,
                       "pslr_db": rep.pslr_db,
                       "isl_db": rep.isl_db,
                       "null_found": rep.null_found,
                       "n_tau": args.acf_n,
                       "tau_max": float(rep.tau_grid[-1])},
                      fh, indent=2, sort_keys=True)
            fh.write("\n")
        outputs.append(path.name)

    _write_manifest(out_dir, "analyze", args.spec, outputs,
                    _parameters(args))
    print(f"wrote {len(outputs)} files to {out_dir}")
    return 0


def cmd_scan(args) -> int:
    if args.L != 2:
        raise ValueError(f"scan supports L = 2 only, got L = {args.L}")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    h = _resolve_h(args, args.L)
    surf = metric_surface(args.T, h, args.grid_n, n_tau=args.acf_n,
                          tol=args.tol)
    path = out_dir / "scan.csv"
    write_scan_csv(surf, path)
    _write_manifest(out_dir, "scan", None, [path.name], _parameters(args))
    print(f"wrote {path} ({args.grid_n * args.grid_n} rows, h = {h:.6g})")
    return 0


def _lfm_spectrum(T: float, delta_f: float, f_grid, fs: float):
    """Numeric spectrum of the unit-energy LFM chirp with sweep delta_f."""
    n = max(int(round(fs * T)), 4)
    d = T / n
    t = -T / 2 + (np.arange(n) + 0.5) * d
    s = np.exp(1j * np.pi * (delta_f / T) * t * t) / np.sqrt(T)
    out = np.empty(len(f_grid), dtype=complex)
    chunk = max(1, (1 << 22) // max(n, 1))
    for lo in range(0, len(f_grid), chunk):
        fblk = np.asarray(f_grid[lo:lo + chunk])
        out[lo:lo + len(fblk)] = (
            np.exp(-2j * np.pi * fblk[:, None] * t[None, :]) @ s) * d
    return out


def _oob_fraction(f, abs2, half_band: float) -> float:
    # Total spectral energy is 1 by construction; integrate the contiguous
    # in-band stretch and subtract rather than summing a masked tail.
    mask = np.abs(f) <= half_band
    inband = float(np.trapezoid(abs2[mask], f[mask]))
    return 1.0 - inband


def cmd_compare_lfm(args) -> int:
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    delta_f = args.tbp / args.T
    h = h_for_tbp(args.T, delta_f, args.L)
    code = random_psk_code(args.L, args.mpsk, args.seed)
    spec = WaveformSpec(T=args.T, h=h, code=code)

    f = np.linspace(-2.0 * delta_f, 2.0 * delta_f, args.f_n)
    ce = spectrum(spec, f, tol=args.tol)
    ce_path = out_dir / "ce_spectrum.csv"
    write_spectrum_csv(ce, ce_path)

    fs = max(8.0 * delta_f, 64.0 / args.T)
    lfm = _lfm_spectrum(args.T, delta_f, f, fs)
    lfm_path = out_dir / "lfm_spectrum.csv"
    with open(lfm_path, "w") as fh:
        fh.write("f,re,im,abs2\n")
        for fi, si in zip(f, lfm):
            fh.write(f"{fi:.17g},{si.real:.17g},{si.imag:.17g},"
                     f"{abs(si)**2:.17g}\n")

    lfm_beta2 = (np.pi * delta_f) ** 2 / 3.0
    n = max(int(round(fs * args.T)), 4)
    d = args.T / n
    t = -args.T / 2 + (np.arange(n) + 0.5) * d
    lfm_beta2_numeric = float(
        (2.0 * np.pi * delta_f / args.T) ** 2 * np.sum(t * t) * d / args.T)
    summary = {
        "T": args.T,
        "tbp": args.tbp,
        "delta_f": delta_f,
        "L": args.L,
        "h": h,
        "seed": args.seed,
        "m_psk": args.mpsk,
        "ce_oob_fraction": _oob_fraction(f, np.abs(ce.values) ** 2,
                                         delta_f / 2.0),
        "lfm_oob_fraction": _oob_fraction(f, np.abs(lfm) ** 2,
                                          delta_f / 2.0),
        "lfm_beta2_closed": lfm_beta2,
        "lfm_beta2_numeric": lfm_beta2_numeric,
    }
    summary["oob_ratio"] = (summary["ce_oob_fraction"]
                            / max(summary["lfm_oob_fraction"], 1e-300))
    json_path = out_dir / "comparison.json"
    with open(json_path, "w") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")

    _write_manifest(out_dir, "compare-lfm", None,
                    [ce_path.name, lfm_path.name, json_path.name],
                    _parameters(args))
    print(f"wrote comparison to {out_dir} "
          f"(CE OOB {summary['ce_oob_fraction']:.4f}, "
          f"LFM OOB {summary['lfm_oob_fraction']:.4f})")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ceofdm",
        description="Constant-envelope OFDM radar waveform toolkit")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate a waveform spec and samples")
    gen.add_argument("--L", type=int, required=True)
    gen.add_argument("--T", type=float, default=1.0)
    hgrp = gen.add_mutually_exclusive_group(required=True)
    hgrp.add_argument("--h", type=float)
    hgrp.add_argument("--tbp", type=float,
                      help="time-bandwidth product; sets h for the given L")
    gen.add_argument("--mpsk", type=int, default=32)
    cgrp = gen.add_mutually_exclusive_group()
    cgrp.add_argument("--seed", type=int,
                      help="draw code phases from the M-PSK alphabet")
    cgrp.add_argument("--phi-file", type=Path,
                      help="text file with L phases in radians, one per line")
    gen.add_argument("--fs", type=float,
                     help="sample rate; default twice the aliasing floor")
    gen.add_argument("--out", type=Path, default=Path("."))
    gen.set_defaults(func=cmd_gen)

    ana = sub.add_parser("analyze", help="closed-form reports for a spec")
    ana.add_argument("--spec", type=Path, required=True)
    ana.add_argument("--spectrum", action="store_true")
    ana.add_argument("--acf", action="store_true")
    ana.add_argument("--af", type=int, nargs=2, metavar=("TAU_N", "NU_N"),
                     help="surface on tau in ±0.9T, nu in ±10/T")
    ana.add_argument("--eoa", action="store_true")
    ana.add_argument("--sidelobes", action="store_true")
    ana.add_argument("--oracle", action="store_true",
                     help="add quadrature reference columns and reports")
    ana.add_argument("--acf-n", type=int, default=4096)
    ana.add_argument("--f-max", type=float)
    ana.add_argument("--f-n", type=int, default=1025)
    ana.add_argument("--tol", type=float, default=1e-12)
    ana.add_argument("--out", type=Path, default=Path("."))
    ana.set_defaults(func=cmd_analyze)

    scan = sub.add_parser("scan",
                          help="ISL/PSLR surface over two code phases")
    scan.add_argument("--L", type=int, default=2)
    scan.add_argument("--T", type=float, default=1.0)
    hgrp = scan.add_mutually_exclusive_group(required=True)
    hgrp.add_argument("--h", type=float)
    hgrp.add_argument("--tbp", type=float)
    scan.add_argument("--grid-n", type=int, default=64)
    scan.add_argument("--acf-n", type=int, default=4096)
    scan.add_argument("--tol", type=float, default=1e-12)
    scan.add_argument("--out", type=Path, default=Path("."))
    scan.set_defaults(func=cmd_scan)

    cmp_ = sub.add_parser("compare-lfm",
                          help="spectral containment vs an LFM chirp")
    cmp_.add_argument("--tbp", type=float, required=True)
    cmp_.add_argument("--L", type=int, required=True)
    cmp_.add_argument("--T", type=float, default=1.0)
    cmp_.add_argument("--seed", type=int, default=0)
    cmp_.add_argument("--mpsk", type=int, default=32)
    cmp_.add_argument("--f-n", type=int, default=4001)
    cmp_.add_argument("--tol", type=float, default=1e-12)
    cmp_.add_argument("--out", type=Path, default=Path("."))
    cmp_.set_defaults(func=cmd_compare_lfm)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
