"""Command-line front end.

Subcommands:
    angle          weak inner product, defect, and angle of two vectors
    ortho          orthogonality test for two vectors
    energy         L1 Fourier energy of a signal
    decompose      spectral iterative-filtering split of a signal
    audit          re-check an externally supplied decomposition JSON
    precond-bench  iteration-count tables over an (n, p) grid
    spectrum       circulant and preconditioned spectra for one (n, p)

Every file-producing command drops a manifest.json alongside its outputs;
reruns with the same manifest are bit-identical except for the timestamp.
All floating-point output carries 17 significant digits. Set LPORTHO_LOG
to DEBUG/INFO/WARNING to control verbosity.
"""

from __future__ import annotations

import argparse
import datetime
import json
import logging
import os
import sys
from typing import Optional, Sequence

import numpy as np

from . import __version__
from ._serialize import dumps_json, format_float
from .banach_geometry import DEFAULT_ORTHO_TOL, DiscreteFunction, is_orthogonal, pair_geometry
from .signal_decomposition import (
    Decomposition,
    EnergyReport,
    check_energy_conservation,
    decomposition_from_dict,
    decomposition_to_dict,
    energy_report_to_dict,
    fif_decompose,
    l1_fourier_energy,
    read_signal_csv,
)
from .toeplitz_preconditioning import (
    BenchmarkConfig,
    BenchmarkResult,
    DENSE_DIAGNOSTIC_LIMIT,
    ToeplitzSymbol,
    build_toeplitz,
    circulant_spectrum,
    lp_circulant_minimizer,
    preconditioned_spectrum_diagnostic,
    render_table_csv,
    render_table_markdown,
    run_benchmark,
    strang_type_correction,
)

log = logging.getLogger("lportho")


def _setup_logging() -> None:
    level_name = os.environ.get("LPORTHO_LOG", "WARNING").upper()
    level = getattr(logging, level_name, logging.WARNING)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _read_vector_csv(path: str) -> np.ndarray:
    """One value per line; blank lines and '#' comments skipped."""
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for raw in fh:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            values.append(float(line))
    if not values:
        raise ValueError(f"no samples found in {path}")
    return np.asarray(values)


def _write_manifest(
    out_dir: str,
    command: str,
    inputs: list[str],
    parameters: dict,
    outputs: list[str],
    seed: Optional[int],
) -> None:
    manifest = {
        "command": command,
        "tool_version": __version__,
        "inputs": inputs,
        "parameters": parameters,
        "seed": seed,
        "out_dir": out_dir,
        "outputs": outputs,
        "timestamp": datetime.datetime.now(datetime.timezone.utc).isoformat(),
    }
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        fh.write(dumps_json(manifest))


def _print_json(doc: dict) -> None:
    sys.stdout.write(dumps_json(doc))


def _cmd_angle(args: argparse.Namespace) -> int:
    f = DiscreteFunction(_read_vector_csv(args.file_f))
    g = DiscreteFunction(_read_vector_csv(args.file_g))
    result = pair_geometry(f, g, args.p)
    _print_json(
        {
            "wip": result.weak_inner_product,
            "defect": result.defect,
            "angle": result.angle,
            "orthogonal": is_orthogonal(f, g, args.p, args.tol),
        }
    )
    return 0


def _cmd_ortho(args: argparse.Namespace) -> int:
    f = DiscreteFunction(_read_vector_csv(args.file_f))
    g = DiscreteFunction(_read_vector_csv(args.file_g))
    result = pair_geometry(f, g, args.p)
    _print_json(
        {
            "orthogonal": is_orthogonal(f, g, args.p, args.tol),
            "wip": result.weak_inner_product,
            "p": float(args.p),
            "tol": float(args.tol),
        }
    )
    return 0


def _cmd_energy(args: argparse.Namespace) -> int:
    s = read_signal_csv(args.signal)
    _print_json({"n": s.n, "bandwidth": s.bandwidth, "energy": l1_fourier_energy(s)})
    return 0


def _spectrum_comparison_rows(d: Decomposition) -> list[tuple[int, float, float]]:
    shat = np.abs(np.fft.fft(d.source.samples))
    stacked = np.zeros_like(shat)
    for part in d.parts:
        stacked += np.abs(np.fft.fft(part.samples))
    return [(int(k), float(shat[k]), float(stacked[k])) for k in range(shat.size)]


def _report_text(report: EnergyReport) -> str:
    lines = ["quantity,value"]
    lines.append(f"total_energy,{format_float(report.total_energy)}")
    for i, e in enumerate(report.component_energies[:-1]):
        lines.append(f"component_{i}_energy,{format_float(e)}")
    lines.append(f"trend_energy,{format_float(report.component_energies[-1])}")
    lines.append(f"conservation_gap,{format_float(report.conservation_gap)}")
    lines.append(f"conserved,{str(report.conserved).lower()}")
    lines.append(f"unwanted_frequency_count,{len(report.unwanted_frequencies)}")
    return "\n".join(lines) + "\n"


def _emit_decomposition_files(
    out_dir: str, d: Decomposition, report: EnergyReport
) -> list[str]:
    os.makedirs(out_dir, exist_ok=True)
    outputs = []
    with open(os.path.join(out_dir, "decomposition.json"), "w", encoding="utf-8") as fh:
        fh.write(dumps_json(decomposition_to_dict(d)))
    outputs.append("decomposition.json")
    with open(os.path.join(out_dir, "energy_report.json"), "w", encoding="utf-8") as fh:
        fh.write(dumps_json(energy_report_to_dict(report)))
    outputs.append("energy_report.json")
    with open(os.path.join(out_dir, "energy_report.txt"), "w", encoding="utf-8") as fh:
        fh.write(_report_text(report))
    outputs.append("energy_report.txt")
    with open(os.path.join(out_dir, "spectrum_comparison.csv"), "w", encoding="utf-8") as fh:
        fh.write("xi,signal_abs,components_abs_sum\n")
        for k, sv, cv in _spectrum_comparison_rows(d):
            fh.write(f"{k},{format_float(sv)},{format_float(cv)}\n")
    outputs.append("spectrum_comparison.csv")
    return outputs


def _cmd_decompose(args: argparse.Namespace) -> int:
    s = read_signal_csv(args.signal)
    halfwidths = [int(h) for h in args.halfwidths.split(",") if h.strip()]
    d = fif_decompose(s, halfwidths, args.delta, args.max_inner)
    report = check_energy_conservation(d, args.tol)
    outputs = _emit_decomposition_files(args.out_dir, d, report)
    _write_manifest(
        args.out_dir,
        "decompose",
        [args.signal],
        {
            "halfwidths": halfwidths,
            "delta": float(args.delta),
            "max_inner": int(args.max_inner),
            "tol": float(args.tol),
        },
        outputs,
        None,
    )
    log.info("decomposition written to %s", args.out_dir)
    _print_json(energy_report_to_dict(report))
    return 0


def _cmd_audit(args: argparse.Namespace) -> int:
    with open(args.decomposition, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    d = decomposition_from_dict(doc)
    report = check_energy_conservation(d, args.tol)
    if args.out_dir:
        outputs = _emit_decomposition_files(args.out_dir, d, report)
        _write_manifest(
            args.out_dir,
            "audit",
            [args.decomposition],
            {"tol": float(args.tol)},
            outputs,
            None,
        )
    _print_json(energy_report_to_dict(report))
    return 0


def _write_spectrum_csv(path: str, eigenvalues: np.ndarray) -> None:
    lam = np.asarray(eigenvalues)
    scale = float(np.max(np.abs(lam))) if lam.size else 0.0
    if np.iscomplexobj(lam) and float(np.max(np.abs(lam.imag))) > 1e-12 * max(scale, 1.0):
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("j,lambda_re,lambda_im\n")
            for j, v in enumerate(lam):
                fh.write(f"{j},{format_float(float(v.real))},{format_float(float(v.imag))}\n")
    else:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("j,lambda\n")
            for j, v in enumerate(np.real(lam)):
                fh.write(f"{j},{format_float(float(v))}\n")


def _cmd_precond_bench(args: argparse.Namespace) -> int:
    with open(args.config, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if args.seed is not None:
        doc["seed"] = args.seed
    if args.correction is not None:
        doc["correction"] = args.correction
    if args.tol is not None:
        doc["tol"] = args.tol
    config = BenchmarkConfig.from_dict(doc)
    result = run_benchmark(config, workers=args.workers)
    os.makedirs(args.out_dir, exist_ok=True)
    outputs = []
    with open(os.path.join(args.out_dir, "table.csv"), "w", encoding="utf-8") as fh:
        fh.write(render_table_csv(result))
    outputs.append("table.csv")
    with open(os.path.join(args.out_dir, "table.md"), "w", encoding="utf-8") as fh:
        fh.write(render_table_markdown(result))
    outputs.append("table.md")
    spectra_dir = os.path.join(args.out_dir, "spectra")
    os.makedirs(spectra_dir, exist_ok=True)
    for cell in result.cells:
        if cell.p is None or cell.circulant_eigenvalues is None:
            continue
        name = f"spectrum_n{cell.n}_p{format(cell.p, 'g')}.csv"
        _write_spectrum_csv(os.path.join(spectra_dir, name), cell.circulant_eigenvalues)
        outputs.append(os.path.join("spectra", name))
    _write_manifest(
        args.out_dir,
        "precond-bench",
        [args.config],
        config.to_dict(),
        outputs,
        config.seed,
    )
    log.info("benchmark written to %s", args.out_dir)
    sys.stdout.write(render_table_markdown(result))
    return 0


def _cmd_spectrum(args: argparse.Namespace) -> int:
    symbol = ToeplitzSymbol.from_model(args.alpha, args.beta, args.gamma)
    T = build_toeplitz(symbol, args.n)
    C = lp_circulant_minimizer(T, args.p)
    corrected = False
    if args.correction == "on" and not C.is_spd():
        C = strang_type_correction(C, 0.0)
        corrected = True
    os.makedirs(args.out_dir, exist_ok=True)
    outputs = ["circulant_spectrum.csv"]
    lam = circulant_spectrum(C)
    _write_spectrum_csv(os.path.join(args.out_dir, "circulant_spectrum.csv"), lam)
    summary: dict = {
        "n": args.n,
        "p": float(args.p),
        "corrected": corrected,
        "min_eigenvalue": float(np.min(np.real(lam))),
        "max_eigenvalue": float(np.max(np.real(lam))),
        "negative_eigenvalue_count": C.num_negative_eigenvalues,
    }
    if args.n <= DENSE_DIAGNOSTIC_LIMIT and C.is_spd():
        diag = preconditioned_spectrum_diagnostic(T, C)
        _write_spectrum_csv(os.path.join(args.out_dir, "preconditioned_spectrum.csv"), diag.eigenvalues)
        outputs.append("preconditioned_spectrum.csv")
        summary["cluster_fractions"] = {format(r, "g"): v for r, v in diag.cluster_fractions.items()}
    else:
        summary["cluster_fractions"] = None
    _write_manifest(
        args.out_dir,
        "spectrum",
        [],
        {
            "alpha": float(args.alpha),
            "beta": float(args.beta),
            "gamma": float(args.gamma),
            "n": args.n,
            "p": float(args.p),
            "correction": args.correction,
        },
        outputs,
        None,
    )
    _print_json(summary)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lportho",
        description="Banach-space angles, L1 Fourier-energy conservation, and lp circulant preconditioning.",
    )
    parser.add_argument("--version", action="version", version=f"lportho {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_angle = sub.add_parser("angle", help="weak inner product, defect, and angle of two vectors")
    p_angle.add_argument("file_f")
    p_angle.add_argument("file_g")
    p_angle.add_argument("--p", type=float, default=1.0)
    p_angle.add_argument("--tol", type=float, default=DEFAULT_ORTHO_TOL)
    p_angle.set_defaults(func=_cmd_angle)

    p_ortho = sub.add_parser("ortho", help="orthogonality test for two vectors")
    p_ortho.add_argument("file_f")
    p_ortho.add_argument("file_g")
    p_ortho.add_argument("--p", type=float, default=1.0)
    p_ortho.add_argument("--tol", type=float, default=DEFAULT_ORTHO_TOL)
    p_ortho.set_defaults(func=_cmd_ortho)

    p_energy = sub.add_parser("energy", help="L1 Fourier energy of a signal")
    p_energy.add_argument("signal")
    p_energy.set_defaults(func=_cmd_energy)

    p_dec = sub.add_parser("decompose", help="spectral iterative-filtering decomposition")
    p_dec.add_argument("signal")
    p_dec.add_argument("--halfwidths", required=True, help="comma-separated increasing filter halfwidths")
    p_dec.add_argument("--delta", type=float, default=1e-3)
    p_dec.add_argument("--max-inner", type=int, default=200)
    p_dec.add_argument("--tol", type=float, default=1e-10, help="energy conservation tolerance")
    p_dec.add_argument("--out-dir", default="lportho-out")
    p_dec.set_defaults(func=_cmd_decompose)

    p_audit = sub.add_parser("audit", help="energy-check an external decomposition JSON")
    p_audit.add_argument("decomposition")
    p_audit.add_argument("--tol", type=float, default=1e-10)
    p_audit.add_argument("--out-dir", default=None)
    p_audit.set_defaults(func=_cmd_audit)

    p_bench = sub.add_parser("precond-bench", help="iteration tables over an (n, p) grid")
    p_bench.add_argument("--config", required=True)
    p_bench.add_argument("--out-dir", default="lportho-out")
    p_bench.add_argument("--workers", type=int, default=4)
    p_bench.add_argument("--seed", type=int, default=None, help="override the config seed")
    p_bench.add_argument("--correction", choices=["on", "off"], default=None, help="override the config correction switch")
    p_bench.add_argument("--tol", type=float, default=None, help="override the config solver tolerance")
    p_bench.set_defaults(func=_cmd_precond_bench)

    p_spec = sub.add_parser("spectrum", help="circulant and preconditioned spectra for one (n, p)")
    p_spec.add_argument("--alpha", type=float, required=True)
    p_spec.add_argument("--beta", type=float, required=True)
    p_spec.add_argument("--gamma", type=float, required=True)
    p_spec.add_argument("--n", type=int, required=True)
    p_spec.add_argument("--p", type=float, required=True)
    p_spec.add_argument("--correction", choices=["on", "off"], default="off")
    p_spec.add_argument("--out-dir", default="lportho-out")
    p_spec.set_defaults(func=_cmd_spectrum)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    _setup_logging()
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, ArithmeticError, OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
