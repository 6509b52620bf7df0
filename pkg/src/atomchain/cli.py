"""Command-line front end: ``butterfly``, ``sweep-phi``, ``modes`` and
``greens-check``.

Parameters come from an optional ``key = value`` config file; command-line
flags override file values, and ``ATOMCHAIN_OUTPUT_DIR`` overrides the
output directory of the file (but not ``--output-dir``).  Every output is a
deterministic function of the resolved parameters.
"""
from __future__ import annotations

import argparse
import json
import logging
import math
import os
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analysis import (
    Thresholds,
    branch_slope,
    decay_range_along_branch,
    BranchError,
    intensity_profile,
    label_sweep,
    track_branches,
    _label,
    _weights,
)
from .core import CONFIG_KEYS, ChainConfig, ConfigError, load_config, parse_value
from .eigen import EigenError, eigendecompose
from .greens import EPS_LIGHT, LightLineSingular, Method, bloch_sum, coupling_kernel
from .hamiltonian import build_finite, farey_sequence
from .spectra import (
    SweepError,
    bloch_spectrum,
    butterfly_sweep,
    detect_gaps,
    open_chain_sweep,
    phase_grid,
    write_csv,
    write_spectrum_jsonl,
)

log = logging.getLogger("atomchain")

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

OUTPUT_ENV = "ATOMCHAIN_OUTPUT_DIR"

DEFAULT_CHAIN = {
    "n_atoms": 101,
    "spacing": 0.1,
    "zeeman_amp": 10.0,
    "flux": math.sqrt(5) / 10,
    "phase": 0.0,
}

DEFAULT_NUMERICS = {
    "farey_order": 20,
    "k_samples": 32,
    "phase_samples": 16,
    "gap_k_samples": 16,
    "gap_phase_samples": 8,
    "q_max": 100,
    "phase_points": 201,
    "window": 10,
    "edge_threshold": 0.5,
    "pol_threshold": 0.7,
    "band_edge_tol": 0.05,
    "min_gap_width": 0.1,
    "workers": 0,
    "d_min": 1e-3,
    "d_max": 2.0,
    "d_points": 200,
    "kappa_points": 100,
    "l_max": 10**6,
    "eps_light": EPS_LIGHT,
    "detuning_min": -math.inf,
    "detuning_max": math.inf,
    "jsonl": False,
    "dump_matrix": False,
}


@dataclass(frozen=True)
class RunManifest:
    command: str
    config: ChainConfig
    numerics: dict
    output_dir: Path
    seedless: bool = field(default=True, init=False)

    def thresholds(self) -> Thresholds:
        window = int(self.numerics["window"])
        return Thresholds(
            window=min(window, self.config.n_atoms // 2),
            edge_threshold=float(self.numerics["edge_threshold"]),
            pol_threshold=float(self.numerics["pol_threshold"]),
            band_edge_tol=float(self.numerics["band_edge_tol"]),
        )

    @property
    def workers(self) -> int | None:
        return int(self.numerics["workers"]) or None

    def to_dict(self) -> dict:
        num = {k: (v if not isinstance(v, float) or math.isfinite(v) else str(v))
               for k, v in self.numerics.items()}
        return {
            "command": self.command,
            "config": {k: getattr(self.config, k) for k in CONFIG_KEYS},
            "numerics": num,
            "seedless": self.seedless,
        }


# --- commands ---------------------------------------------------------------

def _write_json(path: Path, payload: dict) -> Path:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    return path


def run_butterfly(manifest: RunManifest) -> list[Path]:
    """Projected Bloch spectrum over a Farey grid of fluxes."""
    num = manifest.numerics
    out = manifest.output_dir
    fluxes = farey_sequence(int(num["farey_order"]))
    spec = butterfly_sweep(
        fluxes, int(num["k_samples"]), int(num["phase_samples"]),
        manifest.config.spacing, manifest.config.zeeman_amp, int(num["q_max"]),
        manifest.workers,
    )
    rows = zip(spec.sweep_coord.tolist(), spec.detuning.tolist(), spec.decay.tolist(),
               spec.k.tolist(), spec.phase.tolist())
    files = [write_csv(out / "butterfly.csv", ("b", "detuning", "decay", "k", "phase"), rows)]
    if num["jsonl"]:
        files.append(write_spectrum_jsonl(spec, out / "butterfly.jsonl"))
    per_flux = []
    for frac in fluxes:
        sub = spec.at_flux(frac)
        gaps = detect_gaps(sub, float(num["min_gap_width"]))
        per_flux.append({
            "b": float(frac), "p": frac.numerator, "q": frac.denominator,
            "points": len(sub), "gap_count": len(gaps.intervals),
            "decay_min": float(sub.decay.min()), "decay_max": float(sub.decay.max()),
        })
    summary = {
        "manifest": manifest.to_dict(),
        "points": len(spec),
        "decay_min": float(spec.decay.min()),
        "decay_max": float(spec.decay.max()),
        "detuning_min": float(spec.detuning.min()),
        "detuning_max": float(spec.detuning.max()),
        "fluxes": per_flux,
    }
    files.append(_write_json(out / "summary.json", summary))
    return files


def run_sweep_phi(manifest: RunManifest) -> list[Path]:
    """Open-chain spectrum versus phase with mode labels and boundary branches."""
    num = manifest.numerics
    out = manifest.output_dir
    cfg = manifest.config
    th = manifest.thresholds()
    phases = phase_grid(int(num["phase_points"]))
    sweep = open_chain_sweep(cfg, phases, manifest.workers)
    bloch = bloch_spectrum(
        cfg.flux, int(num["gap_k_samples"]), int(num["gap_phase_samples"]),
        cfg.spacing, cfg.zeeman_amp, int(num["q_max"]), float(num["eps_light"]),
    )
    gaps = detect_gaps(bloch, float(num["min_gap_width"]))
    labels = label_sweep(sweep, gaps, th)

    files = [write_csv(
        out / "spectrum_phi.csv", ("phase", "detuning", "decay"),
        zip(sweep.phase.tolist(), sweep.detuning.tolist(), sweep.decay.tolist()),
    )]
    label_rows = []
    for i, (res, row) in enumerate(zip(sweep.results, labels)):
        for j, (mode, lab) in enumerate(zip(res.modes, row)):
            label_rows.append((
                phases[i], str(j), mode.detuning, mode.decay, lab.side.value,
                lab.polarization.value, lab.radiance.value, lab.edge_weight,
                lab.left_weight, lab.right_weight, lab.pol_fraction,
                "true" if lab.in_gap else "false",
            ))
    files.append(write_csv(
        out / "labels.csv",
        ("phase", "mode", "detuning", "decay", "side", "polarization", "radiance",
         "edge_weight", "left_weight", "right_weight", "pol_fraction", "in_gap"),
        label_rows,
    ))
    files.append(write_csv(out / "gaps.csv", ("lower", "upper"), gaps.intervals))

    branch_rows = []
    if th.window > 0:
        for br in track_branches(sweep, gaps, th, labels):
            lo, hi = gaps.intervals[br.gap]
            slope = branch_slope(sweep, br) if len(br) >= 3 else None
            dmin, dmax = decay_range_along_branch(sweep, br)
            branch_rows.append((
                str(br.branch_id), br.tag, br.side.value, br.polarization.value, lo, hi,
                str(len(br)), br.phases[0], br.phases[-1], slope, dmin, dmax,
            ))
    files.append(write_csv(
        out / "branches.csv",
        ("branch_id", "tag", "side", "polarization", "gap_lower", "gap_upper", "n_points",
         "phase_start", "phase_end", "slope", "min_decay", "max_decay"),
        branch_rows,
    ))
    if num["jsonl"]:
        files.append(write_spectrum_jsonl(sweep, out / "spectrum_phi.jsonl"))
    files.append(_write_json(out / "run.json", {"manifest": manifest.to_dict()}))
    return files


def run_modes(manifest: RunManifest) -> list[Path]:
    """Intensity profiles of the modes inside a detuning window at one phase."""
    num = manifest.numerics
    out = manifest.output_dir
    cfg = manifest.config
    th = manifest.thresholds()
    lo, hi = float(num["detuning_min"]), float(num["detuning_max"])
    ham = build_finite(cfg)
    result = eigendecompose(ham.matrix)
    chosen = [j for j, m in enumerate(result.modes) if lo <= m.detuning <= hi]
    if not chosen:
        det = result.detunings
        near = np.argsort(np.minimum(np.abs(det - lo), np.abs(det - hi)))[:5]
        listing = ", ".join(f"{det[j]:.4f}" for j in sorted(near))
        raise ConfigError(f"no mode in detuning window [{lo}, {hi}]; nearest: {listing}",
                          key="detuning_min")
    bloch = bloch_spectrum(
        cfg.flux, int(num["gap_k_samples"]), int(num["gap_phase_samples"]),
        cfg.spacing, cfg.zeeman_amp, int(num["q_max"]), float(num["eps_light"]),
    )
    gaps = detect_gaps(bloch, float(num["min_gap_width"]))
    vecs = result.vectors[:, chosen]
    left, right, plus = _weights(vecs, th.window)
    files, rows = [], []
    for col, j in enumerate(chosen):
        mode = result.modes[j]
        lab = _label(mode.detuning, mode.decay, left[col], right[col], plus[col], gaps, th)
        prof = intensity_profile(mode)
        n = np.arange(1, cfg.n_atoms + 1)
        files.append(write_csv(
            out / f"mode_{j:04d}.csv", ("n", "plus", "minus"),
            zip(n.tolist(), prof.plus.tolist(), prof.minus.tolist()),
        ))
        rows.append((
            str(j), mode.detuning, mode.decay, mode.residual, lab.side.value,
            lab.polarization.value, lab.radiance.value, lab.edge_weight, lab.left_weight,
            lab.right_weight, lab.pol_fraction, "true" if lab.in_gap else "false",
        ))
    files.append(write_csv(
        out / "modes.csv",
        ("mode", "detuning", "decay", "residual", "side", "polarization", "radiance",
         "edge_weight", "left_weight", "right_weight", "pol_fraction", "in_gap"),
        rows,
    ))
    if num["dump_matrix"]:
        files.append(write_matrix_csv(ham.matrix, out / "hamiltonian.csv"))
    return files


def write_matrix_csv(matrix: np.ndarray, path) -> Path:
    """Dense matrix as ``row, col, re, im`` records (row-major)."""
    r, c = np.indices(matrix.shape)
    return write_csv(
        path, ("row", "col", "re", "im"),
        ((str(i), str(j), z.real, z.imag)
         for i, j, z in zip(r.ravel().tolist(), c.ravel().tolist(), matrix.ravel().tolist())),
    )


def run_greens_check(manifest: RunManifest) -> list[Path]:
    """Pair couplings on a separation grid and closed-form vs truncated lattice sums."""
    num = manifest.numerics
    out = manifest.output_dir
    spacing = manifest.config.spacing
    d = np.geomspace(float(num["d_min"]), float(num["d_max"]), int(num["d_points"]))
    js, jc = coupling_kernel(d)
    files = [write_csv(
        out / "greens.csv", ("d", "re_same", "im_same", "re_cross", "im_cross"),
        zip(d.tolist(), js.real.tolist(), js.imag.tolist(), jc.real.tolist(), jc.imag.tolist()),
    )]
    kappas = np.linspace(-np.pi, np.pi, int(num["kappa_points"]))
    rows, collisions = [], []
    for kappa in kappas.tolist():
        try:
            closed = bloch_sum(kappa, spacing, Method.CLOSED_FORM, float(num["eps_light"]))
            trunc = bloch_sum(kappa, spacing, Method.TRUNCATED, float(num["eps_light"]),
                              int(num["l_max"]))
        except LightLineSingular:
            collisions.append(kappa)
            log.warning("kappa = %r lies on the light line; skipped", kappa)
            continue
        ds = abs(closed.f_same - trunc.f_same)
        dc = abs(closed.f_cross - trunc.f_cross)
        for res in (closed, trunc):
            rows.append((kappa, res.method.value, res.f_same.real, res.f_same.imag,
                         res.f_cross.real, res.f_cross.imag, res.est_error, ds, dc))
    files.append(write_csv(
        out / "blochsums.csv",
        ("kappa", "method", "re_same", "im_same", "re_cross", "im_cross", "est_error",
         "delta_same", "delta_cross"),
        rows,
    ))
    files.append(_write_json(out / "greens_check.json", {
        "manifest": manifest.to_dict(),
        "light_line_collisions": collisions,
        "max_delta": max((max(r[7], r[8]) for r in rows), default=0.0),
    }))
    return files


COMMANDS = {
    "butterfly": run_butterfly,
    "sweep-phi": run_sweep_phi,
    "modes": run_modes,
    "greens-check": run_greens_check,
}


# --- argument handling ------------------------------------------------------

def _flag(key: str) -> str:
    return "--" + key.replace("_", "-")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="atomchain",
        description="Spectra of a 1D atomic array in a spatially modulated magnetic field.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, fn in COMMANDS.items():
        p = sub.add_parser(name, help=fn.__doc__.splitlines()[0])
        p.add_argument("--config", type=Path, help="key = value parameter file")
        p.add_argument("--output-dir", type=Path, help=f"output directory (env {OUTPUT_ENV})")
        p.add_argument("-v", "--verbose", action="store_true")
        for key in CONFIG_KEYS + tuple(DEFAULT_NUMERICS):
            if key in ("jsonl", "dump_matrix"):
                p.add_argument(_flag(key), action="store_const", const=True, default=None)
            else:
                # values go through the config-file parser, so "sqrt(5)/10" works
                p.add_argument(_flag(key), type=str, default=None, metavar="VALUE")
    return parser


def resolve_manifest(args: argparse.Namespace) -> RunManifest:
    values = dict(DEFAULT_CHAIN)
    values.update(DEFAULT_NUMERICS)
    output_dir = None
    if args.config is not None:
        cfg, extras = load_config(args.config, defaults=DEFAULT_CHAIN)
        values.update({k: getattr(cfg, k) for k in CONFIG_KEYS})
        output_dir = extras.pop("output_dir", None)
        unknown = sorted(set(extras) - set(DEFAULT_NUMERICS))
        if unknown:
            raise ConfigError("unknown key", key=unknown[0])
        values.update(extras)
    for key in CONFIG_KEYS + tuple(DEFAULT_NUMERICS):
        raw = getattr(args, key, None)
        if raw is None:
            continue
        value = raw if isinstance(raw, bool) else parse_value(raw)
        if isinstance(value, str):
            raise ConfigError(f"not a number: {raw!r}", key=key)
        values[key] = value
    if os.environ.get(OUTPUT_ENV):
        output_dir = os.environ[OUTPUT_ENV]
    if args.output_dir is not None:
        output_dir = args.output_dir
    config = ChainConfig(**{k: values.pop(k) for k in CONFIG_KEYS})
    return RunManifest(args.command, config, values, Path(output_dir or "atomchain_out"))


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        manifest = resolve_manifest(args)
    except (ConfigError, OSError) as exc:
        code = EXIT_IO if isinstance(exc, OSError) else EXIT_CONFIG
        print(f"atomchain: {exc}", file=sys.stderr)
        return code
    try:
        manifest.output_dir.mkdir(parents=True, exist_ok=True)
        files = COMMANDS[args.command](manifest)
    except ConfigError as exc:
        print(f"atomchain: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (EigenError, SweepError, LightLineSingular, BranchError) as exc:
        print(f"atomchain: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except OSError as exc:
        print(f"atomchain: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    for path in files:
        log.info("wrote %s", path)
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
