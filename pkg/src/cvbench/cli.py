"""Command-line entry point: ``cvbench <subcommand> [options]``.

Exit codes: 0 success, 1 unexpected error, 2 bad input (spec/config/flags),
3 infeasible match target, 4 truncation-guard failure, 5 Wigner window
clipping detected, 6 a consistency check failed. Failures print one JSON
object on stderr.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from pathlib import Path

from . import __version__, bench, export, fock, response
from .bench import RunConfig
from .matching import MATCH_HEADER, solve
from .statespec import SpecError, build_escalating, parse_spec
from .wigner import WindowWarning, integrated_negativity, wigner_at_origin, wigner_field

EXIT_OK, EXIT_ERROR, EXIT_INPUT, EXIT_INFEASIBLE, EXIT_TRUNCATION, EXIT_WINDOW, EXIT_CHECK = range(7)

_D = RunConfig()


class CliError(Exception):
    def __init__(self, message, code=EXIT_INPUT):
        super().__init__(message)
        self.code = code


def _floats(text):
    try:
        return tuple(float(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _names(text):
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("run configuration (flags override --config)")
    g.add_argument("--config", type=Path, help="JSON file mirroring RunConfig, or a previous run.json")
    g.add_argument("--cutoff", type=int, help=f"Fock cutoff (default: {_D.cutoff})")
    g.add_argument("--grid-points", type=int, help=f"odd samples per quadrature (default: {_D.grid_points})")
    g.add_argument("--window", type=float, help=f"phase-space half-width, x,p in [-w,w] (default: {_D.window:g})")
    g.add_argument("--threshold", type=float, help=f"fidelity threshold F_th (default: {_D.threshold:g})")
    g.add_argument("--targets", type=_floats, help="comma-separated mean photon targets "
                   f"(default: {','.join(f'{t:g}' for t in _D.targets)})")
    g.add_argument("--families", type=_names, help=f"comma-separated families (default: {','.join(_D.families)})")
    g.add_argument("--angles", type=int, help=f"directions in polar contours (default: {_D.angles})")
    g.add_argument("--eps-max", type=float, help=f"largest displacement amplitude scanned (default: {_D.eps_max:g})")
    g.add_argument("--eps-steps", type=int, help=f"samples per displacement scan (default: {_D.eps_steps})")
    g.add_argument("--out", help=f"output directory (default: {_D.out})")
    g.add_argument("--format", choices=("csv", "json"), help=f"table format (default: {_D.format})")
    return p


_FLAG_FIELDS = ("cutoff", "grid_points", "window", "threshold", "targets", "families", "angles",
                "eps_max", "eps_steps", "out", "format")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="cvbench", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"cvbench {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("state", parents=[common], help="build a state and print its summary")
    p.add_argument("spec", help='state spec, e.g. "squeezed_fock{r_db=6.0,n=1,cutoff=80}"')
    p.add_argument("--amplitudes", action="store_true", help="include Fock amplitudes")
    p.add_argument("--escalate", action="store_true", help="raise the cutoff in steps of 40 until the tail guard passes")

    p = sub.add_parser("metrics", parents=[common], help="Wigner and displacement metrics for one state")
    p.add_argument("spec")
    p.add_argument("--wigner", action="store_true", help="also write wigner.csv and wigner.json to --out")
    p.add_argument("--escalate", action="store_true", help="raise the cutoff in steps of 40 until the tail guard passes")

    p = sub.add_parser("match", parents=[common], help="solve family parameters for target <n>")
    p.add_argument("--family", action="append", help="family to solve (repeatable; default: --families)")
    p.add_argument("--target-n", type=float, action="append", help="target <n> (repeatable; default: --targets)")

    sub.add_parser("landscape", parents=[common], help="six-panel state snapshot with Wigner exports")
    sub.add_parser("sweep-scalar", parents=[common], help="negativity versus matched <n>")
    sub.add_parser("sweep-radii", parents=[common], help="threshold radii and anisotropy versus matched <n>")
    p = sub.add_parser("polar", parents=[common], help="polar radius contours and angular sectors")
    p.add_argument("--target-n", type=float, help="matched <n> for the contours (default: 3)")
    p.add_argument("--eta", type=float, help="tolerance-sector factor (default: 0.9)")
    sub.add_parser("verify", parents=[common], help="internal consistency checks")
    sub.add_parser("converge", parents=[common], help="cutoff / grid / window convergence probes")
    return parser


def resolve_config(args) -> RunConfig:
    data = RunConfig().to_dict()
    if args.config is not None:
        try:
            loaded = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise CliError(f"cannot read config {args.config}: {exc}") from None
        loaded = loaded.get("config", loaded)
        data.update(loaded)
    for name in _FLAG_FIELDS:
        value = getattr(args, name, None)
        if value is not None:
            data[name] = value
    if getattr(args, "eta", None) is not None:
        data["eta"] = args.eta
    if getattr(args, "command", None) == "polar" and getattr(args, "target_n", None) is not None:
        data["polar_target"] = args.target_n
    try:
        return RunConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise CliError(f"invalid configuration: {exc}") from None


def _emit(payload):
    sys.stdout.write(export.json_text(payload))


def _state_summary(spec, state, amplitudes=False):
    out = {
        "spec": spec.with_cutoff(state.cutoff).to_text(),
        "cutoff": state.cutoff,
        "norm": state.norm(),
        "tail_mass": state.tail_mass(),
        "mean_photon": fock.mean_photon(state),
        "parity": fock.parity_expectation(state),
    }
    if amplitudes:
        out["amplitudes"] = [[float(c.real), float(c.imag)] for c in state.amplitudes]
    return out


def cmd_state(args, config):
    spec = parse_spec(args.spec)
    state = build_escalating(spec) if args.escalate else spec.build()
    _emit(_state_summary(spec, state, args.amplitudes))
    return EXIT_OK


def cmd_metrics(args, config):
    spec = parse_spec(args.spec)
    if args.cutoff is not None:
        spec = spec.with_cutoff(config.cutoff)
    state = build_escalating(spec) if args.escalate else spec.build()
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WindowWarning)
        fld = wigner_field(state, config.grid)
    delta = integrated_negativity(fld)
    nbar = fock.mean_photon(state)
    r_x, r_p = response.axis_radii(state, config.threshold, config.eps_max, config.eps_steps)
    contour = response.polar_contour(state, config.angles, config.threshold, config.eps_max, config.eps_steps)
    payload = _state_summary(spec, state)
    payload.update(
        w_origin=fld.origin_value,
        w_origin_parity=wigner_at_origin(state),
        normalization=fld.normalization,
        window_limited=fld.window_limited,
        delta=delta,
        delta_per_n=delta / nbar if nbar > 0 else None,
        var_x=fock.quadrature_variance(state, 0.0),
        var_p=fock.quadrature_variance(state, math.pi / 2),
        slope_x=response.small_displacement_slope(state, 0.0),
        slope_p=response.small_displacement_slope(state, math.pi / 2),
        R_x=r_x.radius,
        R_x_lower_bound=r_x.is_lower_bound,
        R_p=r_p.radius,
        R_p_lower_bound=r_p.is_lower_bound,
        anisotropy=contour.anisotropy,
        **config.provenance(),
    )
    if args.wigner:
        out = Path(config.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "wigner.csv").write_text(export.wigner_csv(fld))
        export.write_json(out / "wigner.json", export.wigner_envelope(fld, spec=payload["spec"]))
    _emit(payload)
    if fld.window_limited:
        raise CliError(f"Wigner normalisation {fld.normalization:.5f}: window clips the state", EXIT_WINDOW)
    return EXIT_OK


def cmd_match(args, config):
    families = args.family or list(config.families)
    targets = args.target_n or list(config.targets)
    sols = [solve(f, t, config.cutoff) for t in targets for f in families]
    rows = [s.csv_row() for s in sols]
    if config.format == "json":
        _emit(rows)
    else:
        sys.stdout.write(export.csv_text(MATCH_HEADER, rows))
    bad = [s for s in sols if not s.feasible]
    if bad:
        raise CliError("; ".join(f"{s.family}@{s.target_n:g}: {s.reason}" for s in bad), EXIT_INFEASIBLE)
    return EXIT_OK


def _finish(config, command, files):
    files = list(files)
    files.append(bench.write_manifest(config, command, files))
    _emit({"command": command, "out": str(config.out), "files": sorted(Path(f).name for f in files)})


def cmd_landscape(args, config):
    entries = bench.landscape_snapshot(config=config)
    out = Path(config.out)
    files = [bench.write_table(out, "landscape", bench.LANDSCAPE_HEADER, bench.landscape_rows(entries, config), config.format)]
    for e in entries:
        stem = f"wigner_{e.panel}"
        files.append(out / f"{stem}.csv")
        files[-1].write_text(export.wigner_csv(e.field))
        files.append(export.write_json(out / f"{stem}.json", export.wigner_envelope(e.field, spec=e.spec.to_text(), label=e.label)))
    _finish(config, "landscape", files)
    return EXIT_OK


def cmd_sweep_scalar(args, config):
    records = bench.scalar_sweep(config)
    path = bench.write_table(config.out, "scalar_sweep", bench.RECORD_HEADER, [r.row() for r in records], config.format)
    _finish(config, "sweep-scalar", [path])
    return EXIT_OK


def cmd_sweep_radii(args, config):
    records = bench.radii_sweep(config)
    path = bench.write_table(config.out, "radii_sweep", bench.RECORD_HEADER, [r.row() for r in records], config.format)
    _finish(config, "sweep-radii", [path])
    return EXIT_OK


def cmd_polar(args, config):
    report = bench.polar_report(config)
    files = [
        bench.write_table(config.out, "polar", bench.POLAR_HEADER, bench.polar_rows(report), config.format),
        bench.write_table(config.out, "polar_sectors", bench.SECTOR_HEADER, report.sectors, config.format),
    ]
    _finish(config, "polar", files)
    return EXIT_OK


def cmd_verify(args, config):
    results = bench.consistency_suite(config)
    path = bench.write_table(config.out, "consistency", bench.CHECK_HEADER, bench.check_rows(results), config.format)
    for c in results:
        status = "PASS" if c.passed else "FAIL"
        print(f"{status} {c.name}: measured={c.measured:.3e} bound={c.bound:.3e} margin={c.margin:.3e}  {c.detail}",
              file=sys.stderr)
    _finish(config, "verify", [path])
    failed = [c.name for c in results if not c.passed]
    if failed:
        raise CliError(f"consistency checks failed: {', '.join(failed)}", EXIT_CHECK)
    return EXIT_OK


def cmd_converge(args, config):
    results = bench.convergence_probes(config)
    path = bench.write_table(config.out, "convergence", bench.CONVERGE_HEADER, bench.convergence_rows(results), config.format)
    _finish(config, "converge", [path])
    return EXIT_OK


COMMANDS = {
    "state": cmd_state,
    "metrics": cmd_metrics,
    "match": cmd_match,
    "landscape": cmd_landscape,
    "sweep-scalar": cmd_sweep_scalar,
    "sweep-radii": cmd_sweep_radii,
    "polar": cmd_polar,
    "verify": cmd_verify,
    "converge": cmd_converge,
}


def _fail(exc, code):
    sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}) + "\n")
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        config = resolve_config(args)
        return COMMANDS[args.command](args, config)
    except CliError as exc:
        return _fail(exc, exc.code)
    except SpecError as exc:
        return _fail(exc, EXIT_INPUT)
    except fock.TruncationError as exc:
        return _fail(exc, EXIT_TRUNCATION)
    except (fock.ZeroStateError, ValueError) as exc:
        return _fail(exc, EXIT_INPUT)
    except Exception as exc:  # pragma: no cover
        return _fail(exc, EXIT_ERROR)


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
