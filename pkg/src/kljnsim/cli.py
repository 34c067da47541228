"""Command-line front end.

Every analysis is a subcommand that prints CSV or JSON to stdout, or, with
``--output-dir``, writes the result file plus a ``<command>.manifest.json``
recording the exact invocation. ``kljnsim rerun MANIFEST`` replays it.

Exit codes: 0 success, 2 invalid input, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .cable import CableSpec, derive, preset
from .errors import NumericalError, ValidationError
from .network import (
    Direction,
    End,
    NetworkModel,
    Termination,
    ac_sweep,
    phase_velocity_table,
    TABLE_FREQUENCIES,
    TABLE_RESISTANCES,
)
from .thermal import Method, ThermalConfig, equipartition_deficit, thermal_energies
from .units import parse_quantity
from .wave import forbidden_band_report

EXIT_OK = 0
EXIT_VALIDATION = 2
EXIT_NUMERIC = 3


def quantity(text: str) -> float:
    try:
        return parse_quantity(text)
    except ValidationError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from None


def quantity_list(text: str) -> list[float]:
    return [quantity(part) for part in text.split(",") if part.strip()]


def _fmt(x: float) -> str:
    return repr(float(x))


def _json_text(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n"


def _csv_text(header: list[str], rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_fmt(v) if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def atomic_write(path: Path, data: str | bytes) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data.encode("utf-8") if isinstance(data, str) else data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def load_schema(name: str) -> dict:
    """JSON schema shipped for a command's output (or ``"manifest"``)."""
    from importlib import resources

    text = resources.files("kljnsim").joinpath("schemas", f"{name}.schema.json").read_text("utf-8")
    return json.loads(text)


def _sha256(path: Path) -> str:
    return hashlib.sha256(path.read_bytes()).hexdigest()


class Run:
    """Collects a command's outputs and writes them with a manifest."""

    def __init__(self, args: argparse.Namespace, argv: list[str]):
        self.args = args
        self.argv = argv
        self.command = args.command
        self.out_dir = Path(args.output_dir) if getattr(args, "output_dir", None) else None
        self.files: list[Path] = []
        self.parameters: dict = {}
        self.rng_seed = None

    def side_path(self, name: str) -> Path:
        p = Path(name)
        if self.out_dir is not None and not p.is_absolute():
            p = self.out_dir / p
        return p

    def register(self, path: Path) -> None:
        self.files.append(path)

    def emit(self, text: str, ext: str) -> None:
        if self.out_dir is None:
            sys.stdout.write(text)
            return
        path = self.out_dir / f"{self.command}.{ext}"
        atomic_write(path, text)
        self.files.append(path)

    def finish(self) -> None:
        if self.out_dir is None:
            return
        manifest = {
            "command": self.command,
            "argv": self.argv,
            "parameters": self.parameters,
            "version": __version__,
            "rng_seed": self.rng_seed,
            "outputs": [{"path": str(p), "sha256": _sha256(p)} for p in self.files],
        }
        atomic_write(self.out_dir / f"{self.command}.manifest.json", _json_text(manifest))


# -- cable arguments ---------------------------------------------------------


def add_cable_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("cable")
    g.add_argument("--preset", help="named cable preset (e.g. rg58-1m5)")
    g.add_argument("--cable-json", help="JSON file with l_per_m, c_per_m, r_per_m, length_m")
    g.add_argument("--l-per-m", type=quantity, help="inductance per metre, H/m")
    g.add_argument("--c-per-m", type=quantity, help="capacitance per metre, F/m")
    g.add_argument("--r-per-m", type=quantity, help="series resistance per metre, ohm/m")
    g.add_argument("--length", type=quantity, help="cable length, m")


def resolve_cable(args: argparse.Namespace, parser: argparse.ArgumentParser) -> CableSpec:
    if args.preset and args.cable_json:
        parser.error("--preset and --cable-json are mutually exclusive")
    if args.preset:
        base = preset(args.preset).to_dict()
    elif args.cable_json:
        base = CableSpec.from_json(args.cable_json).to_dict()
    elif args.l_per_m is not None and args.c_per_m is not None and args.length is not None:
        base = {"r_per_m": 0.0}
    else:
        parser.error("a cable is required: --preset, --cable-json, or --l-per-m/--c-per-m/--length")
    for key, attr in (("l_per_m", "l_per_m"), ("c_per_m", "c_per_m"), ("r_per_m", "r_per_m"),
                      ("length_m", "length")):
        value = getattr(args, attr)
        if value is not None:
            base[key] = value
    return CableSpec.from_dict(base)


# -- commands ----------------------------------------------------------------


def cmd_cable_info(args, run: Run, parser) -> None:
    cable = resolve_cable(args, parser)
    out = {"cable": cable.to_dict(), **derive(cable).to_dict()}
    run.parameters = {"cable": cable.to_dict()}
    run.emit(_json_text(out), "json")


def cmd_wave_check(args, run: Run, parser) -> None:
    cable = resolve_cable(args, parser)
    report = forbidden_band_report(cable, args.fc)
    run.parameters = {"cable": cable.to_dict(), "f_c_hz": args.fc}
    run.emit(_json_text(report.to_dict()), "json")


def _termination(args, cable: CableSpec) -> Termination:
    r_w = derive(cable).wave_impedance
    return Termination(
        args.ra if args.ra is not None else r_w,
        args.rb if args.rb is not None else r_w,
        End(args.drive),
        args.amplitude,
    )


def cmd_ac_sweep(args, run: Run, parser) -> None:
    cable = resolve_cable(args, parser)
    model = NetworkModel.parse(args.model)
    term = _termination(args, cable)
    rows = ac_sweep(model, cable, term, args.f_start, args.f_stop, args.points_per_decade)
    run.parameters = {
        "cable": cable.to_dict(),
        "model": str(model),
        "r_alice_ohm": term.resistance_alice,
        "r_bob_ohm": term.resistance_bob,
        "drive_end": term.drive_end.value,
        "amplitude_v": term.drive_amplitude,
        "f_start_hz": args.f_start,
        "f_stop_hz": args.f_stop,
        "points_per_decade": args.points_per_decade,
    }
    header = ["freq_hz", "mag_uab_v", "phase_deg", "phase_unwrapped_deg"]
    if args.format == "json":
        records = [dict(zip(header, (r.freq_hz, r.mag_uab_v, r.phase_deg, r.phase_unwrapped_deg)))
                   for r in rows]
        run.emit(_json_text(records), "json")
    else:
        run.emit(_csv_text(header, [(r.freq_hz, r.mag_uab_v, r.phase_deg, r.phase_unwrapped_deg)
                                    for r in rows]), "csv")


def cmd_phase_velocity_table(args, run: Run, parser) -> None:
    cable = resolve_cable(args, parser)
    cells = phase_velocity_table(cable, args.resistances, args.frequencies)
    run.parameters = {
        "cable": cable.to_dict(),
        "resistances_ohm": list(args.resistances),
        "frequencies_hz": list(args.frequencies),
        "model": "lossless",
    }
    fast = [c for c in cells if c.superluminal]
    if args.format == "json":
        records = [
            {"r_ohm": c.r_ohm, "f_hz": c.f_hz, "v_m_per_s": c.v_m_per_s,
             "superluminal": c.superluminal, "kind": c.kind}
            for c in cells
        ]
        run.emit(_json_text(records), "json")
    else:
        run.emit(_csv_text(["r_ohm", "f_hz", "v_m_per_s"],
                           [(c.r_ohm, c.f_hz, c.v_m_per_s) for c in cells]), "csv")
    if fast:
        rs = sorted({c.r_ohm for c in fast})
        print(
            "note: rows R = " + ", ".join(f"{r:g}" for r in rs) + " ohm exceed the speed of light; "
            "these are steady-state phase velocities of a driven impedance network, not signal "
            "velocities",
            file=sys.stderr,
        )


def cmd_thermal_budget(args, run: Run, parser) -> None:
    cable = resolve_cable(args, parser)
    if (args.ra is None) != (args.rb is None):
        parser.error("--ra and --rb must be given together")
    if args.matched and args.ra is not None:
        parser.error("--matched excludes --ra/--rb")
    term = None if args.ra is None else Termination(args.ra, args.rb)
    config = ThermalConfig(args.T, args.fc, term)
    budget = thermal_energies(cable, config, Method(args.method))
    equipartition_deficit(budget)
    run.parameters = {
        "cable": cable.to_dict(),
        "temperature_k": args.T,
        "f_c_hz": args.fc,
        "termination": "matched" if term is None else {"r_alice_ohm": args.ra, "r_bob_ohm": args.rb},
        "method": args.method,
    }
    run.emit(_json_text(budget.to_dict()), "json")


def _load_kljn_config(args):
    from .kljn import KljnConfig, with_overrides

    if args.config:
        try:
            with open(args.config, encoding="utf-8") as fh:
                data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"config {args.config}: {exc}") from None
        config = KljnConfig.from_dict(data)
    else:
        config = KljnConfig()
    return with_overrides(
        config,
        bit_count=getattr(args, "bits", None),
        rng_seed=getattr(args, "seed", None),
    )


def cmd_kljn_run(args, run: Run, parser) -> None:
    from .kljn import run_exchange, simulate_bit_period
    from .tracefile import write_traces

    config = _load_kljn_config(args)
    report = run_exchange(config)
    run.rng_seed = config.rng_seed
    run.parameters = config.to_dict()
    if args.per_bit_csv:
        path = run.side_path(args.per_bit_csv)
        rows = [
            (ex.index, ex.alice_choice.value, ex.bob_choice.value, int(ex.secure),
             ex.mean_square_voltage, ex.mean_square_current, int(ex.decoded_ok))
            for ex in report.exchanges
        ]
        atomic_write(path, _csv_text(
            ["bit", "alice", "bob", "secure", "msv_v2", "msc_a2", "decoded_ok"], rows))
        run.register(path)
    if args.dump_traces:
        if not 0 <= args.dump_bit < config.bit_count:
            raise ValidationError(f"--dump-bit: must lie in [0, {config.bit_count})")
        ex = report.exchanges[args.dump_bit]
        traces = simulate_bit_period(config, ex.alice_choice, ex.bob_choice, ex.index)
        path = run.side_path(args.dump_traces)
        path.parent.mkdir(parents=True, exist_ok=True)
        write_traces(path, traces)
        run.register(path)
    run.emit(_json_text(report.to_dict()), "json")


def cmd_delay_probe(args, run: Run, parser) -> None:
    from .kljn import delay_probe

    config = _load_kljn_config(args)
    d = derive(config.cable)
    dirs = [Direction.TOWARD_BOB, Direction.TOWARD_ALICE] if args.direction == "both" \
        else [Direction.parse(args.direction)]
    results = []
    from .constants import SPEED_OF_LIGHT

    for direction in dirs:
        m = delay_probe(config, direction, args.probe_freq, args.ra, args.rb, lossless=not args.lossy)
        v = config.cable.length / m.delay
        results.append({
            "direction": direction.value,
            "probe_frequency_hz": m.probe_frequency,
            "r_alice_ohm": m.r_alice,
            "r_bob_ohm": m.r_bob,
            "r_far_ohm": m.r_far,
            "phase_rad": m.phase,
            "tau_s": m.delay,
            "tau_expected_s": d.total_inductance / m.r_far,
            "implied_velocity_m_per_s": v,
            "superluminal": v > SPEED_OF_LIGHT,
            "kind": "steady-state phase velocity",
        })
    run.parameters = {
        "config": config.to_dict(),
        "directions": [x.value for x in dirs],
        "probe_frequency_hz": args.probe_freq if args.probe_freq is not None else config.probe_frequency,
        "r_alice_ohm": args.ra,
        "r_bob_ohm": args.rb,
        "lossless": not args.lossy,
    }
    out = {"measurements": results}
    if len(results) == 2:
        out["tau_ratio_ab_over_ba"] = results[0]["tau_s"] / results[1]["tau_s"]
    run.emit(_json_text(out), "json")


def cmd_rerun(args, run: Run, parser) -> int:
    try:
        manifest = json.loads(Path(args.manifest).read_text(encoding="utf-8"))
        argv = list(manifest["argv"])
    except (OSError, ValueError, KeyError, TypeError) as exc:
        raise ValidationError(f"manifest {args.manifest}: {exc}") from None
    if args.output_dir:
        argv = _replace_output_dir(argv, args.output_dir)
    return main(argv)


def _replace_output_dir(argv: list[str], new: str) -> list[str]:
    out, skip = [], False
    for i, tok in enumerate(argv):
        if skip:
            skip = False
            continue
        if tok == "--output-dir":
            skip = True
            continue
        if tok.startswith("--output-dir="):
            continue
        out.append(tok)
    return out + ["--output-dir", new]


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kljnsim", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def command(name, help_text, func, cable=True):
        p = sub.add_parser(name, help=help_text)
        if cable:
            add_cable_args(p)
        p.add_argument("--output-dir", help="write result and manifest here instead of stdout")
        p.set_defaults(func=func, parser=p)
        return p

    command("cable-info", "derived cable constants (JSON)", cmd_cable_info)

    p = command("wave-check", "forbidden-band report for a noise cutoff (JSON)", cmd_wave_check)
    p.add_argument("--fc", type=quantity, required=True, help="noise cutoff, Hz")

    p = command("ac-sweep", "|U_AB| and phase over a log frequency sweep", cmd_ac_sweep)
    p.add_argument("--model", default="lossless", help="lossless | lossy | pi | ladder:N")
    p.add_argument("--ra", type=quantity, help="Alice's resistor (default R_w)")
    p.add_argument("--rb", type=quantity, help="Bob's resistor (default R_w)")
    p.add_argument("--drive", choices=[e.value for e in End], default="alice")
    p.add_argument("--amplitude", type=quantity, default=1.0, help="generator amplitude, V")
    p.add_argument("--f-start", type=quantity, default=100.0)
    p.add_argument("--f-stop", type=quantity, default=10e6)
    p.add_argument("--points-per-decade", type=int, default=20)
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = command("phase-velocity-table", "equivalent phase velocity grid (lossless model)",
                cmd_phase_velocity_table)
    p.add_argument("--resistances", type=quantity_list, default=list(TABLE_RESISTANCES),
                   help="comma-separated load resistances")
    p.add_argument("--frequencies", type=quantity_list, default=list(TABLE_FREQUENCIES),
                   help="comma-separated frequencies")
    p.add_argument("--format", choices=["csv", "json"], default="csv")

    p = command("thermal-budget", "thermal energies vs the kT/2 quota (JSON)", cmd_thermal_budget)
    p.add_argument("--matched", action="store_true", help="both ends closed by R_w (default)")
    p.add_argument("--ra", type=quantity)
    p.add_argument("--rb", type=quantity)
    p.add_argument("--T", type=quantity, default=300.0, help="temperature, K")
    p.add_argument("--fc", type=quantity, required=True, help="noise cutoff, Hz")
    p.add_argument("--method", choices=[m.value for m in Method], default="closed_form")

    p = command("kljn-run", "time-domain KLJN exchange (JSON report)", cmd_kljn_run, cable=False)
    p.add_argument("--config", help="JSON config (KljnConfig fields; suffixed strings allowed)")
    p.add_argument("--bits", type=int, help="override bit_count")
    p.add_argument("--seed", type=int, help="override rng_seed")
    p.add_argument("--per-bit-csv", help="also write per-bit CSV to this path")
    p.add_argument("--dump-traces", help="also write one bit's raw traces (binary) to this path")
    p.add_argument("--dump-bit", type=int, default=0, help="bit index for --dump-traces")

    p = command("delay-probe", "directional delay from a single-tone probe (JSON)",
                cmd_delay_probe, cable=False)
    p.add_argument("--config", help="JSON config (KljnConfig fields)")
    p.add_argument("--direction", default="both", help="bob | alice | both")
    p.add_argument("--probe-freq", type=quantity, help="probe tone, Hz (default from config)")
    p.add_argument("--ra", type=quantity, help="Alice's resistor (default r_high)")
    p.add_argument("--rb", type=quantity, help="Bob's resistor (default r_low)")
    p.add_argument("--seed", type=int, help="override rng_seed (recorded only; the probe is deterministic)")
    p.add_argument("--lossy", action="store_true", help="keep the cable's series resistance")

    p = sub.add_parser("rerun", help="replay a manifest")
    p.add_argument("manifest")
    p.add_argument("--output-dir", help="write to this directory instead of the recorded one")
    p.set_defaults(func=cmd_rerun, parser=p)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    run = Run(args, argv)
    try:
        result = args.func(args, run, args.parser)
        if isinstance(result, int):
            return result
        run.finish()
    except SystemExit as exc:  # parser.error inside a command
        return int(exc.code or 0)
    except ValidationError as exc:
        print(f"kljnsim {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except NumericalError as exc:
        print(f"kljnsim {args.command}: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"kljnsim {args.command}: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
