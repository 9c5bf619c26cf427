#!/usr/bin/env python3
"""
liftsynth - CLI Entry Point

Sampled-data H-infinity design of multirate, communication and DPCM filters.

Usage:
    python main.py run <job.cfg>                        # Run a job file
    python main.py analyze --tf "1;1,-0.5" --norm hinf   # Norm of a discrete transfer function
    python main.py simulate --tf "num;den" --input u.txt --output y.txt
    python main.py baseline --taps 31 --cutoff 1.5708    # Windowed-sinc comparison filter
"""

import argparse
import logging
import sys
from typing import Optional

import numpy as np
import structlog

from src.analysis.norms import h2_norm, hinf_norm
from src.analysis.response import freq_response, write_frequency_response_csv
from src.analysis.timedomain import simulate
from src.baselines import BASELINE_KINDS, emit_baseline
from src.config import get_settings
from src.errors import LiftSynthError, ValidationError
from src.jobs import EXIT_FAILURE, EXIT_INVALID, EXIT_OK, run
from src.models import TransferFunction, Variable
from src.quantization.signals_io import read_signal, write_signal
from src.synthesis.taps import format_taps, write_taps
from src.systems.sslib import tf_to_ss


def configure_logging(level: Optional[str] = None) -> None:
    """Structured logging to standard error; standard output carries command results only."""
    level = (level or get_settings().log_level).upper()
    logging.basicConfig(format="%(message)s", stream=sys.stderr, level=getattr(logging, level, logging.INFO))
    structlog.configure(
        processors=[
            structlog.stdlib.filter_by_level,
            structlog.stdlib.add_logger_name,
            structlog.stdlib.add_log_level,
            structlog.processors.TimeStamper(fmt="iso"),
            structlog.dev.ConsoleRenderer(colors=False),
        ],
        wrapper_class=structlog.stdlib.BoundLogger,
        context_class=dict,
        logger_factory=structlog.stdlib.LoggerFactory(),
    )


logger = structlog.get_logger()


def parse_tf(text: str, dt: float) -> TransferFunction:
    """'num;den' with comma-separated descending-power coefficients."""
    parts = text.split(";")
    if len(parts) != 2:
        raise ValidationError(f"transfer function must be 'num;den', got {text!r}")
    try:
        num, den = ([float(c) for c in part.split(",") if c.strip()] for part in parts)
    except ValueError as exc:
        raise ValidationError(f"bad coefficient in {text!r}: {exc}") from exc
    return TransferFunction(num, den, Variable.Z, dt)


def cmd_run(args) -> int:
    """Run a job file."""
    return run(args.config, args.output_dir)


def cmd_analyze(args) -> int:
    """Print the H-infinity or H2 norm of a discrete transfer function."""
    sys_ = tf_to_ss(parse_tf(args.tf, args.dt))
    if args.norm == "hinf":
        result = hinf_norm(sys_)
        value = result.gamma
        logger.info("H-infinity norm", gamma=value, peak_omega=result.peak_omega,
                    certified=bool(result.certificate and result.certificate.feasible))
    else:
        value = h2_norm(sys_)
    print(float(f"{value:.4g}"))
    if args.csv:
        response = freq_response(sys_, np.linspace(0.0, np.pi, args.points))
        write_frequency_response_csv(response, args.csv, args.dt)
    return EXIT_OK


def cmd_simulate(args) -> int:
    """Filter a signal file through a discrete transfer function."""
    sys_ = tf_to_ss(parse_tf(args.tf, args.dt))
    y = simulate(sys_, read_signal(args.input, args.dt))
    write_signal(y, args.output)
    return EXIT_OK


def cmd_baseline(args) -> int:
    """Emit a windowed-sinc comparison filter."""
    fir = emit_baseline(args.kind, args.taps, args.cutoff, args.gain, args.dt)
    label = f"{args.kind} cutoff={args.cutoff:.6g}"
    if args.output:
        write_taps(fir, args.output, label)
    else:
        sys.stdout.write(format_taps(fir, label))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="liftsynth CLI",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("--log-level", default=None, help="Override LIFTSYNTH_LOG_LEVEL")

    subparsers = parser.add_subparsers(dest="command", help="Commands")

    # run command
    run_parser = subparsers.add_parser("run", help="Run a job file")
    run_parser.add_argument("config", help="Job file (INI)")
    run_parser.add_argument("--output-dir", "-o", default=None, help="Override the job's output directory")

    # analyze command
    analyze_parser = subparsers.add_parser("analyze", help="Norm of a discrete transfer function")
    analyze_parser.add_argument("--tf", required=True, help="'num;den', descending powers of z")
    analyze_parser.add_argument("--dt", type=float, default=1.0, help="Sampling period (default: 1)")
    analyze_parser.add_argument("--norm", choices=("hinf", "h2"), default="hinf")
    analyze_parser.add_argument("--csv", default=None, help="Also write the frequency response here")
    analyze_parser.add_argument("--points", type=int, default=512, help="Frequency points for --csv")

    # simulate command
    simulate_parser = subparsers.add_parser("simulate", help="Filter a signal file")
    simulate_parser.add_argument("--tf", required=True, help="'num;den', descending powers of z")
    simulate_parser.add_argument("--dt", type=float, default=1.0)
    simulate_parser.add_argument("--input", "-i", required=True, help="One sample per line")
    simulate_parser.add_argument("--output", "-o", required=True)

    # baseline command
    baseline_parser = subparsers.add_parser("baseline", help="Windowed-sinc comparison filter")
    baseline_parser.add_argument("--kind", choices=BASELINE_KINDS, default="windowed_sinc")
    baseline_parser.add_argument("--taps", type=int, required=True)
    baseline_parser.add_argument("--cutoff", type=float, required=True, help="rad/sample, in (0, π]")
    baseline_parser.add_argument("--gain", type=float, default=1.0)
    baseline_parser.add_argument("--dt", type=float, default=1.0)
    baseline_parser.add_argument("--output", "-o", default=None, help="Tap file (default: stdout)")

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)

    if not args.command:
        parser.print_help()
        return EXIT_INVALID

    commands = {
        "run": cmd_run,
        "analyze": cmd_analyze,
        "simulate": cmd_simulate,
        "baseline": cmd_baseline,
    }
    try:
        return commands[args.command](args)
    except ValidationError as exc:
        logger.error("Invalid input", error=str(exc))
        return EXIT_INVALID
    except LiftSynthError as exc:
        logger.error("Command failed", error=str(exc), error_type=type(exc).__name__)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
