"""Batch jobs: INI job files validated by pydantic, run by kind, outputs written only after success.

Job file layout::

    [job]
    kind = interp            ; interp | decim | src | comm | dpcm | fir_approx | analyze | simulate
    label = audio_x2
    output_dir = output/interp
    simulate = false

    [interp]
    F_num = 1
    F_den = 4.9262612, 7.7206063, 1
    factor = 2
    ...

Keys ending in `_num` / `_den` form one transfer function (descending powers);
other values are coerced by the section's pydantic model.
"""

import configparser
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Literal, Optional, Union

import numpy as np
import pandas as pd
import pydantic
import structlog
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from .analysis.norms import h2_norm, hinf_norm
from .analysis.response import freq_response, write_frequency_response_csv
from .analysis.timedomain import simulate
from .config import get_settings
from .designers.approx import approximation_error, design_fir_approximation
from .designers.comm import comm_alternation_full, comm_tradeoff
from .designers.dpcm import dpcm_comparison, design_dpcm_full, reference_signals, simulate_dpcm
from .designers.multirate import (
    design_decimator_full,
    design_interpolator_full,
    design_src_full,
    src_overshoot_comparison,
)
from .designers.specs import CommSpec, DecimSpec, DpcmSpec, FirApproxSpec, InterpSpec, TfSpec
from .errors import LiftSynthError, ValidationError
from .models import DesignReport, FirFilter, InnerSolver, JobKind, StateSpaceModel
from .quantization.quantizer import QuantizerConfig
from .quantization.signals_io import read_signal
from .synthesis.fir import SynthesisOptions
from .synthesis.plant import affine_closed_loop
from .synthesis.taps import format_taps
from .systems.sslib import tf_to_ss

logger = structlog.get_logger()

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVALID = 2
EXIT_NOT_CONVERGED = 3

_STRICT = ConfigDict(extra="forbid", frozen=True)


def _split_floats(value):
    if isinstance(value, str):
        return [float(item) for item in value.replace(";", ",").split(",") if item.strip()]
    return value


class JobSection(BaseModel):
    model_config = _STRICT

    kind: JobKind
    label: Optional[str] = None
    output_dir: Optional[str] = None
    simulate: bool = False
    frequency_points: int = Field(default=512, ge=2)


class SolverSection(BaseModel):
    model_config = _STRICT

    gap_rel: Optional[float] = Field(default=None, gt=0)
    tol_rel: Optional[float] = Field(default=None, gt=0)
    max_outer: Optional[int] = Field(default=None, ge=1)
    max_inner: Optional[int] = Field(default=None, ge=1)
    grid_points: Optional[int] = Field(default=None, ge=16)
    polyak_max_iter: Optional[int] = Field(default=None, ge=1)
    inner_solver: InnerSolver = InnerSolver.CUTTING_PLANE

    def to_options(self) -> SynthesisOptions:
        overrides = {k: v for k, v in self.model_dump().items() if v is not None}
        return SynthesisOptions(**overrides)


class InterpSection(InterpSpec):
    model_config = _STRICT


class DecimSection(DecimSpec):
    model_config = _STRICT


class SrcSection(BaseModel):
    model_config = _STRICT

    half_period: int = Field(default=20, ge=1)
    periods: int = Field(default=4, ge=1)


class CommSection(CommSpec):
    model_config = _STRICT

    tradeoff_gains: list[float] = Field(default_factory=list)

    @field_validator("tradeoff_gains", mode="before")
    @classmethod
    def _gains(cls, value):
        return _split_floats(value)


class DpcmSection(DpcmSpec):
    model_config = _STRICT

    delta: float = Field(default=0.125, gt=0)
    leak: float = Field(default=0.95, ge=0, lt=1)
    compare: bool = True


class FirApproxSection(FirApproxSpec):
    model_config = _STRICT


class AnalyzeSection(BaseModel):
    model_config = _STRICT

    system: TfSpec
    dt: float = Field(default=1.0, gt=0)
    norm: Literal["hinf", "h2", "both"] = "both"


class SimulateSection(BaseModel):
    model_config = _STRICT

    system: TfSpec
    dt: float = Field(default=1.0, gt=0)
    input: str


_REQUIRED = {
    JobKind.INTERP: ("interp",),
    JobKind.DECIM: ("decim",),
    JobKind.SRC: ("interp", "decim"),
    JobKind.COMM: ("comm",),
    JobKind.DPCM: ("dpcm",),
    JobKind.FIR_APPROX: ("fir_approx",),
    JobKind.ANALYZE: ("analyze",),
    JobKind.SIMULATE: ("simulate",),
}


class JobConfig(BaseModel):
    """A whole job file."""
    model_config = _STRICT

    job: JobSection
    solver: SolverSection = Field(default_factory=SolverSection)
    interp: Optional[InterpSection] = None
    decim: Optional[DecimSection] = None
    src: SrcSection = Field(default_factory=SrcSection)
    comm: Optional[CommSection] = None
    dpcm: Optional[DpcmSection] = None
    fir_approx: Optional[FirApproxSection] = None
    analyze: Optional[AnalyzeSection] = None
    simulate: Optional[SimulateSection] = None

    @model_validator(mode="after")
    def _sections_for_kind(self) -> "JobConfig":
        missing = [name for name in _REQUIRED[self.job.kind] if getattr(self, name) is None]
        if missing:
            raise ValueError(f"job kind {self.job.kind.value} needs section(s) {', '.join(missing)}")
        return self

    @property
    def label(self) -> str:
        return self.job.label or self.job.kind.value


def _section_payload(section: configparser.SectionProxy) -> dict:
    payload: dict = {}
    for key, raw in section.items():
        value = raw.strip()
        if key.endswith("_num") or key.endswith("_den"):
            name, part = key.rsplit("_", 1)
            payload.setdefault(name, {})[part] = _split_floats(value)
        else:
            payload[key] = value
    return payload


def _format_pydantic(exc: pydantic.ValidationError) -> str:
    parts = []
    for error in exc.errors():
        where = ".".join(str(item) for item in error["loc"]) or "config"
        parts.append(f"{where}: {error['msg']}")
    return "; ".join(parts)


def load_job_config(path: Union[str, Path]) -> JobConfig:
    path = Path(path)
    parser = configparser.ConfigParser(inline_comment_prefixes=(";", "#"), interpolation=None)
    parser.optionxform = str  # keep F_num / P_num case
    try:
        with path.open(encoding="utf-8") as handle:
            parser.read_file(handle)
    except OSError as exc:
        raise ValidationError(f"cannot read job file {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ValidationError(f"malformed job file {path}: {exc}") from exc
    try:
        payload = {name: _section_payload(parser[name]) for name in parser.sections()}
        return JobConfig.model_validate(payload)
    except ValueError as exc:
        # pydantic.ValidationError is a ValueError; so are float() failures in coefficient lists
        message = _format_pydantic(exc) if isinstance(exc, pydantic.ValidationError) else str(exc)
        raise ValidationError(f"invalid job file {path}: {message}") from exc


@dataclass
class JobOutputs:
    """Files produced by a job, held in memory until the job finishes."""
    texts: dict[str, str] = field(default_factory=dict)
    writers: dict[str, Callable[[Path], Path]] = field(default_factory=dict)
    report_lines: list[str] = field(default_factory=list)
    reports: list[DesignReport] = field(default_factory=list)
    failed: Optional[str] = None

    def taps(self, name: str, fir: FirFilter, label: str) -> None:
        self.texts[f"taps_{name}.txt"] = format_taps(fir, label)

    def frequency_response(self, name: str, sys: StateSpaceModel, points: int, period: float) -> None:
        response = freq_response(sys, np.linspace(0.0, np.pi, points))
        self.writers[f"freqresp_{name}.csv"] = lambda path: write_frequency_response_csv(response, path, period)

    def frame(self, filename: str, frame: pd.DataFrame) -> None:
        self.writers[filename] = lambda path: (
            frame.to_csv(path, index=False, lineterminator="\n", float_format="%.10g") or path
        )

    def design(self, title: str, report: DesignReport) -> None:
        self.reports.append(report)
        self.report_lines.extend(report.summary_lines(title) + [""])

    def section(self, title: str, values: dict) -> None:
        self.report_lines.append(f"[{title}]")
        for key, value in values.items():
            if isinstance(value, bool):
                text = str(value).lower()
            elif isinstance(value, float):
                text = f"{value:.10g}"
            else:
                text = str(value)
            self.report_lines.append(f"{key} = {text}")
        self.report_lines.append("")

    @property
    def converged(self) -> bool:
        return all(report.converged for report in self.reports)

    def write(self, directory: Path, header: list[str]) -> None:
        directory.mkdir(parents=True, exist_ok=True)
        for name, text in sorted(self.texts.items()):
            (directory / name).write_text(text, encoding="utf-8", newline="\n")
        for name, writer in sorted(self.writers.items()):
            writer(directory / name)
        report = "\n".join(header + [""] + self.report_lines).rstrip("\n") + "\n"
        (directory / "report.txt").write_text(report, encoding="utf-8", newline="\n")
        logger.info("Outputs written", directory=str(directory),
                    files=len(self.texts) + len(self.writers) + 1)


def _run_interp(config: JobConfig, out: JobOutputs, options: SynthesisOptions) -> None:
    spec = config.interp
    design = design_interpolator_full(spec, options)
    out.taps("interp", design.filter, f"{config.label} fast")
    out.taps("interp_lifted", design.lifted, f"{config.label} lifted")
    points = config.job.frequency_points
    out.frequency_response("interp", design.filter.to_state_space(), points, design.filter.dt)
    out.frequency_response("interp_error", affine_closed_loop(design.plant, design.lifted), points, spec.h)
    out.design("interp", design.report)


def _run_decim(config: JobConfig, out: JobOutputs, options: SynthesisOptions) -> None:
    spec = config.decim
    design = design_decimator_full(spec, options)
    out.taps("decim", design.filter, f"{config.label} fast")
    out.taps("decim_lifted", design.lifted, f"{config.label} lifted")
    points = config.job.frequency_points
    out.frequency_response("decim", design.filter.to_state_space(), points, design.filter.dt)
    out.frequency_response("decim_error", affine_closed_loop(design.plant, design.lifted), points, spec.h)
    out.design("decim", design.report)


def _run_src(config: JobConfig, out: JobOutputs, options: SynthesisOptions) -> None:
    design = design_src_full(config.interp, config.decim, options)
    out.taps("src", design.composite, f"{config.label} composite")
    out.taps("interp", design.interpolator.filter, f"{config.label} interpolator")
    out.taps("decim", design.decimator.filter, f"{config.label} decimator")
    out.frequency_response("src", design.composite.to_state_space(), config.job.frequency_points,
                           design.composite.dt)
    out.design("interp", design.interpolator.report)
    out.design("decim", design.decimator.report)
    comparison = src_overshoot_comparison(design, config.interp, config.decim,
                                          config.src.half_period, config.src.periods)
    out.section("src", {"composite_taps": design.composite.order + 1, **comparison.extras})
    if config.job.simulate:
        k = np.arange(comparison.designed.output.length)
        out.frame("sim_src.csv", pd.DataFrame({
            "k": k,
            "designed": comparison.designed.output.scalar(),
            "baseline": comparison.baseline.output.scalar(),
        }))


def _run_comm(config: JobConfig, out: JobOutputs, options: SynthesisOptions) -> None:
    spec = config.comm
    design = comm_alternation_full(spec, options)
    out.taps("transmitter", design.transmitter, f"{config.label} transmitter")
    out.taps("receiver", design.receiver, f"{config.label} receiver")
    out.frequency_response("receiver", design.receiver.to_state_space(), config.job.frequency_points, spec.h)
    summary = {
        "steps": len(design.j_history),
        "rejected_steps": design.rejected_steps,
        "scale": spec.scale,
    }
    summary.update({f"j_{i + 1}": value for i, value in enumerate(design.j_history)})
    if design.rejected_steps:
        summary.update({f"j_raw_{i + 1}": value for i, value in enumerate(design.j_raw)})
    out.section("comm", summary)
    for title, report in design.reports:
        out.design(title, report)
    if spec.tradeoff_gains:
        out.frame("tradeoff_comm.csv", comm_tradeoff(spec, spec.tradeoff_gains, options))
    if not design.completed:
        out.failed = design.error


def _run_dpcm(config: JobConfig, out: JobOutputs, options: SynthesisOptions) -> None:
    spec = config.dpcm
    design = design_dpcm_full(spec, options)
    out.taps("predictor", design.predictor, f"{config.label} predictor")
    out.taps("decoder", design.k2, f"{config.label} decoder")
    out.design("predictor", design.reports[0])
    out.design("decoder", design.reports[1])
    if spec.compare:
        comparison = dpcm_comparison(design, spec, spec.delta, spec.leak)
        out.section("dpcm", {
            "delta": spec.delta,
            "designed_pow": comparison.designed_pow,
            "delta_mod_pow": comparison.delta_mod_pow,
            "window": comparison.window,
            **comparison.extras,
        })
    if config.job.simulate:
        reference, noise = reference_signals(2 * get_settings().power_window, spec.h)
        trace = simulate_dpcm(design.k1, design.k2, QuantizerConfig(spec.delta), reference, noise)
        out.frame("sim_dpcm.csv", pd.DataFrame({
            "k": np.arange(reference.length),
            "r": reference.scalar(),
            "r_hat": trace.reconstruction.scalar(),
            "e": trace.errors.scalar(),
            "e_hat": trace.codes.scalar(),
        }))


def _run_fir_approx(config: JobConfig, out: JobOutputs, options: SynthesisOptions) -> None:
    spec = config.fir_approx
    result = design_fir_approximation(spec, options)
    out.taps("fir_approx", result.filter, config.label)
    out.frequency_response("fir_approx_error", approximation_error(spec, result.filter),
                           config.job.frequency_points, spec.dt)
    out.design("fir_approx", result.report)


def _run_analyze(config: JobConfig, out: JobOutputs, options: SynthesisOptions) -> None:
    section = config.analyze
    sys = tf_to_ss(section.system.discrete(section.dt))
    values: dict = {}
    if section.norm in ("hinf", "both"):
        result = hinf_norm(sys)
        values.update(hinf=result.gamma, peak_omega=result.peak_omega / section.dt,
                      certified=bool(result.certificate and result.certificate.feasible))
    if section.norm in ("h2", "both"):
        values["h2"] = h2_norm(sys)
    out.section("analyze", values)
    out.frequency_response("analyze", sys, config.job.frequency_points, section.dt)


def _run_simulate(config: JobConfig, out: JobOutputs, options: SynthesisOptions, base: Path) -> None:
    section = config.simulate
    sys = tf_to_ss(section.system.discrete(section.dt))
    path = Path(section.input)
    u = read_signal(path if path.is_absolute() else base / path, section.dt)
    y = simulate(sys, u)
    out.frame("sim_simulate.csv", pd.DataFrame({"k": np.arange(u.length), "u": u.scalar(), "y": y.scalar()}))
    out.section("simulate", {"samples": u.length})


_RUNNERS = {
    JobKind.INTERP: _run_interp,
    JobKind.DECIM: _run_decim,
    JobKind.SRC: _run_src,
    JobKind.COMM: _run_comm,
    JobKind.DPCM: _run_dpcm,
    JobKind.FIR_APPROX: _run_fir_approx,
    JobKind.ANALYZE: _run_analyze,
}


def run(config_path: Union[str, Path], output_dir: Optional[Union[str, Path]] = None) -> int:
    """Run one job file and return the process exit code."""
    config_path = Path(config_path)
    try:
        config = load_job_config(config_path)
        options = config.solver.to_options()
    except (ValidationError, pydantic.ValidationError) as exc:
        logger.error("Invalid job file", path=str(config_path), error=str(exc))
        return EXIT_INVALID

    directory = Path(output_dir or config.job.output_dir or get_settings().output_dir)
    out = JobOutputs()
    logger.info("Running job", kind=config.job.kind.value, label=config.label)
    try:
        if config.job.kind is JobKind.SIMULATE:
            _run_simulate(config, out, options, config_path.parent)
        else:
            _RUNNERS[config.job.kind](config, out, options)
    except (ValidationError, pydantic.ValidationError) as exc:
        logger.error("Job rejected", kind=config.job.kind.value, error=str(exc))
        return EXIT_INVALID
    except (LiftSynthError, np.linalg.LinAlgError) as exc:
        logger.error("Job failed", kind=config.job.kind.value, error=str(exc),
                     error_type=type(exc).__name__)
        return EXIT_FAILURE

    header = ["# liftsynth report", f"job = {config.label}", f"kind = {config.job.kind.value}",
              f"converged = {str(out.converged).lower()}"]
    out.write(directory, header)
    if out.failed:
        logger.error("Job stopped early", error=out.failed)
        return EXIT_FAILURE
    if not out.converged:
        logger.warning("Solver did not converge; best iterate written", directory=str(directory))
        return EXIT_NOT_CONVERGED
    return EXIT_OK
