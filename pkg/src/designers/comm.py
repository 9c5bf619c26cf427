"""Transmitter/receiver filter design for a discrete channel, by alternating one-block syntheses.

Signal path: w → F → sample at h/M (S) → K̃_T → C(z) → (+ W_n n) → K̃_R → hold at h/M (H) → P,
compared with z^{-m}F w.  Receiver step (K_T fixed, W_z = 0):

    G11 = [z^{-m}F_N, 0]   G12 = −P_N H   G21 = [C K̃_T S F_N, W_n/s]

Transmitter step (K_R fixed, W_n = 0):

    G11 = [z^{-m}F_N; 0]   G12 = [−P_N H K̃_R C; s W_z]   G21 = S F_N

s = sqrt(N/h) puts the discrete channels n and v on the lifted ℓ² scale.
"""

from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np
import pandas as pd
import structlog

from ..analysis.norms import hinf_norm
from ..errors import LiftSynthError
from ..models import DesignReport, FirFilter, StateSpaceModel
from ..synthesis.fir import SynthesisOptions, fir_hinf_synthesis
from ..synthesis.plant import GeneralizedPlant, affine_closed_loop
from ..systems.lifting import selection_matrices
from ..systems.sslib import (
    augment_delay,
    connect_series,
    postmultiply,
    premultiply,
    stack_inputs,
    stack_outputs,
    tf_to_ss,
)
from .multirate import lifted_tf
from .specs import CommSpec

logger = structlog.get_logger()

OBJECTIVE_TOL_REL = 1e-6


@dataclass
class CommDesign:
    transmitter: FirFilter
    receiver: FirFilter
    j_history: list[float] = field(default_factory=list)  # accepted J after each step
    j_raw: list[float] = field(default_factory=list)      # J of each step's candidate
    reports: list[tuple[str, DesignReport]] = field(default_factory=list)
    rejected_steps: int = 0
    error: Optional[str] = None

    @property
    def completed(self) -> bool:
        return self.error is None


class _Blocks:
    """Lifted and discrete pieces shared by both plants."""

    def __init__(self, spec: CommSpec, penalty_gain: Optional[float] = None):
        N, M, h = spec.fast_factor, spec.compression, spec.h
        self.spec = spec
        self.scale = spec.scale
        self.F_N = lifted_tf(spec.F.continuous(), h, N)
        self.P_N = lifted_tf(spec.P.continuous(), h, N)
        self.S = selection_matrices(M, 1, N)[0]
        self.H = selection_matrices(1, M, N)[1]
        self.reference = augment_delay(self.F_N, spec.delay, side="output")
        self.sampled = premultiply(self.S, self.F_N)
        self.hold = postmultiply(self.P_N, -self.H)
        self.channel = tf_to_ss(spec.channel.discrete(h))
        self.noise = postmultiply(tf_to_ss(spec.noise_weight.discrete(h)), [[1.0 / self.scale]])
        self.penalty = premultiply([[self.scale]], tf_to_ss(spec.penalty_tf(penalty_gain)))

    def filter_ss(self, fir: FirFilter) -> StateSpaceModel:
        return fir.to_state_space().with_matrices(dt=self.spec.h)


def initial_transmitter(spec: CommSpec) -> FirFilter:
    """K̃_T = [1, 0, …, 0]: pass the first sample of every block."""
    taps = np.zeros((spec.transmitter_order + 1, 1, spec.compression))
    taps[0, 0, 0] = 1.0
    return FirFilter(taps, spec.h)


def _receiver_plant(blocks: _Blocks, k_t: FirFilter) -> GeneralizedPlant:
    N, h = blocks.spec.fast_factor, blocks.spec.h
    sent = connect_series(connect_series(blocks.sampled, blocks.filter_ss(k_t)), blocks.channel)
    return GeneralizedPlant(
        g11=stack_inputs(blocks.reference, StateSpaceModel.zero(N, 1, h)),
        g12=blocks.hold,
        g21=stack_inputs(sent, blocks.noise),
        name="receiver",
    )


def _transmitter_plant(blocks: _Blocks, k_r: FirFilter) -> GeneralizedPlant:
    N, h = blocks.spec.fast_factor, blocks.spec.h
    received = connect_series(connect_series(blocks.channel, blocks.filter_ss(k_r)), blocks.hold)
    return GeneralizedPlant(
        g11=stack_outputs(blocks.reference, StateSpaceModel.zero(1, N, h)),
        g12=stack_outputs(received, blocks.penalty),
        g21=blocks.sampled,
        name="transmitter",
    )


def build_comm_plants(spec: CommSpec, k_t: FirFilter,
                      k_r: FirFilter) -> tuple[GeneralizedPlant, GeneralizedPlant]:
    """(G_R with K_T fixed, G_T with K_R fixed)."""
    blocks = _Blocks(spec)
    return _receiver_plant(blocks, k_t), _transmitter_plant(blocks, k_r)


def _objective_system(blocks: _Blocks, k_t: FirFilter, k_r: FirFilter) -> StateSpaceModel:
    """Full map [w; n] → [e; v] of the pair."""
    error = affine_closed_loop(_receiver_plant(blocks, k_t), k_r)
    penalty = connect_series(connect_series(blocks.sampled, blocks.filter_ss(k_t)), blocks.penalty)
    penalty = stack_inputs(penalty, StateSpaceModel.zero(1, 1, blocks.spec.h))
    return stack_outputs(error, penalty)


def comm_objective(spec: CommSpec, k_t: FirFilter, k_r: FirFilter) -> float:
    """J = ‖T‖∞² of the full objective."""
    return _objective_value(_Blocks(spec), k_t, k_r)


def _objective_value(blocks: _Blocks, k_t: FirFilter, k_r: FirFilter) -> float:
    return hinf_norm(_objective_system(blocks, k_t, k_r), tol_rel=OBJECTIVE_TOL_REL).gamma ** 2


def comm_alternation_full(spec: CommSpec, options: Optional[SynthesisOptions] = None,
                          iterations: Optional[int] = None,
                          k_t: Optional[FirFilter] = None) -> CommDesign:
    """Alternate receiver and transmitter designs; a step that raises J is rejected."""
    options = options or SynthesisOptions()
    iterations = spec.iterations if iterations is None else iterations
    blocks = _Blocks(spec)
    k_t = k_t or initial_transmitter(spec)
    k_r: Optional[FirFilter] = None
    design = CommDesign(k_t, FirFilter.zeros(spec.receiver_order, spec.compression, 1, spec.h))
    j_current = np.inf
    logger.info("Starting transmitter/receiver alternation", iterations=iterations,
                compression=spec.compression, penalty_gain=spec.penalty_gain)

    for round_index in range(1, iterations + 1):
        for step in ("receiver", "transmitter"):
            try:
                if step == "receiver":
                    plant = _receiver_plant(blocks, k_t)
                    candidate, report = fir_hinf_synthesis(
                        plant, spec.receiver_order, replace(options, initial=k_r))
                    j_new = _objective_value(blocks, k_t, candidate)
                else:
                    plant = _transmitter_plant(blocks, k_r)
                    candidate, report = fir_hinf_synthesis(
                        plant, spec.transmitter_order, replace(options, initial=k_t))
                    j_new = _objective_value(blocks, candidate, k_r)
            except LiftSynthError as exc:
                logger.error("Alternation step failed", round=round_index, step=step, error=str(exc))
                design.error = f"round {round_index} {step} step: {exc}"
                return design

            design.reports.append((f"{step}_{round_index}", report))
            design.j_raw.append(j_new)
            if j_new <= j_current:
                j_current = j_new
                if step == "receiver":
                    k_r = design.receiver = candidate
                else:
                    k_t = design.transmitter = candidate
            else:
                design.rejected_steps += 1
                logger.warning("Alternation step rejected", round=round_index, step=step,
                               j_previous=j_current, j_candidate=j_new)
            design.j_history.append(j_current)
            logger.debug("Alternation step", round=round_index, step=step, J=j_current)

    logger.info("Alternation finished", J=j_current, rejected=design.rejected_steps)
    return design


def comm_alternation(spec: CommSpec, options: Optional[SynthesisOptions] = None
                     ) -> tuple[FirFilter, FirFilter, list[float]]:
    design = comm_alternation_full(spec, options)
    return design.transmitter, design.receiver, design.j_history


def channel_norms(spec: CommSpec, k_t: FirFilter, k_r: FirFilter) -> tuple[float, float]:
    """(‖T_ew‖∞, ‖T_vw‖∞): reconstruction error and unit-gain penalty output, both from w."""
    blocks = _Blocks(spec)
    N = spec.fast_factor
    error = affine_closed_loop(_receiver_plant(blocks, k_t), k_r)
    error = postmultiply(error, np.vstack([np.eye(N), np.zeros((1, N))]))
    shape = tf_to_ss(spec.penalty_tf(1.0))
    penalty = connect_series(connect_series(blocks.sampled, blocks.filter_ss(k_t)), shape)
    return hinf_norm(error).gamma, hinf_norm(penalty).gamma


def comm_tradeoff(spec: CommSpec, r_values: Sequence[float],
                  options: Optional[SynthesisOptions] = None) -> pd.DataFrame:
    """Alternation at every penalty gain r; one row (r, J, T_ew, T_vw) per gain."""
    rows = []
    for r in r_values:
        design = comm_alternation_full(spec.with_changes(penalty_gain=float(r)), options)
        t_ew, t_vw = channel_norms(spec, design.transmitter, design.receiver)
        rows.append({"r": float(r), "J": design.j_history[-1] if design.j_history else np.nan,
                     "T_ew": t_ew, "T_vw": t_vw})
        logger.info("Trade-off point", r=r, T_ew=t_ew, T_vw=t_vw)
    return pd.DataFrame(rows, columns=["r", "J", "T_ew", "T_vw"])
