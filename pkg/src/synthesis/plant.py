"""One-block generalized plants and their closed loops with FIR filters."""

from dataclasses import dataclass

import numpy as np
import scipy.linalg
import structlog

from ..errors import ValidationError
from ..models import FirFilter, StateSpaceModel
from ..systems.sslib import connect_parallel, connect_series, require_schur

logger = structlog.get_logger()


@dataclass(frozen=True, eq=False)
class GeneralizedPlant:
    """Blocks of T = G11 + G12·K·G21; there is no G22, so T is affine in K."""
    g11: StateSpaceModel
    g12: StateSpaceModel
    g21: StateSpaceModel
    name: str = "plant"

    def __post_init__(self):
        blocks = {"G11": self.g11, "G12": self.g12, "G21": self.g21}
        periods = {b.dt for b in blocks.values()}
        if None in periods or len(periods) != 1:
            raise ValidationError(f"{self.name}: all blocks must be discrete with one common period")
        if self.g12.n_outputs != self.g11.n_outputs:
            raise ValidationError(
                f"{self.name}: G12 has {self.g12.n_outputs} outputs, G11 has {self.g11.n_outputs}"
            )
        if self.g21.n_inputs != self.g11.n_inputs:
            raise ValidationError(
                f"{self.name}: G21 has {self.g21.n_inputs} inputs, G11 has {self.g11.n_inputs}"
            )
        for label, block in blocks.items():
            require_schur(block, f"{self.name} block {label}")

    @property
    def dt(self) -> float:
        return self.g11.dt

    @property
    def n_w(self) -> int:
        return self.g11.n_inputs

    @property
    def n_z(self) -> int:
        return self.g11.n_outputs

    @property
    def n_u(self) -> int:
        """Filter output width."""
        return self.g12.n_inputs

    @property
    def n_y(self) -> int:
        """Filter input width."""
        return self.g21.n_outputs

    def poles(self) -> np.ndarray:
        parts = [scipy.linalg.eigvals(b.A) for b in (self.g11, self.g12, self.g21) if b.n_states]
        return np.concatenate(parts) if parts else np.zeros(0)

    def zero_filter(self, order: int) -> FirFilter:
        return FirFilter.zeros(order, self.n_u, self.n_y, self.dt)


def affine_closed_loop(plant: GeneralizedPlant, K: FirFilter) -> StateSpaceModel:
    """Realization of G11 + G12·K·G21 (no feedback, so stable whenever the blocks are)."""
    if K.n_inputs != plant.n_y or K.n_outputs != plant.n_u:
        raise ValidationError(
            f"filter is {K.n_outputs}x{K.n_inputs}, plant slot expects {plant.n_u}x{plant.n_y}"
        )
    k_ss = K.to_state_space().with_matrices(dt=plant.dt)
    path = connect_series(connect_series(plant.g21, k_ss), plant.g12)
    return connect_parallel(plant.g11, path)


@dataclass(frozen=True, eq=False)
class AffineRealization:
    """Closed loop (A, B, C0 + Σ αᵢCᵢ, D0 + Σ αᵢDᵢ): the taps enter only C and D."""
    A: np.ndarray
    B: np.ndarray
    C0: np.ndarray
    D0: np.ndarray
    C_slots: np.ndarray  # (n_alpha, p, n)
    D_slots: np.ndarray  # (n_alpha, p, m)
    dt: float

    @property
    def n_alpha(self) -> int:
        return self.C_slots.shape[0]

    def C(self, alpha: np.ndarray) -> np.ndarray:
        return self.C0 + np.tensordot(alpha, self.C_slots, axes=1)

    def D(self, alpha: np.ndarray) -> np.ndarray:
        return self.D0 + np.tensordot(alpha, self.D_slots, axes=1)

    def realize(self, alpha: np.ndarray) -> StateSpaceModel:
        alpha = np.asarray(alpha, dtype=float)
        return StateSpaceModel(self.A, self.B, self.C(alpha), self.D(alpha), self.dt)


def affine_realization(plant: GeneralizedPlant, order: int) -> AffineRealization:
    """α-affine realization for plants whose G12 is a static gain.

    States are [x11; x21; past filter inputs y[t-1..t-order]]; the tap
    ordering of α matches FirFilter.as_vector.
    """
    if plant.g12.n_states:
        raise ValidationError("an α-affine realization needs a static G12")
    g11, g21, D12 = plant.g11, plant.g21, plant.g12.D
    n11, n21, ny, nu = g11.n_states, g21.n_states, plant.n_y, plant.n_u
    nr = order * ny
    n = n11 + n21 + nr
    A = np.zeros((n, n))
    A[:n11, :n11] = g11.A
    A[n11:n11 + n21, n11:n11 + n21] = g21.A
    reg = slice(n11 + n21, n)
    if order:
        A[n11 + n21:n11 + n21 + ny, n11:n11 + n21] = g21.C
        if order > 1:
            A[n11 + n21 + ny:, n11 + n21:n - ny] = np.eye(nr - ny)
    B = np.vstack([g11.B, g21.B, np.vstack([g21.D, np.zeros((nr - ny, plant.n_w))]) if order
                   else np.zeros((0, plant.n_w))])
    C0 = np.hstack([g11.C, np.zeros((plant.n_z, n21 + nr))])
    D0 = g11.D.copy()

    n_alpha = (order + 1) * nu * ny
    C_slots = np.zeros((n_alpha, plant.n_z, n))
    D_slots = np.zeros((n_alpha, plant.n_z, plant.n_w))
    index = 0
    for k in range(order + 1):
        for i in range(nu):
            for j in range(ny):
                column = D12[:, i:i + 1]
                if k == 0:
                    C_slots[index, :, n11:n11 + n21] = column @ g21.C[j:j + 1, :]
                    D_slots[index] = column @ g21.D[j:j + 1, :]
                else:
                    position = reg.start + (k - 1) * ny + j
                    C_slots[index, :, position] = column[:, 0]
                index += 1
    return AffineRealization(A, B, C0, D0, C_slots, D_slots, plant.dt)
