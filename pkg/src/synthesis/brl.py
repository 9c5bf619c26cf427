"""Bounded-real-lemma LMI as data, and the certificate check built on the Riccati recursion."""

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import structlog

from ..analysis.riccati import BrlCertificate, bounded_real_matrix, certify_bounded_real
from ..errors import ValidationError
from ..models import StateSpaceModel
from .plant import AffineRealization

logger = structlog.get_logger()


@dataclass(frozen=True, eq=False)
class BrlLmi:
    """The block matrix [[AᵀPA−P, AᵀPB, C(α)ᵀ], [BᵀPA, BᵀPB−γI, D(α)ᵀ], [C(α), D(α), −γI]].

    C(α) and D(α) are affine in the FIR taps; systems without free taps
    have empty slot arrays.
    """
    realization: AffineRealization
    gamma: float

    @property
    def n_states(self) -> int:
        return self.realization.A.shape[0]

    @property
    def size(self) -> int:
        r = self.realization
        return r.A.shape[0] + r.B.shape[1] + r.C0.shape[0]

    def evaluate(self, P: np.ndarray, alpha: Optional[np.ndarray] = None) -> np.ndarray:
        r = self.realization
        alpha = np.zeros(r.n_alpha) if alpha is None else np.asarray(alpha, dtype=float)
        if alpha.size != r.n_alpha:
            raise ValidationError(f"expected {r.n_alpha} taps, got {alpha.size}")
        P = np.asarray(P, dtype=float).reshape(self.n_states, self.n_states)
        return bounded_real_matrix(r.A, r.B, r.C(alpha), r.D(alpha), P, self.gamma)

    def max_eigenvalue(self, P: np.ndarray, alpha: Optional[np.ndarray] = None) -> float:
        return float(np.max(np.linalg.eigvalsh(self.evaluate(P, alpha))))


def _as_realization(sys: StateSpaceModel) -> AffineRealization:
    n, m, p = sys.n_states, sys.n_inputs, sys.n_outputs
    return AffineRealization(sys.A, sys.B, sys.C, sys.D, np.zeros((0, p, n)),
                             np.zeros((0, p, m)), sys.dt)


def brl_lmi_assemble(sys: Union[StateSpaceModel, AffineRealization], gamma: float) -> BrlLmi:
    """Assemble the bounded-real LMI at level γ for a fixed or tap-affine realization."""
    if not gamma > 0:
        raise ValidationError(f"gamma must be positive, got {gamma}")
    realization = _as_realization(sys) if isinstance(sys, StateSpaceModel) else sys
    return BrlLmi(realization, float(gamma))


def brl_certificate_check(sys: StateSpaceModel, gamma: float) -> BrlCertificate:
    """Feasible certificate (P > 0, LMI negative) or an infeasible verdict; never raises on infeasibility."""
    certificate = certify_bounded_real(sys, gamma)
    logger.debug("BRL certificate", gamma=gamma, feasible=certificate.feasible,
                 max_eigenvalue=certificate.max_eigenvalue)
    return certificate
