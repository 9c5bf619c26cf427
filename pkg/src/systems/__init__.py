"""State-space algebra and multirate lifting."""
from .sslib import (
    augment_delay,
    block_diagonal,
    c2d_zoh,
    connect_parallel,
    connect_series,
    feedback_inverse_unity,
    impulse_response,
    is_schur,
    postmultiply,
    premultiply,
    require_schur,
    spectral_radius,
    stack_inputs,
    stack_outputs,
    tf_to_ss,
)
from .lifting import (
    LiftedSystem,
    downsample,
    fsfh_lift,
    lift_signal,
    polyphase_decompose_decim,
    polyphase_decompose_interp,
    polyphase_reconstruct_decim,
    polyphase_reconstruct_interp,
    selection_matrices,
    unlift_signal,
    upsample,
)

__all__ = [
    "augment_delay", "block_diagonal", "c2d_zoh", "connect_parallel", "connect_series",
    "feedback_inverse_unity", "impulse_response", "is_schur", "postmultiply", "premultiply",
    "require_schur", "spectral_radius", "stack_inputs", "stack_outputs", "tf_to_ss",
    "LiftedSystem", "downsample", "fsfh_lift", "lift_signal", "polyphase_decompose_decim",
    "polyphase_decompose_interp", "polyphase_reconstruct_decim", "polyphase_reconstruct_interp",
    "selection_matrices", "unlift_signal", "upsample",
]
