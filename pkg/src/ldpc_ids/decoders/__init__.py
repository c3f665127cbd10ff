from .selection import ResidualTable
from .messages import (
    ATANH_CLIP,
    LLR_MAX,
    LayerAssignment,
    MessageState,
    check_update,
    check_update_log_form,
    hard_decision,
    layer_assign,
    posterior,
    recoverability_level,
    residual,
    variable_update,
    weighted_residual,
)
from .schedules import (
    SCHEDULES,
    DecodeOutcome,
    OpCounters,
    decode,
    decode_checkpoints,
    decode_flooding,
    decode_lbp,
    decode_rbp,
    decode_svnf,
    decode_wrlbp,
)
