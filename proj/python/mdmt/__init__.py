"""Task-incremental lifelong learning: rehearsal trainer, margin losses, metrics."""

from ._core import (
    HyperParams,
    LabeledDataset,
    LossMode,
    LossResult,
    MarginConfig,
    Network,
    TaskData,
    TaskHead,
    TrainResult,
    average_accuracy,
    cds_loss,
    ed_loss,
    emit_matrix,
    forgetting,
    gen_permuted_tasks,
    gen_split_tasks,
    gen_synthetic,
    init_head,
    lca,
    load_idx,
    ltr,
    parse_matrix,
    run_config,
    softmax_ce_loss,
    tam_loss,
    train_sequence,
)

__all__ = [
    "HyperParams",
    "LabeledDataset",
    "LossMode",
    "LossResult",
    "MarginConfig",
    "Network",
    "TaskData",
    "TaskHead",
    "TrainResult",
    "average_accuracy",
    "cds_loss",
    "ed_loss",
    "emit_matrix",
    "forgetting",
    "gen_permuted_tasks",
    "gen_split_tasks",
    "gen_synthetic",
    "init_head",
    "lca",
    "load_idx",
    "ltr",
    "parse_matrix",
    "run_config",
    "softmax_ce_loss",
    "tam_loss",
    "train_sequence",
]
