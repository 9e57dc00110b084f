"""Fisher-discriminant triplet/contrastive metric learning."""

from ._kernels import BACKEND
from .backbone import (
    ForwardTrace,
    NetworkParams,
    backward,
    forward,
    init_params,
    load_checkpoint,
    save_checkpoint,
    sgd_step,
)
from .data_io import (
    LabeledDataset,
    export_embeddings,
    load_embeddings_csv,
    load_idx,
    synthetic_gaussians,
    write_idx,
)
from .eval import EvalReport, one_nn_accuracy
from .fda import FdaModel, fda_fit, fda_transform, load_fda_model, save_fda_model
from .linalg import (
    NotPositiveDefiniteError,
    cholesky,
    generalized_eig,
    matmul,
    sym_eig,
    trace_quadratic,
)
from .losses import (
    LossConfig,
    LossOutput,
    contrastive_loss,
    fdc_loss,
    fdt_loss,
    fdt_loss_epsilon_form,
    triplet_loss,
)
from .rng import Xoshiro256
from .sampling import PairBatch, TripletBatch, sample_pairs, sample_triplets
from .scatter import (
    EmbeddedPairBatch,
    EmbeddedTripletBatch,
    ScatterPair,
    classical_scatters,
    pair_scatters,
    total_scatter,
    triplet_scatters,
)
from .train import ConfigError, RunConfig, TrainResult, run_training

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConfigError",
    "EmbeddedPairBatch",
    "EmbeddedTripletBatch",
    "EvalReport",
    "FdaModel",
    "ForwardTrace",
    "LabeledDataset",
    "LossConfig",
    "LossOutput",
    "NetworkParams",
    "NotPositiveDefiniteError",
    "PairBatch",
    "RunConfig",
    "ScatterPair",
    "TrainResult",
    "TripletBatch",
    "Xoshiro256",
    "backward",
    "cholesky",
    "classical_scatters",
    "contrastive_loss",
    "export_embeddings",
    "fda_fit",
    "fda_transform",
    "fdc_loss",
    "fdt_loss",
    "fdt_loss_epsilon_form",
    "forward",
    "generalized_eig",
    "init_params",
    "load_checkpoint",
    "load_embeddings_csv",
    "load_fda_model",
    "load_idx",
    "matmul",
    "one_nn_accuracy",
    "pair_scatters",
    "run_training",
    "sample_pairs",
    "sample_triplets",
    "save_checkpoint",
    "save_fda_model",
    "sgd_step",
    "sym_eig",
    "synthetic_gaussians",
    "total_scatter",
    "trace_quadratic",
    "triplet_loss",
    "triplet_scatters",
    "write_idx",
]
