"""Gradient boosting whose weak learners are deep CART trees pruned by
geometric-wavelet norm ordering, with out-of-bag selection of the number
of wavelet terms kept per boosting stage."""

from .boosting import (
    BoostConfig,
    Ensemble,
    fit_classifier,
    init_constant,
    predict,
    predict_batch,
    predict_labels,
    train,
    truncate,
)
from .data import Dataset, SplitPair, kfold_indices, load_csv, save_csv, subsample
from .errors import DataError, GWBoostError, ModelError
from .evaluate import (
    EvalReport,
    auc_binary,
    best_k_truncation,
    inject_label_noise,
    misclassification_rate,
    rmse,
    run_protocol,
)
from .model_io import load_model, save_model
from .simplex import SimplexEncoding, build_encoding, decode, encode
from .tree import WaveletTree, best_split, fit_tree, predict_full
from .wavelets import (
    WaveletOrder,
    compute_norms,
    mterm_loss_curve,
    predict_mterm,
    sort_wavelets,
)

__version__ = "0.1.0"
