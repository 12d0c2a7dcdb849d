"""Classification with fuzzy-number and interval-valued features.

Features are defuzzified (MOM, COG, ALC, VAL, M1, M2) and passed to a
one-vs-rest kernel SVM (DF-SVM) or a two-hidden-layer perceptron (DF-MLP).
"""
__version__ = "0.1.0"

from .dataio import FuzzyDataset, SplitSpec, SyntheticConfig, generate_synthetic, read_fuzzy_csv, split, write_fuzzy_csv
from .defuzz import DefuzzMethod, defuzzify_vector
from .fuzzy_core import FuzzyNumber, Interval, alpha_cut, membership, support
from .mlp import MlpModel, TrainConfig, train_df_mlp
from .svm import KernelSpec, SvmModel, train_df_svm

__all__ = [
    "DefuzzMethod", "FuzzyDataset", "FuzzyNumber", "Interval", "KernelSpec", "MlpModel", "SplitSpec",
    "SvmModel", "SyntheticConfig", "TrainConfig", "alpha_cut", "defuzzify_vector", "generate_synthetic",
    "membership", "read_fuzzy_csv", "split", "support", "train_df_mlp", "train_df_svm", "write_fuzzy_csv",
]
