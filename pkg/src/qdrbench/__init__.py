"""qdrbench: benchmark quantum and classical classifiers under
dimensionality reduction.

Submodules: sim (statevector simulator), embeddings, ansatz, qnn
(quantum classifier), qkernel (fidelity kernels), svm (SMO solver),
nn (dense/conv networks), dimred (PCA/SVD/t-SNE/autoencoder),
datasets (synthetic generators), harness (experiment runner).
"""

from .errors import (
    ConfigurationError,
    ConvergenceError,
    DimensionError,
    GateError,
    NormalizationError,
    QdrBenchError,
    SuiteParseError,
    UsageError,
)

__version__ = "0.1.0"

__all__ = [
    "QdrBenchError",
    "ConfigurationError",
    "ConvergenceError",
    "DimensionError",
    "GateError",
    "NormalizationError",
    "SuiteParseError",
    "UsageError",
    "__version__",
]
