"""The four reduction methods behind one fit-on-train / transform-both API:
PCA, truncated SVD, exact t-SNE and a feed-forward autoencoder.

Sign conventions are fixed so runs are comparable: each PCA eigenvector
and each SVD right-singular vector is flipped so its largest-magnitude
component is positive.  t-SNE is the exact O(n^2) algorithm with
per-point bandwidths found by binary search on the perplexity; test rows
are attached to the fitted space by the inverse-distance-weighted mean of
their 5 nearest training rows' embeddings (t-SNE itself has no parametric
out-of-sample map).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, DimensionError
from .nn import Dense, Network, ReLU, train_network
from .qnn import TrainSettings

TSNE_KNN = 5
TSNE_EXAGGERATION = 12.0
TSNE_EXAGGERATION_ITERS = 250
TSNE_LEARNING_RATE = 200.0
TSNE_MOMENTUM_SWITCH = 250

REDUCTION_METHODS = ("PCA", "TruncatedSVD", "TSNE", "Autoencoder")


@dataclass(frozen=True)
class ReductionSpec:
    method: str
    target_dim: int
    tsne_perplexity: float = 30.0
    tsne_iterations: int = 1000
    autoencoder_epochs: int = 400
    seed: int = 0

    def __post_init__(self):
        if self.method not in REDUCTION_METHODS:
            raise ConfigurationError(f"unknown reduction method {self.method!r}")
        if self.target_dim < 1:
            raise ConfigurationError("target_dim must be >= 1")
        if self.tsne_perplexity <= 0:
            raise ConfigurationError("perplexity must be positive")


@dataclass
class ReducedDataset:
    train: np.ndarray
    test: np.ndarray
    fitted_on_train: bool = True


def _check_dims(train_X: np.ndarray, d: int) -> None:
    if d > train_X.shape[1]:
        raise DimensionError(
            f"target dimension {d} exceeds feature count {train_X.shape[1]}"
        )
    if len(train_X) < 2:
        raise DimensionError("fitting needs at least 2 training rows")


def _fix_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so the largest-magnitude component of each is positive."""
    flips = np.sign(vectors[np.argmax(np.abs(vectors), axis=0), np.arange(vectors.shape[1])])
    flips[flips == 0] = 1.0
    return vectors * flips


def pca_fit_transform(train_X: np.ndarray, test_X: np.ndarray, d: int) -> ReducedDataset:
    """Project onto the top-d eigenvectors of the train covariance."""
    train_X = np.atleast_2d(np.asarray(train_X, dtype=np.float64))
    test_X = np.atleast_2d(np.asarray(test_X, dtype=np.float64))
    _check_dims(train_X, d)
    mean = train_X.mean(axis=0)
    centered = train_X - mean
    cov = centered.T @ centered / (len(train_X) - 1)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1][:d]
    components = _fix_signs(eigvecs[:, order])
    return ReducedDataset(centered @ components, (test_X - mean) @ components)


def pca_explained_variance(train_X: np.ndarray, d: int) -> float:
    train_X = np.atleast_2d(np.asarray(train_X, dtype=np.float64))
    centered = train_X - train_X.mean(axis=0)
    cov = centered.T @ centered / (len(train_X) - 1)
    eigvals = np.sort(np.linalg.eigvalsh(cov))[::-1]
    return float(eigvals[:d].sum())


def tsvd_fit_transform(train_X: np.ndarray, test_X: np.ndarray, d: int) -> ReducedDataset:
    """Uncentered rank-d factorization; train -> U_d S_d, test -> test V_d."""
    train_X = np.atleast_2d(np.asarray(train_X, dtype=np.float64))
    test_X = np.atleast_2d(np.asarray(test_X, dtype=np.float64))
    _check_dims(train_X, d)
    u, s, vt = np.linalg.svd(train_X, full_matrices=False)
    v = _fix_signs(vt[:d].T)
    return ReducedDataset(train_X @ v, test_X @ v)


def tsvd_singular_values(train_X: np.ndarray, d: int) -> np.ndarray:
    s = np.linalg.svd(np.atleast_2d(train_X), compute_uv=False)
    return s[:d]


def _perplexity_probs(sq_dists: np.ndarray, perplexity: float,
                      tol: float = 1e-5, max_iter: int = 100) -> np.ndarray:
    """Row-wise Gaussian affinities with bandwidths matched to perplexity."""
    n = sq_dists.shape[0]
    target = np.log(perplexity)
    P = np.zeros((n, n))
    for i in range(n):
        d_i = np.delete(sq_dists[i], i)
        beta, lo, hi = 1.0, 0.0, np.inf
        for _ in range(max_iter):
            w = np.exp(-d_i * beta)
            sum_w = w.sum()
            if sum_w <= 0:
                h = 0.0
                p = np.zeros_like(w)
            else:
                p = w / sum_w
                h = float(-np.sum(p[p > 0] * np.log(p[p > 0])))
            diff = h - target
            if abs(diff) < tol:
                break
            if diff > 0:  # entropy too high -> narrow the kernel
                lo = beta
                beta = beta * 2 if hi == np.inf else (beta + hi) / 2
            else:
                hi = beta
                beta = (beta + lo) / 2
        P[i, np.arange(n) != i] = p
    return P


def _kl_divergence(P: np.ndarray, Q: np.ndarray) -> float:
    mask = P > 0
    return float(np.sum(P[mask] * np.log(P[mask] / np.maximum(Q[mask], 1e-12))))


def tsne_fit_transform(train_X: np.ndarray, test_X: np.ndarray, d: int,
                       perplexity: float = 30.0, iterations: int = 1000,
                       seed: int = 0, return_kl: bool = False):
    """Exact t-SNE on the training rows plus kNN out-of-sample extension.

    Gradient descent uses early exaggeration (x12 for the first 250
    iterations), gains, and momentum 0.5 switching to 0.8 at iteration 250.
    """
    train_X = np.atleast_2d(np.asarray(train_X, dtype=np.float64))
    test_X = np.atleast_2d(np.asarray(test_X, dtype=np.float64))
    _check_dims(train_X, d)
    n = len(train_X)
    if perplexity >= (n - 1) / 3:
        raise ConfigurationError(
            f"perplexity {perplexity} infeasible for {n} training rows"
        )
    sq = _pairwise_sq_dists(train_X, train_X)
    cond = _perplexity_probs(sq, perplexity)
    P = (cond + cond.T) / (2.0 * n)
    P = np.maximum(P, 1e-12)

    rng = np.random.default_rng(seed)
    Y = 1e-4 * rng.standard_normal((n, d))
    velocity = np.zeros_like(Y)
    gains = np.ones_like(Y)
    kl_history = []
    for it in range(iterations):
        exaggeration = TSNE_EXAGGERATION if it < TSNE_EXAGGERATION_ITERS else 1.0
        momentum = 0.5 if it < TSNE_MOMENTUM_SWITCH else 0.8
        num = 1.0 / (1.0 + _pairwise_sq_dists(Y, Y))
        np.fill_diagonal(num, 0.0)
        Q = num / num.sum()
        Q = np.maximum(Q, 1e-12)
        PQ = (exaggeration * P - Q) * num
        grad = 4.0 * ((np.diag(PQ.sum(axis=1)) - PQ) @ Y)
        same_dir = np.sign(grad) == np.sign(velocity)
        gains = np.where(same_dir, gains * 0.8, gains + 0.2)
        gains = np.maximum(gains, 0.01)
        velocity = momentum * velocity - TSNE_LEARNING_RATE * gains * grad
        Y = Y + velocity
        Y = Y - Y.mean(axis=0)
        kl_history.append(_kl_divergence(P, Q))

    if len(test_X) > 0:
        d_test = _pairwise_sq_dists(test_X, train_X)
        k = min(TSNE_KNN, n)
        nn_idx = np.argsort(d_test, axis=1)[:, :k]
        w = 1.0 / (np.take_along_axis(d_test, nn_idx, axis=1) + 1e-12)
        w /= w.sum(axis=1, keepdims=True)
        test_Y = np.einsum("ik,ikd->id", w, Y[nn_idx])
    else:
        test_Y = np.zeros((0, d))
    result = ReducedDataset(Y, test_Y)
    if return_kl:
        return result, kl_history
    return result


def _pairwise_sq_dists(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    sq = (
        np.sum(A * A, axis=1)[:, None]
        + np.sum(B * B, axis=1)[None, :]
        - 2.0 * A @ B.T
    )
    return np.maximum(sq, 0.0)


def build_autoencoder(n_features: int, d: int, seed: int,
                      hidden_activation: str = "relu") -> tuple[Network, int]:
    """Encoder m->h->d, decoder d->h->m, h = max(d, ceil(m/2)).

    Returns the network plus the layer index whose output is the encoding.
    `hidden_activation="linear"` is an ablation hook used by tests.
    """
    h = max(d, -(-n_features // 2))
    act = ReLU if hidden_activation == "relu" else None
    layers: list = [Dense(n_features, h)]
    if act:
        layers.append(act())
    layers.append(Dense(h, d))
    encode_at = len(layers)
    layers.append(Dense(d, h))
    if act:
        layers.append(act())
    layers.append(Dense(h, n_features))
    return Network(layers, ("flat", n_features), seed=seed), encode_at


def autoencoder_fit_transform(train_X: np.ndarray, test_X: np.ndarray, d: int,
                              epochs: int = 400, seed: int = 0,
                              hidden_activation: str = "relu") -> ReducedDataset:
    """Train on train rows only (MSE reconstruction); output the encodings."""
    train_X = np.atleast_2d(np.asarray(train_X, dtype=np.float64))
    test_X = np.atleast_2d(np.asarray(test_X, dtype=np.float64))
    _check_dims(train_X, d)
    net, encode_at = build_autoencoder(train_X.shape[1], d, seed, hidden_activation)
    if epochs > 0:
        settings = TrainSettings(iterations=epochs, batch_size=32,
                                 learning_rate=0.01, seed=seed)
        train_network(net, train_X, train_X, settings, loss="mse")
    return ReducedDataset(
        net.forward(train_X, n_layers=encode_at),
        net.forward(test_X, n_layers=encode_at),
    )


def fit_transform(spec: ReductionSpec, train_X: np.ndarray,
                  test_X: np.ndarray) -> ReducedDataset:
    """Dispatch on the configured method."""
    if spec.method == "PCA":
        return pca_fit_transform(train_X, test_X, spec.target_dim)
    if spec.method == "TruncatedSVD":
        return tsvd_fit_transform(train_X, test_X, spec.target_dim)
    if spec.method == "TSNE":
        return tsne_fit_transform(
            train_X, test_X, spec.target_dim,
            perplexity=spec.tsne_perplexity,
            iterations=spec.tsne_iterations,
            seed=spec.seed,
        )
    return autoencoder_fit_transform(
        train_X, test_X, spec.target_dim,
        epochs=spec.autoencoder_epochs, seed=spec.seed,
    )
