"""Deterministic synthetic dataset generators and the stratified splitter.

Three families:
  - linear: Madelon-style clusters-at-hypercube-vertices with redundant,
    repeated and pure-noise columns plus optional label flips,
  - nonlinear: informative block drawn through a Gaussian copula with
    uniform [-1,1] marginals, labeled by thresholding a registered
    nonlinear function at its sample median (exactly balanced), plus
    redundant linear combinations and i.i.d. uniform nuisance columns,
  - image4x4: flattened 4x4 grayscale grids where class 0 highlights a
    diagonal and class 1 a full row or column.

Every generator is a pure function of its config (seed included).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigurationError

# registry of nonlinear label functions over the informative block
LABEL_FUNCTIONS = {
    "default": lambda Z: Z[:, 0] * Z[:, 1] + np.sin(np.pi * Z[:, 2]) + Z[:, 3] ** 2,
    "rings": lambda Z: np.sum(Z[:, :4] ** 2, axis=1),
    "xor": lambda Z: Z[:, 0] * Z[:, 1],
}


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    provenance: dict = field(default_factory=dict)

    @property
    def n_samples(self) -> int:
        return len(self.y)

    @property
    def n_features(self) -> int:
        return self.X.shape[1]


@dataclass(frozen=True)
class LinearGenConfig:
    n_samples: int = 500
    n_features: int = 16
    n_informative: int = 8
    n_redundant: int = 4
    n_repeated: int = 0
    clusters_per_class: int = 2
    class_sep: float = 1.0
    flip_y: float = 0.01
    seed: int = 0

    def __post_init__(self):
        if self.n_informative + self.n_redundant + self.n_repeated > self.n_features:
            raise ConfigurationError(
                "informative + redundant + repeated exceeds feature count"
            )
        if self.n_samples < 2 or self.n_informative < 1:
            raise ConfigurationError("need >= 2 samples and >= 1 informative feature")
        if not 0 <= self.flip_y < 1:
            raise ConfigurationError("flip_y must be a fraction in [0, 1)")


@dataclass(frozen=True)
class NonlinearGenConfig:
    n_samples: int = 500
    n_informative: int = 4
    n_redundant: int = 2
    n_nuisance: int = 2
    correlation: float = 0.3  # adjacent-informative copula correlation
    label_function: str = "default"
    seed: int = 0

    def __post_init__(self):
        if self.label_function not in LABEL_FUNCTIONS:
            raise ConfigurationError(
                f"unknown label function {self.label_function!r}"
            )
        if self.n_informative < 1 or self.n_samples < 2:
            raise ConfigurationError("need >= 2 samples and >= 1 informative feature")
        if not -0.99 < self.correlation < 0.99:
            raise ConfigurationError("correlation must keep the matrix positive definite")

    def correlation_matrix(self) -> np.ndarray:
        r = np.eye(self.n_informative)
        for i in range(self.n_informative - 1):
            r[i, i + 1] = r[i + 1, i] = self.correlation
        return r


@dataclass(frozen=True)
class ImageGenConfig:
    n_samples: int = 500
    hi_lo: float = 0.7
    hi_hi: float = 1.0
    bg_lo: float = 0.0
    bg_hi: float = 0.3
    class_offset: float = 0.5  # fraction of class-0 samples
    seed: int = 0

    def __post_init__(self):
        if not (0 < self.hi_lo <= self.hi_hi <= 1):
            raise ConfigurationError("high-intensity range must lie in (0, 1]")
        if not (0 <= self.bg_lo <= self.bg_hi < 1):
            raise ConfigurationError("background range must lie in [0, 1)")
        if self.bg_hi >= self.hi_lo:
            raise ConfigurationError(
                "background range must stay below the high-intensity range"
            )
        if not 0 < self.class_offset < 1:
            raise ConfigurationError("class offset must be a fraction in (0, 1)")


def gen_linear(cfg: LinearGenConfig) -> Dataset:
    """Gaussian clusters at scaled hypercube vertices with noisy extras."""
    rng = np.random.default_rng(cfg.seed)
    n_clusters = 2 * cfg.clusters_per_class
    if n_clusters > 2 ** cfg.n_informative:
        raise ConfigurationError(
            f"{n_clusters} clusters do not fit 2^{cfg.n_informative} hypercube vertices"
        )
    # pick distinct vertices; alternate class assignment between clusters
    vertex_ids = rng.choice(2 ** cfg.n_informative, size=n_clusters, replace=False)
    vertices = np.array(
        [[(v >> b) & 1 for b in range(cfg.n_informative)] for v in vertex_ids],
        dtype=np.float64,
    )
    centers = (2.0 * vertices - 1.0) * cfg.class_sep

    half = cfg.n_samples // 2
    counts = [half, cfg.n_samples - half]  # balanced before flips
    rows, labels = [], []
    for cls in (0, 1):
        per = np.full(cfg.clusters_per_class, counts[cls] // cfg.clusters_per_class)
        per[: counts[cls] % cfg.clusters_per_class] += 1
        for j, n_j in enumerate(per):
            center = centers[2 * j + cls]
            rows.append(rng.standard_normal((n_j, cfg.n_informative)) + center)
            labels.append(np.full(n_j, cls))
    info = np.vstack(rows)
    y = np.concatenate(labels)

    blocks = [info]
    if cfg.n_redundant:
        mix = rng.uniform(-1.0, 1.0, size=(cfg.n_informative, cfg.n_redundant))
        blocks.append(info @ mix)
    if cfg.n_repeated:
        src = rng.integers(0, cfg.n_informative + cfg.n_redundant, size=cfg.n_repeated)
        blocks.append(np.hstack(blocks)[:, src])
    n_noise = cfg.n_features - sum(b.shape[1] for b in blocks)
    if n_noise:
        blocks.append(rng.standard_normal((cfg.n_samples, n_noise)))
    X = np.hstack(blocks)

    if cfg.flip_y > 0:
        n_flip = int(round(cfg.flip_y * cfg.n_samples))
        flip = rng.choice(cfg.n_samples, size=n_flip, replace=False)
        y = y.copy()
        y[flip] = 1 - y[flip]

    row_order = rng.permutation(cfg.n_samples)
    col_order = rng.permutation(cfg.n_features)
    return Dataset(
        X[row_order][:, col_order],
        y[row_order].astype(int),
        provenance={"kind": "linear", "config": cfg.__dict__ | {}, "seed": cfg.seed},
    )


def _std_normal_cdf(z: np.ndarray) -> np.ndarray:
    return 0.5 * (1.0 + np.vectorize(math.erf)(z / np.sqrt(2.0)))


def gen_nonlinear(cfg: NonlinearGenConfig) -> Dataset:
    """Copula-correlated informative block with a median-split nonlinear label."""
    rng = np.random.default_rng(cfg.seed)
    corr = cfg.correlation_matrix()
    try:
        chol = np.linalg.cholesky(corr)
    except np.linalg.LinAlgError as exc:
        raise ConfigurationError("correlation matrix is not positive definite") from exc
    z = rng.standard_normal((cfg.n_samples, cfg.n_informative)) @ chol.T
    info = 2.0 * _std_normal_cdf(z) - 1.0  # uniform marginals on [-1, 1]

    f = LABEL_FUNCTIONS[cfg.label_function](info)
    y = (f > np.median(f)).astype(int)

    blocks = [info]
    if cfg.n_redundant:
        mix = rng.uniform(-1.0, 1.0, size=(cfg.n_informative, cfg.n_redundant))
        blocks.append(info @ mix)
    if cfg.n_nuisance:
        blocks.append(rng.uniform(-1.0, 1.0, size=(cfg.n_samples, cfg.n_nuisance)))
    X = np.hstack(blocks)
    col_order = rng.permutation(X.shape[1])
    return Dataset(
        X[:, col_order],
        y,
        provenance={"kind": "nonlinear", "config": cfg.__dict__ | {}, "seed": cfg.seed},
    )


_DIAGONALS = [
    [0, 5, 10, 15],
    [3, 6, 9, 12],
]
_ROWS = [[4 * r + c for c in range(4)] for r in range(4)]
_COLS = [[4 * r + c for r in range(4)] for c in range(4)]


def gen_image4x4(cfg: ImageGenConfig) -> Dataset:
    """Flattened 4x4 grids: class 0 diagonal structures, class 1 rows/columns."""
    rng = np.random.default_rng(cfg.seed)
    n0 = int(round(cfg.class_offset * cfg.n_samples))
    y = np.array([0] * n0 + [1] * (cfg.n_samples - n0))
    X = rng.uniform(cfg.bg_lo, cfg.bg_hi, size=(cfg.n_samples, 16))
    structures = []
    for label in y:
        if label == 0:
            structures.append(_DIAGONALS[rng.integers(2)])
        else:
            lines = _ROWS + _COLS
            structures.append(lines[rng.integers(8)])
    for i, pixels in enumerate(structures):
        X[i, pixels] = rng.uniform(cfg.hi_lo, cfg.hi_hi, size=len(pixels))
    order = rng.permutation(cfg.n_samples)
    return Dataset(
        X[order],
        y[order],
        provenance={"kind": "image4x4", "config": cfg.__dict__ | {}, "seed": cfg.seed},
    )


def split(ds: Dataset, train_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Stratified, disjoint, deterministic train/test partition."""
    if not 0 < train_fraction < 1:
        raise ConfigurationError("train fraction must be in (0, 1)")
    rng = np.random.default_rng(seed)
    train_idx, test_idx = [], []
    for cls in np.unique(ds.y):
        members = np.nonzero(ds.y == cls)[0]
        members = members[rng.permutation(len(members))]
        n_train = int(round(train_fraction * len(members)))
        if n_train == 0 or n_train == len(members):
            raise ConfigurationError(
                f"split leaves class {cls} empty on one side"
            )
        train_idx.append(members[:n_train])
        test_idx.append(members[n_train:])
    train_idx = np.sort(np.concatenate(train_idx))
    test_idx = np.sort(np.concatenate(test_idx))
    prov = ds.provenance | {"split_seed": seed, "train_fraction": train_fraction}
    return (
        Dataset(ds.X[train_idx], ds.y[train_idx], prov | {"part": "train"}),
        Dataset(ds.X[test_idx], ds.y[test_idx], prov | {"part": "test"}),
    )


def to_csv(ds: Dataset, path) -> None:
    """Header f0..f{m-1},label; one row per sample."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([f"f{i}" for i in range(ds.n_features)] + ["label"])
        for row, label in zip(ds.X, ds.y):
            writer.writerow([repr(float(v)) for v in row] + [int(label)])


def from_csv(path) -> Dataset:
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        rows = [[float(v) for v in row] for row in reader]
    data = np.array(rows, dtype=np.float64)
    if header[-1] != "label":
        raise ConfigurationError("dataset CSV must end with a 'label' column")
    return Dataset(data[:, :-1], data[:, -1].astype(int),
                   provenance={"kind": "csv", "path": str(path)})
