"""Minimal neural-network engine: dense and 1-D convolution layers,
max-pooling, ReLU/sigmoid, MSE/BCE losses, backprop and Adam.

Serves two consumers: the autoencoder reduction method and the classical
CNN baseline (Conv1D(1->16,k3), ReLU, Conv1D(16->32,k3), ReLU,
MaxPool1D(2), Flatten, Dense, Sigmoid; 1825 parameters at 16 inputs).
Everything is batched float64; convolutions are valid-padding, stride 1.
"""

from __future__ import annotations

import numpy as np
from numpy.lib.stride_tricks import sliding_window_view

from .errors import DimensionError, UsageError
from .optim import Adam
from .qnn import TrainSettings

BCE_CLAMP = 1e-7


class Layer:
    """Stateless unless it owns weights; forward caches what backward needs."""

    params: list[np.ndarray]
    grads: list[np.ndarray]

    def __init__(self):
        self.params = []
        self.grads = []
        self._cache = None

    @property
    def param_count(self) -> int:
        return sum(p.size for p in self.params)

    def out_shape(self, shape):
        return shape

    def init_weights(self, rng: np.random.Generator) -> None:
        pass

    def forward(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def backward(self, dout: np.ndarray) -> np.ndarray:
        raise NotImplementedError


class Dense(Layer):
    def __init__(self, n_in: int, n_out: int):
        super().__init__()
        self.n_in, self.n_out = n_in, n_out
        self.params = [np.zeros((n_in, n_out)), np.zeros(n_out)]
        self.grads = [np.zeros_like(p) for p in self.params]

    def out_shape(self, shape):
        if shape != ("flat", self.n_in):
            raise DimensionError(f"Dense({self.n_in},{self.n_out}) got {shape}")
        return ("flat", self.n_out)

    def init_weights(self, rng):
        bound = 1.0 / np.sqrt(self.n_in)
        self.params[0][:] = rng.uniform(-bound, bound, self.params[0].shape)
        self.params[1][:] = rng.uniform(-bound, bound, self.params[1].shape)

    def forward(self, x):
        self._cache = x
        return x @ self.params[0] + self.params[1]

    def backward(self, dout):
        x = self._cache
        self.grads[0][:] = x.T @ dout
        self.grads[1][:] = dout.sum(axis=0)
        return dout @ self.params[0].T


class Conv1D(Layer):
    def __init__(self, in_ch: int, out_ch: int, kernel: int):
        super().__init__()
        self.in_ch, self.out_ch, self.kernel = in_ch, out_ch, kernel
        self.params = [np.zeros((out_ch, in_ch, kernel)), np.zeros(out_ch)]
        self.grads = [np.zeros_like(p) for p in self.params]

    def out_shape(self, shape):
        if shape[0] != "conv" or shape[1] != self.in_ch or shape[2] < self.kernel:
            raise DimensionError(
                f"Conv1D({self.in_ch},{self.out_ch},k{self.kernel}) got {shape}"
            )
        return ("conv", self.out_ch, shape[2] - self.kernel + 1)

    def init_weights(self, rng):
        bound = 1.0 / np.sqrt(self.in_ch * self.kernel)
        self.params[0][:] = rng.uniform(-bound, bound, self.params[0].shape)
        self.params[1][:] = rng.uniform(-bound, bound, self.params[1].shape)

    def forward(self, x):
        win = sliding_window_view(x, self.kernel, axis=2)  # (B, c, L', k)
        self._cache = win
        return np.einsum("bclk,ock->bol", win, self.params[0]) + self.params[1][None, :, None]

    def backward(self, dout):
        win = self._cache
        self.grads[0][:] = np.einsum("bclk,bol->ock", win, dout)
        self.grads[1][:] = dout.sum(axis=(0, 2))
        k = self.kernel
        padded = np.pad(dout, ((0, 0), (0, 0), (k - 1, k - 1)))
        dwin = sliding_window_view(padded, k, axis=2)
        return np.einsum("bolk,ock->bcl", dwin, self.params[0][:, :, ::-1])


class MaxPool1D(Layer):
    def __init__(self, width: int):
        super().__init__()
        self.width = width

    def out_shape(self, shape):
        if shape[0] != "conv" or shape[2] < self.width:
            raise DimensionError(f"MaxPool1D({self.width}) got {shape}")
        return ("conv", shape[1], shape[2] // self.width)

    def forward(self, x):
        b, c, length = x.shape
        n = length // self.width
        blocks = x[:, :, : n * self.width].reshape(b, c, n, self.width)
        arg = blocks.argmax(axis=3)
        self._cache = (x.shape, arg)
        return blocks.max(axis=3)

    def backward(self, dout):
        shape, arg = self._cache
        b, c, length = shape
        n = length // self.width
        dx = np.zeros((b, c, n, self.width))
        bi, ci, ni = np.ogrid[:b, :c, :n]
        dx[bi, ci, ni, arg] = dout
        dx = dx.reshape(b, c, n * self.width)
        if n * self.width < length:
            dx = np.pad(dx, ((0, 0), (0, 0), (0, length - n * self.width)))
        return dx


class ReLU(Layer):
    def forward(self, x):
        self._cache = x > 0
        return x * self._cache

    def backward(self, dout):
        return dout * self._cache


class Sigmoid(Layer):
    def forward(self, x):
        out = 1.0 / (1.0 + np.exp(-x))
        self._cache = out
        return out

    def backward(self, dout):
        s = self._cache
        return dout * s * (1.0 - s)


class Flatten(Layer):
    def out_shape(self, shape):
        if shape[0] != "conv":
            raise DimensionError(f"Flatten got {shape}")
        return ("flat", shape[1] * shape[2])

    def forward(self, x):
        self._cache = x.shape
        return x.reshape(x.shape[0], -1)

    def backward(self, dout):
        return dout.reshape(self._cache)


class Network:
    """Ordered layer stack; shape chain is validated at construction."""

    def __init__(self, layers: list[Layer], input_shape, seed: int = 0):
        self.layers = layers
        self.input_shape = input_shape
        shape = input_shape
        for layer in layers:
            shape = layer.out_shape(shape)
        self.output_shape = shape
        rng = np.random.default_rng(seed)
        for layer in layers:
            layer.init_weights(rng)
        self._forward_done = False

    @property
    def param_count(self) -> int:
        return sum(layer.param_count for layer in self.layers)

    def forward(self, x: np.ndarray, n_layers: int | None = None) -> np.ndarray:
        """Forward pass caching activations; `n_layers` truncates the stack."""
        out = x
        stack = self.layers if n_layers is None else self.layers[:n_layers]
        for layer in stack:
            out = layer.forward(out)
        self._forward_done = n_layers is None
        return out

    def backward(self, output: np.ndarray, target: np.ndarray,
                 loss: str = "mse") -> float:
        """Backprop from a cached forward; fills every layer's grads."""
        if not self._forward_done:
            raise UsageError("backward requires a full forward pass first")
        target = target.reshape(output.shape)
        if loss == "mse":
            value = float(np.mean((output - target) ** 2))
            dout = 2.0 * (output - target) / output.size
        elif loss == "bce":
            p = np.clip(output, BCE_CLAMP, 1.0 - BCE_CLAMP)
            value = float(np.mean(-(target * np.log(p) + (1 - target) * np.log(1 - p))))
            dout = (p - target) / (p * (1.0 - p)) / output.size
            dout[(output < BCE_CLAMP) | (output > 1.0 - BCE_CLAMP)] = 0.0
        else:
            raise UsageError(f"unknown loss {loss!r}")
        for layer in reversed(self.layers):
            dout = layer.backward(dout)
        return value

    def parameters(self) -> list[np.ndarray]:
        return [p for layer in self.layers for p in layer.params]

    def gradients(self) -> list[np.ndarray]:
        return [g for layer in self.layers for g in layer.grads]


def train_network(net: Network, X: np.ndarray, Y: np.ndarray,
                  settings: TrainSettings, loss: str = "mse") -> list[float]:
    """Mini-batch Adam over `iterations` steps; returns the loss history."""
    if len(X) == 0 or len(X) != len(Y):
        raise UsageError("training needs non-empty matching inputs and targets")
    rng = np.random.default_rng(settings.seed)
    opts = [Adam(lr=settings.learning_rate) for _ in net.parameters()]
    history = []
    n = len(X)
    batch = min(settings.batch_size, n)
    for _ in range(settings.iterations):
        take = rng.choice(n, size=batch, replace=False)
        out = net.forward(X[take])
        history.append(net.backward(out, Y[take], loss=loss))
        for p, g, opt in zip(net.parameters(), net.gradients(), opts):
            p[:] = opt.step(p, g)
    return history


def build_cnn_baseline(n_features: int, seed: int) -> Network:
    """Two valid-padding Conv1D layers, max-pool, dense sigmoid head."""
    reduced = n_features - 4  # two k=3 valid convolutions
    if reduced < 2:
        raise DimensionError(f"CNN baseline needs >= 6 input features, got {n_features}")
    flat = 32 * (reduced // 2)
    return Network(
        [
            Conv1D(1, 16, 3), ReLU(),
            Conv1D(16, 32, 3), ReLU(),
            MaxPool1D(2), Flatten(),
            Dense(flat, 1), Sigmoid(),
        ],
        input_shape=("conv", 1, n_features),
        seed=seed,
    )


def train_cnn_baseline(train_X: np.ndarray, train_y: np.ndarray,
                       test_X: np.ndarray, settings: TrainSettings
                       ) -> tuple[np.ndarray, Network]:
    """Train the baseline classifier and return test predictions in {0,1}."""
    train_X = np.atleast_2d(np.asarray(train_X, dtype=np.float64))
    test_X = np.atleast_2d(np.asarray(test_X, dtype=np.float64))
    net = build_cnn_baseline(train_X.shape[1], settings.seed)
    xin = train_X[:, None, :]
    train_network(net, xin, np.asarray(train_y, dtype=np.float64)[:, None],
                  settings, loss="bce")
    probs = net.forward(test_X[:, None, :])
    return (probs[:, 0] >= 0.5).astype(int), net
