"""Layers with explicit forward caches and hand-derived backward passes.

Conventions: a layer's ``forward`` returns ``(output, cache)``; ``backward``
takes the cache and the upstream gradient and returns ``(input_gradient,
[parameter gradients...])`` in the same order as ``params()``. Weight-decay
terms (``lambda * ||W||^2`` added to the loss) contribute ``2 * lambda * W``
to the weight gradient inside the owning layer's backward.
"""

from __future__ import annotations

import numpy as np

from ..seeding import as_generator

ACTIVATIONS = ("identity", "tanh", "relu", "softmax")


def xavier_init(fan_in: int, fan_out: int, seed) -> np.ndarray:
    """Uniform Glorot/Xavier weights of shape [fan_out, fan_in].

    Entries are drawn from ``U(-b, b)`` with ``b = sqrt(6 / (fan_in + fan_out))``;
    the same seed always yields the same matrix.
    """
    if fan_in < 1 or fan_out < 1:
        raise ValueError(f"fans must be >= 1, got fan_in={fan_in}, fan_out={fan_out}")
    bound = np.sqrt(6.0 / (fan_in + fan_out))
    rng = as_generator(seed)
    return rng.uniform(-bound, bound, size=(fan_out, fan_in))


def softmax(logits: np.ndarray) -> np.ndarray:
    """Numerically stable softmax over the last axis (max subtraction)."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=-1, keepdims=True)


def _activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "identity":
        return z
    if name == "tanh":
        return np.tanh(z)
    if name == "relu":
        return np.maximum(z, 0.0)
    if name == "softmax":
        return softmax(z)
    raise ValueError(f"unknown activation {name!r}")


def _activate_backward(name: str, out: np.ndarray, grad_out: np.ndarray) -> np.ndarray:
    """Gradient w.r.t. pre-activation, expressed through the activation output."""
    if name == "identity":
        return grad_out
    if name == "tanh":
        return grad_out * (1.0 - out**2)
    if name == "relu":
        return grad_out * (out > 0.0)
    if name == "softmax":
        inner = np.sum(grad_out * out, axis=-1, keepdims=True)
        return out * (grad_out - inner)
    raise ValueError(f"unknown activation {name!r}")


class DenseLayer:
    """Fully connected layer ``act(x @ W.T + b)`` over the last input axis.

    Leading axes are preserved, so a [B, C, fan_in] input maps each length-
    ``fan_in`` row independently (the shared per-channel dense used after the
    convolution).
    """

    def __init__(self, weights, bias, activation="identity", weight_decay_lambda=0.0):
        self.weights = np.asarray(weights, dtype=np.float64)
        self.bias = np.asarray(bias, dtype=np.float64)
        if self.weights.ndim != 2:
            raise ValueError("weights must be 2-D [fan_out, fan_in]")
        if self.bias.shape != (self.weights.shape[0],):
            raise ValueError("bias shape must match fan_out")
        if activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {activation!r}")
        if weight_decay_lambda < 0.0:
            raise ValueError("weight_decay_lambda must be >= 0")
        self.activation = activation
        self.weight_decay_lambda = float(weight_decay_lambda)

    @classmethod
    def create(cls, fan_in, fan_out, activation, seed, weight_decay_lambda=0.0):
        return cls(
            weights=xavier_init(fan_in, fan_out, seed),
            bias=np.zeros(fan_out),
            activation=activation,
            weight_decay_lambda=weight_decay_lambda,
        )

    @property
    def fan_in(self) -> int:
        return self.weights.shape[1]

    @property
    def fan_out(self) -> int:
        return self.weights.shape[0]

    def params(self):
        return [self.weights, self.bias]

    def set_params(self, params):
        weights, bias = params
        if weights.shape != self.weights.shape or bias.shape != self.bias.shape:
            raise ValueError("parameter shape mismatch")
        self.weights, self.bias = weights, bias

    def forward(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape[-1] != self.fan_in:
            raise ValueError(f"expected last axis {self.fan_in}, got {x.shape}")
        out = _activate(self.activation, x @ self.weights.T + self.bias)
        return out, ("dense", x, out)

    def backward(self, cache, grad_out):
        tag, x, out = cache
        grad_z = _activate_backward(self.activation, out, grad_out)
        z2 = grad_z.reshape(-1, self.fan_out)
        x2 = x.reshape(-1, self.fan_in)
        grad_w = z2.T @ x2
        if self.weight_decay_lambda > 0.0:
            grad_w = grad_w + 2.0 * self.weight_decay_lambda * self.weights
        grad_b = z2.sum(axis=0)
        grad_x = grad_z @ self.weights
        return grad_x, [grad_w, grad_b]


class Conv1DLayer:
    """Valid 1-D convolution of a single-channel input with a kernel bank.

    Input [B, n_in] maps to [B, n_kernels, n_in - kernel_len + 1]. Kernels are
    stored [n_kernels, 1, kernel_len] (explicit input-channel axis).
    """

    def __init__(self, kernels, bias):
        self.kernels = np.asarray(kernels, dtype=np.float64)
        self.bias = np.asarray(bias, dtype=np.float64)
        if self.kernels.ndim != 3 or self.kernels.shape[1] != 1:
            raise ValueError("kernels must be 3-D [n_kernels, 1, kernel_len]")
        if self.bias.shape != (self.kernels.shape[0],):
            raise ValueError("bias shape must match n_kernels")

    @classmethod
    def create(cls, n_kernels, kernel_len, seed):
        # Glorot fans for a conv bank: fan_in = in_channels * kernel_len,
        # fan_out = n_kernels * kernel_len.
        bound = np.sqrt(6.0 / (kernel_len + n_kernels * kernel_len))
        rng = as_generator(seed)
        kernels = rng.uniform(-bound, bound, size=(n_kernels, 1, kernel_len))
        return cls(kernels=kernels, bias=np.zeros(n_kernels))

    @property
    def n_kernels(self) -> int:
        return self.kernels.shape[0]

    @property
    def kernel_len(self) -> int:
        return self.kernels.shape[2]

    def params(self):
        return [self.kernels, self.bias]

    def set_params(self, params):
        kernels, bias = params
        if kernels.shape != self.kernels.shape or bias.shape != self.bias.shape:
            raise ValueError("parameter shape mismatch")
        self.kernels, self.bias = kernels, bias

    def forward(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2:
            raise ValueError(f"expected [batch, n_in] input, got shape {x.shape}")
        if x.shape[1] < self.kernel_len:
            raise ValueError(f"input length {x.shape[1]} shorter than kernel {self.kernel_len}")
        windows = np.lib.stride_tricks.sliding_window_view(x, self.kernel_len, axis=1)
        out = np.einsum("bls,ks->bkl", windows, self.kernels[:, 0, :]) + self.bias[None, :, None]
        return out, ("conv1d", x, None)

    def backward(self, cache, grad_out):
        tag, x, _ = cache
        windows = np.lib.stride_tricks.sliding_window_view(x, self.kernel_len, axis=1)
        grad_k = np.einsum("bkl,bls->ks", grad_out, windows)[:, None, :]
        grad_b = grad_out.sum(axis=(0, 2))
        padded = np.pad(grad_out, ((0, 0), (0, 0), (self.kernel_len - 1, self.kernel_len - 1)))
        gwin = np.lib.stride_tricks.sliding_window_view(padded, self.kernel_len, axis=2)
        grad_x = np.einsum("bkns,ks->bn", gwin, self.kernels[:, 0, ::-1])
        return grad_x, [grad_k, grad_b]


class DropoutLayer:
    """Inverted dropout: keep with probability 1-rate, scale kept units."""

    def __init__(self, rate):
        if not 0.0 <= rate < 1.0:
            raise ValueError(f"rate must be in [0, 1), got {rate}")
        self.rate = float(rate)

    def params(self):
        return []

    def set_params(self, params):
        if params:
            raise ValueError("dropout has no parameters")

    def apply(self, x, train, rng=None):
        """Return ``(output, mask)``; the mask is boolean keep/drop per unit."""
        x = np.asarray(x, dtype=np.float64)
        if not train or self.rate == 0.0:
            return x, np.ones(x.shape, dtype=bool)
        if rng is None:
            raise ValueError("training-mode dropout requires an rng")
        mask = rng.random(x.shape) >= self.rate
        return x * mask / (1.0 - self.rate), mask

    def forward(self, x, train=False, rng=None):
        out, mask = self.apply(x, train, rng)
        multiplier = None if (not train or self.rate == 0.0) else mask / (1.0 - self.rate)
        return out, ("dropout", multiplier, None)

    def backward(self, cache, grad_out):
        tag, multiplier, _ = cache
        if multiplier is None:
            return grad_out, []
        return grad_out * multiplier, []


class FlattenLayer:
    """Collapse all axes after the batch axis."""

    def params(self):
        return []

    def set_params(self, params):
        if params:
            raise ValueError("flatten has no parameters")

    def forward(self, x):
        x = np.asarray(x, dtype=np.float64)
        return x.reshape(x.shape[0], -1), ("flatten", x.shape, None)

    def backward(self, cache, grad_out):
        tag, shape, _ = cache
        return grad_out.reshape(shape), []


_TAGS = {DenseLayer: "dense", Conv1DLayer: "conv1d", DropoutLayer: "dropout", FlattenLayer: "flatten"}


def net_forward(layers, x, train=False, rng=None):
    """Run a layer stack; returns ``(output, caches)`` for the backward pass."""
    caches = []
    out = x
    for layer in layers:
        if isinstance(layer, DropoutLayer):
            out, cache = layer.forward(out, train=train, rng=rng)
        else:
            out, cache = layer.forward(out)
        caches.append(cache)
    return out, caches


def net_backward(layers, caches, grad_out):
    """Backpropagate through a stack; returns ``(input grad, parameter grads)``.

    The parameter gradients come back as one flat list aligned with
    ``net_params(layers)``. The caches must be the ones produced by the
    matching ``net_forward`` call.
    """
    if len(caches) != len(layers):
        raise ValueError(f"cache/layer mismatch: {len(caches)} caches for {len(layers)} layers")
    per_layer = []
    grad = grad_out
    for layer, cache in zip(reversed(layers), reversed(caches)):
        if not isinstance(cache, tuple) or cache[0] != _TAGS[type(layer)]:
            raise ValueError(f"stale activation cache: expected {_TAGS[type(layer)]!r} entry")
        grad, layer_grads = layer.backward(cache, grad)
        per_layer.append(layer_grads)
    flat = [g for layer_grads in reversed(per_layer) for g in layer_grads]
    return grad, flat


def net_params(layers):
    return [p for layer in layers for p in layer.params()]


def set_net_params(layers, params):
    """Assign a flat parameter list (as produced by ``net_params``) back."""
    params = list(params)
    pos = 0
    for layer in layers:
        count = len(layer.params())
        layer.set_params(params[pos : pos + count])
        pos += count
    if pos != len(params):
        raise ValueError(f"expected {pos} parameter arrays, got {len(params)}")


def decay_penalty(layers) -> float:
    """Total weight-decay term of the loss: sum of lambda * ||W||^2."""
    total = 0.0
    for layer in layers:
        if isinstance(layer, DenseLayer) and layer.weight_decay_lambda > 0.0:
            total += layer.weight_decay_lambda * float(np.sum(layer.weights**2))
    return total
