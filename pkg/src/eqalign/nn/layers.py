"""Layer zoo for the static feed-forward networks used by the toolkit.

Series tensors are shaped (batch, time, channels); after ``flatten`` the
shape is (batch, features). Convolutions have stride 1 and either causal
padding (zero left-pad of kernel-1, preserving the time length) or no
padding. Each layer owns its parameters and, after a forward pass, enough
cached state to run the matching backward pass.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import ConfigError, ShapeError

LEAKY_SLOPE = 0.2  # shared negative slope for every LeakyReLU in the toolkit


@dataclass
class LayerSpec:
    """Declarative description of one layer.

    kind is one of: conv1d, dense, leaky_relu, sigmoid, linear, maxpool1d,
    upsample1d, flatten. ``options`` carries the kind-specific sizes
    (filters/kernel/padding for conv1d, units for dense, factor for the
    pooling and upsampling layers).
    """

    kind: str
    options: dict = field(default_factory=dict)

    def to_dict(self):
        return {"kind": self.kind, "options": dict(self.options)}

    @staticmethod
    def from_dict(d):
        return LayerSpec(kind=d["kind"], options=dict(d.get("options", {})))


def conv1d(filters, kernel, padding="causal"):
    if filters < 1 or kernel < 1:
        raise ConfigError(f"conv1d needs filters >= 1 and kernel >= 1, got {filters}, {kernel}")
    if padding not in ("causal", "none"):
        raise ConfigError(f"unknown conv1d padding {padding!r}")
    return LayerSpec("conv1d", {"filters": filters, "kernel": kernel, "padding": padding})


def dense(units):
    if units < 1:
        raise ConfigError(f"dense needs units >= 1, got {units}")
    return LayerSpec("dense", {"units": units})


def leaky_relu():
    return LayerSpec("leaky_relu", {})


def sigmoid():
    return LayerSpec("sigmoid", {})


def linear():
    return LayerSpec("linear", {})


def maxpool1d(factor):
    if factor < 1:
        raise ConfigError(f"maxpool1d needs factor >= 1, got {factor}")
    return LayerSpec("maxpool1d", {"factor": factor})


def upsample1d(factor):
    if factor < 1:
        raise ConfigError(f"upsample1d needs factor >= 1, got {factor}")
    return LayerSpec("upsample1d", {"factor": factor})


def flatten():
    return LayerSpec("flatten", {})


class Layer:
    """Base layer: parameter dict + shape algebra + forward/backward."""

    def __init__(self, spec):
        self.spec = spec
        self.params = {}

    def out_shape(self, in_shape):
        raise NotImplementedError

    def init_params(self, in_shape, rng):
        pass

    def forward(self, x):
        """Returns (output, cache); cache feeds the matching backward call."""
        raise NotImplementedError

    def backward(self, grad_out, cache):
        """Returns (grad_in, param_grads dict keyed like self.params)."""
        raise NotImplementedError

    def _shape_err(self, got, want):
        return ShapeError(
            f"{self.spec.kind} layer expected input shape {want}, got {got}"
        )


def _glorot(rng, fan_in, fan_out, shape):
    limit = np.sqrt(6.0 / (fan_in + fan_out))
    return rng.uniform(-limit, limit, size=shape)


class Conv1D(Layer):
    def __init__(self, spec):
        super().__init__(spec)
        self.filters = spec.options["filters"]
        self.kernel = spec.options["kernel"]
        self.padding = spec.options["padding"]

    def out_shape(self, in_shape):
        if len(in_shape) != 2:
            raise self._shape_err(in_shape, "(time, channels)")
        t, _ = in_shape
        t_out = t if self.padding == "causal" else t - self.kernel + 1
        if t_out < 1:
            raise ShapeError(
                f"conv1d kernel {self.kernel} too long for time length {t} with padding=none"
            )
        return (t_out, self.filters)

    def init_params(self, in_shape, rng):
        _, c = in_shape
        k, f = self.kernel, self.filters
        self.params = {
            "w": _glorot(rng, k * c, k * f, (k, c, f)),
            "b": np.zeros(f),
        }

    def _windows(self, xp, t_out):
        b, _, c = xp.shape
        k = self.kernel
        s0, s1, s2 = xp.strides
        win = np.lib.stride_tricks.as_strided(
            xp, shape=(b, t_out, k, c), strides=(s0, s1, s1, s2), writeable=False
        )
        return win.reshape(b, t_out, k * c)

    def forward(self, x):
        if x.ndim != 3 or x.shape[2] != self.params["w"].shape[1]:
            raise self._shape_err(x.shape, f"(batch, time, {self.params['w'].shape[1]})")
        k = self.kernel
        xp = np.pad(x, ((0, 0), (k - 1, 0), (0, 0))) if self.padding == "causal" else x
        t_out = x.shape[1] if self.padding == "causal" else x.shape[1] - k + 1
        if t_out < 1:
            raise self._shape_err(x.shape, f"time length >= {k}")
        cols = self._windows(xp, t_out)
        w2 = self.params["w"].reshape(k * x.shape[2], self.filters)
        y = cols @ w2 + self.params["b"]
        return y, (cols, x.shape)

    def backward(self, grad_out, cache):
        cols, x_shape = cache
        b, t_in, c = x_shape
        k = self.kernel
        w = self.params["w"]
        t_out = grad_out.shape[1]
        g2 = grad_out.reshape(b * t_out, self.filters)
        grad_w = (cols.reshape(b * t_out, k * c).T @ g2).reshape(k, c, self.filters)
        grad_b = g2.sum(axis=0)
        pad_len = t_in + (k - 1 if self.padding == "causal" else 0)
        grad_xp = np.zeros((b, pad_len, c))
        for j in range(k):
            grad_xp[:, j : j + t_out, :] += grad_out @ w[j].T
        grad_x = grad_xp[:, k - 1 :, :] if self.padding == "causal" else grad_xp
        return grad_x, {"w": grad_w, "b": grad_b}


class Dense(Layer):
    def __init__(self, spec):
        super().__init__(spec)
        self.units = spec.options["units"]

    def out_shape(self, in_shape):
        if len(in_shape) != 1:
            raise self._shape_err(in_shape, "(features,)")
        return (self.units,)

    def init_params(self, in_shape, rng):
        (f,) = in_shape
        self.params = {
            "w": _glorot(rng, f, self.units, (f, self.units)),
            "b": np.zeros(self.units),
        }

    def forward(self, x):
        if x.ndim != 2 or x.shape[1] != self.params["w"].shape[0]:
            raise self._shape_err(x.shape, f"(batch, {self.params['w'].shape[0]})")
        return x @ self.params["w"] + self.params["b"], x

    def backward(self, grad_out, cache):
        x = cache
        return (
            grad_out @ self.params["w"].T,
            {"w": x.T @ grad_out, "b": grad_out.sum(axis=0)},
        )


class LeakyReLU(Layer):
    def out_shape(self, in_shape):
        return in_shape

    def forward(self, x):
        pos = x > 0  # x == 0 takes the negative-slope branch
        return np.where(pos, x, LEAKY_SLOPE * x), pos

    def backward(self, grad_out, cache):
        pos = cache
        return np.where(pos, grad_out, LEAKY_SLOPE * grad_out), {}


class Sigmoid(Layer):
    def out_shape(self, in_shape):
        return in_shape

    def forward(self, x):
        y = np.empty_like(x)
        pos = x >= 0
        y[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
        ex = np.exp(x[~pos])
        y[~pos] = ex / (1.0 + ex)
        return y, y

    def backward(self, grad_out, cache):
        y = cache
        return grad_out * y * (1.0 - y), {}


class Linear(Layer):
    """Identity activation; exists so architectures can state a linear output."""

    def out_shape(self, in_shape):
        return in_shape

    def forward(self, x):
        return x, None

    def backward(self, grad_out, cache):
        return grad_out, {}


class MaxPool1D(Layer):
    def __init__(self, spec):
        super().__init__(spec)
        self.factor = spec.options["factor"]

    def out_shape(self, in_shape):
        if len(in_shape) != 2:
            raise self._shape_err(in_shape, "(time, channels)")
        t, c = in_shape
        if t < self.factor:
            raise ShapeError(f"maxpool1d factor {self.factor} exceeds time length {t}")
        return (t // self.factor, c)

    def forward(self, x):
        if x.ndim != 3:
            raise self._shape_err(x.shape, "(batch, time, channels)")
        b, t, c = x.shape
        t_out = t // self.factor
        if t_out < 1:
            raise self._shape_err(x.shape, f"time length >= {self.factor}")
        xt = x[:, : t_out * self.factor, :].reshape(b, t_out, self.factor, c)
        idx = np.argmax(xt, axis=2)  # first max wins on ties
        y = np.take_along_axis(xt, idx[:, :, None, :], axis=2)[:, :, 0, :]
        return y, (idx, x.shape)

    def backward(self, grad_out, cache):
        idx, x_shape = cache
        b, t, c = x_shape
        t_out = grad_out.shape[1]
        grad_blocks = np.zeros((b, t_out, self.factor, c))
        np.put_along_axis(grad_blocks, idx[:, :, None, :], grad_out[:, :, None, :], axis=2)
        grad_x = np.zeros(x_shape)
        grad_x[:, : t_out * self.factor, :] = grad_blocks.reshape(b, t_out * self.factor, c)
        return grad_x, {}


class Upsample1D(Layer):
    """Nearest-neighbor repetition along the time axis."""

    def __init__(self, spec):
        super().__init__(spec)
        self.factor = spec.options["factor"]

    def out_shape(self, in_shape):
        if len(in_shape) != 2:
            raise self._shape_err(in_shape, "(time, channels)")
        t, c = in_shape
        return (t * self.factor, c)

    def forward(self, x):
        if x.ndim != 3:
            raise self._shape_err(x.shape, "(batch, time, channels)")
        return np.repeat(x, self.factor, axis=1), x.shape

    def backward(self, grad_out, cache):
        b, t, c = cache
        return grad_out.reshape(b, t, self.factor, c).sum(axis=2), {}


class Flatten(Layer):
    def out_shape(self, in_shape):
        if len(in_shape) != 2:
            raise self._shape_err(in_shape, "(time, channels)")
        return (in_shape[0] * in_shape[1],)

    def forward(self, x):
        if x.ndim != 3:
            raise self._shape_err(x.shape, "(batch, time, channels)")
        return x.reshape(x.shape[0], -1), x.shape

    def backward(self, grad_out, cache):
        return grad_out.reshape(cache), {}


_LAYER_CLASSES = {
    "conv1d": Conv1D,
    "dense": Dense,
    "leaky_relu": LeakyReLU,
    "sigmoid": Sigmoid,
    "linear": Linear,
    "maxpool1d": MaxPool1D,
    "upsample1d": Upsample1D,
    "flatten": Flatten,
}


def build_layer(spec):
    try:
        cls = _LAYER_CLASSES[spec.kind]
    except KeyError:
        raise ConfigError(f"unknown layer kind {spec.kind!r}") from None
    return cls(spec)
