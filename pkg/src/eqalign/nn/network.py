"""Feed-forward network: an ordered layer stack with a backward tape.

``forward`` records a tape of per-layer caches; ``backward`` consumes a tape
(the most recent one by default) and returns a :class:`Gradients` bundle with
one entry per parameter plus the gradient with respect to the input batch.
Several tapes from the same network may be alive at once (needed when a loss
routes a batch through the same aligner twice), in which case callers pass
the tapes back explicitly.

A network with its tape is single-threaded; distinct instances can train in
parallel.
"""

import json

import numpy as np

from ..errors import ShapeError, UsageError
from .layers import LayerSpec, build_layer

CHECKPOINT_FORMAT_VERSION = 1


class Gradients:
    """Parameter gradients keyed by (layer_index, param_name), plus the
    gradient with respect to the network input."""

    def __init__(self, by_param, wrt_input):
        self.by_param = by_param
        self.wrt_input = wrt_input

    def __getitem__(self, key):
        return self.by_param[key]

    def keys(self):
        return self.by_param.keys()

    def add(self, other, scale=1.0):
        """In-place accumulate ``scale * other`` (parameter grads only)."""
        for key, g in other.by_param.items():
            if key in self.by_param:
                self.by_param[key] = self.by_param[key] + scale * g
            else:
                self.by_param[key] = scale * g
        return self

    def scaled(self, scale):
        return Gradients(
            {k: scale * g for k, g in self.by_param.items()},
            None if self.wrt_input is None else scale * self.wrt_input,
        )

    def max_abs(self):
        vals = [np.max(np.abs(g)) for g in self.by_param.values() if g.size]
        return max(vals) if vals else 0.0

    def is_finite(self):
        return all(np.all(np.isfinite(g)) for g in self.by_param.values())


class Tape:
    __slots__ = ("caches", "output_shape", "consumed")

    def __init__(self, caches, output_shape):
        self.caches = caches
        self.output_shape = output_shape
        self.consumed = False


class Network:
    """Static layer stack over a fixed input shape.

    Parameters
    ----------
    specs : list of LayerSpec
    input_shape : tuple
        Per-sample shape, (time, channels) for convolutional stacks or
        (features,) for pure dense stacks.
    seed : int
        Seeds the Glorot-uniform weight init; biases start at zero.
    """

    def __init__(self, specs, input_shape, seed=0):
        self.specs = list(specs)
        self.input_shape = tuple(int(v) for v in input_shape)
        self.seed = int(seed)
        self.layers = [build_layer(s) for s in self.specs]
        rng = np.random.default_rng(seed)
        shape = self.input_shape
        self.layer_shapes = [shape]
        for i, layer in enumerate(self.layers):
            try:
                layer.init_params(shape, rng)
                shape = layer.out_shape(shape)
            except ShapeError as exc:
                raise ShapeError(f"layer {i} ({layer.spec.kind}): {exc}") from None
            self.layer_shapes.append(shape)
        self.output_shape = shape
        self.step_count = 0
        self._tape = None

    # -- parameters ---------------------------------------------------------

    def parameters(self):
        """Live parameter arrays keyed by (layer_index, name). Mutating the
        returned arrays updates the network."""
        out = {}
        for i, layer in enumerate(self.layers):
            for name, arr in layer.params.items():
                out[(i, name)] = arr
        return out

    def set_parameters(self, values):
        for (i, name), arr in values.items():
            self.layers[i].params[name] = np.array(arr, dtype=float)

    def copy_parameters(self):
        return {k: v.copy() for k, v in self.parameters().items()}

    def num_params(self):
        return sum(v.size for v in self.parameters().values())

    def params_hash(self):
        """Order-stable fingerprint of all parameter bytes."""
        import hashlib

        h = hashlib.sha256()
        for key in sorted(self.parameters().keys()):
            h.update(np.ascontiguousarray(self.parameters()[key]).tobytes())
        return h.hexdigest()

    # -- execution ----------------------------------------------------------

    def forward(self, x, want_tape=False):
        """Run the batch through the stack.

        Caches intermediates so a subsequent :meth:`backward` can run. With
        ``want_tape=True`` the tape is returned alongside the output so
        several live tapes can coexist.
        """
        x = np.asarray(x, dtype=float)
        if x.shape[1:] != self.input_shape:
            raise ShapeError(
                f"network expects per-sample shape {self.input_shape}, got {x.shape[1:]}"
            )
        caches = [("input", x.shape)]
        out = x
        for i, layer in enumerate(self.layers):
            try:
                out, cache = layer.forward(out)
            except ShapeError as exc:
                raise ShapeError(f"layer {i} ({layer.spec.kind}): {exc}") from None
            caches.append(cache)
        tape = Tape(caches, out.shape)
        self._tape = tape
        if want_tape:
            return out, tape
        return out

    def backward(self, upstream, tape=None):
        """Backpropagate ``upstream`` (gradient of a scalar loss with respect
        to the network output) through the given tape (default: the most
        recent forward). Each tape may be consumed once."""
        if tape is None:
            tape = self._tape
        if tape is None:
            raise UsageError("backward called before forward (no tape)")
        if tape.consumed:
            raise UsageError("tape already consumed by a previous backward")
        upstream = np.asarray(upstream, dtype=float)
        if upstream.shape != tape.output_shape:
            raise ShapeError(
                f"upstream shape {upstream.shape} does not match output shape {tape.output_shape}"
            )
        tape.consumed = True
        by_param = {}
        grad = upstream
        for i in range(len(self.layers) - 1, -1, -1):
            layer = self.layers[i]
            grad, pgrads = layer.backward(grad, tape.caches[i + 1])
            for name, g in pgrads.items():
                by_param[(i, name)] = g
        for i, layer in enumerate(self.layers):
            for name, arr in layer.params.items():
                if (i, name) not in by_param:
                    by_param[(i, name)] = np.zeros_like(arr)
        return Gradients(by_param, grad)

    # -- persistence --------------------------------------------------------

    def save(self, path):
        """Write a checkpoint: layer specs + parameters + seed + step count.

        The file is a ``.npz`` archive holding one float64 array per
        parameter (key ``p<layer>.<name>``) and a JSON header under ``meta``;
        see docs/formats.md for the exact layout. Round-trip is lossless.
        """
        meta = {
            "format_version": CHECKPOINT_FORMAT_VERSION,
            "input_shape": list(self.input_shape),
            "seed": self.seed,
            "step_count": self.step_count,
            "layers": [s.to_dict() for s in self.specs],
        }
        arrays = {
            f"p{idx}.{name}": arr for (idx, name), arr in self.parameters().items()
        }
        with open(path, "wb") as fh:
            np.savez(fh, meta=np.frombuffer(
                json.dumps(meta, sort_keys=True).encode(), dtype=np.uint8
            ), **arrays)

    @staticmethod
    def load(path):
        with np.load(path) as data:
            meta = json.loads(bytes(data["meta"]).decode())
            if meta.get("format_version") != CHECKPOINT_FORMAT_VERSION:
                raise UsageError(
                    f"unsupported checkpoint format version {meta.get('format_version')}"
                )
            specs = [LayerSpec.from_dict(d) for d in meta["layers"]]
            net = Network(specs, tuple(meta["input_shape"]), seed=meta["seed"])
            net.step_count = meta["step_count"]
            for key in data.files:
                if not key.startswith("p"):
                    continue
                idx_s, name = key[1:].split(".", 1)
                net.layers[int(idx_s)].params[name] = data[key].astype(float)
        return net
