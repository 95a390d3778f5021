"""Finite-difference verification of analytic gradients."""

import numpy as np


def grad_check(net, batch, loss_fn, h=1e-4, max_params=400, seed=0):
    """Max relative error between analytic and central-difference gradients.

    ``loss_fn`` maps the network output to (scalar loss, upstream gradient).
    Up to ``max_params`` parameter entries are sampled (all of them for small
    nets). The relative error of entry i is
    ``|analytic - numeric| / (|analytic| + |numeric| + 1e-12)``.
    """
    out = net.forward(batch)
    _, upstream = loss_fn(out)
    grads = net.backward(upstream)
    params = net.parameters()

    entries = []
    for key in sorted(params.keys()):
        for flat_idx in range(params[key].size):
            entries.append((key, flat_idx))
    if len(entries) > max_params:
        rng = np.random.default_rng(seed)
        pick = rng.choice(len(entries), size=max_params, replace=False)
        entries = [entries[i] for i in pick]

    worst = 0.0
    for key, flat_idx in entries:
        arr = params[key]
        orig = arr.flat[flat_idx]
        arr.flat[flat_idx] = orig + h
        lp, _ = loss_fn(net.forward(batch))
        arr.flat[flat_idx] = orig - h
        lm, _ = loss_fn(net.forward(batch))
        arr.flat[flat_idx] = orig
        numeric = (lp - lm) / (2.0 * h)
        analytic = grads[key].flat[flat_idx]
        err = abs(analytic - numeric) / (abs(analytic) + abs(numeric) + 1e-12)
        worst = max(worst, err)
    return worst
