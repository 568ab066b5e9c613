"""Finite-difference validation of backward passes."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .core import iter_params, zero_grads


@dataclass
class GradCheckReport:
    max_rel_error: float
    per_layer_type: dict = field(default_factory=dict)
    n_checked: int = 0

    def passed(self, tolerance: float) -> bool:
        return self.max_rel_error < tolerance


def _rel_error(a, n, floor):
    return abs(a - n) / max(abs(a), abs(n), floor)


def grad_check(network, x, tolerance=None, n_samples=200, h=1e-5, seed=0,
               floor=1e-7, check_input=True) -> GradCheckReport:
    """Compare analytic gradients against central differences.

    The scalar objective is ``sum(r * network(x))`` for a fixed Gaussian
    ``r``. For each layer type, ``n_samples`` parameter entries (or all of
    them, if fewer) are perturbed by ``+-h``. Relative errors use
    ``max(|analytic|, |numeric|, floor)`` as denominator so that entries
    with vanishing gradient are judged on an absolute scale.
    ``tolerance`` is informational; use ``report.passed(tol)``.
    """
    rng = np.random.default_rng(seed)
    y = network.forward(x)
    r = rng.standard_normal(y.shape)

    def objective():
        return float(np.sum(r * network.forward(x)))

    zero_grads(network)
    network.forward(x)
    dx = network.backward(r.astype(y.dtype))

    by_type = defaultdict(list)
    for name, layer, key in iter_params(network):
        by_type[type(layer).__name__].append((layer, key))

    errors = {}
    total = 0
    for type_name, entries in by_type.items():
        index = [(e, i) for e, (layer, key) in enumerate(entries)
                 for i in range(layer.params[key].size)]
        if len(index) > n_samples:
            pick = rng.choice(len(index), size=n_samples, replace=False)
            index = [index[p] for p in sorted(pick)]
        worst = 0.0
        for e, i in index:
            layer, key = entries[e]
            p = layer.params[key].reshape(-1)
            old = p[i]
            p[i] = old + h
            up = objective()
            p[i] = old - h
            down = objective()
            p[i] = old
            numeric = (up - down) / (2 * h)
            analytic = float(layer.grads[key].reshape(-1)[i])
            worst = max(worst, _rel_error(analytic, numeric, floor))
        errors[type_name] = worst
        total += len(index)

    if check_input:
        flat = x.reshape(-1)
        picks = rng.choice(flat.size, size=min(n_samples, flat.size), replace=False)
        worst = 0.0
        for i in picks:
            old = flat[i]
            flat[i] = old + h
            up = objective()
            flat[i] = old - h
            down = objective()
            flat[i] = old
            worst = max(worst, _rel_error(float(dx.reshape(-1)[i]), (up - down) / (2 * h), floor))
        errors["input"] = worst
        total += len(picks)

    return GradCheckReport(max(errors.values()), errors, total)
