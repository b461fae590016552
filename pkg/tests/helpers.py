"""Shared test utilities: finite differences and the acceptance log."""

import numpy as np

from forageq import nn

ACCEPTANCE_LINES: list[str] = []


def record_acceptance(name: str, ok: bool, detail: str) -> bool:
    """Collect one PASS/FAIL line; echoed live and in the summary."""
    line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line, flush=True)
    return ok


def scalar_loss(spec, params, x, mix):
    """Deterministic scalar probe: sum of outputs weighted by a fixed mix."""
    return float(np.sum(nn.forward(spec, params, x) * mix))


def analytic_grads(spec, params, x, mix):
    out, cache = nn.forward(spec, params, x, want_cache=True)
    return nn.backward(spec, params, cache, mix.astype(out.dtype))


def numeric_grads(spec, params, x, mix, h=1e-5):
    """Central finite differences over every parameter entry."""
    grads = {}
    for name, value in params.items():
        g = np.zeros_like(value)
        flat = value.reshape(-1)
        gf = g.reshape(-1)
        for i in range(flat.size):
            orig = flat[i]
            flat[i] = orig + h
            up = scalar_loss(spec, params, x, mix)
            flat[i] = orig - h
            down = scalar_loss(spec, params, x, mix)
            flat[i] = orig
            gf[i] = (up - down) / (2.0 * h)
        grads[name] = g
    return grads


def max_rel_error(analytic, numeric, floor=1e-8):
    """Worst elementwise relative disagreement across all parameters."""
    worst = 0.0
    for name in analytic:
        a = analytic[name].reshape(-1)
        n = numeric[name].reshape(-1)
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst
