"""Hot numeric kernels: pairwise channel gains and interference sums.

Two interchangeable backends are provided. The default compiles the inner
loops with numba's @njit; setting the environment variable
``IACRSIM_BACKEND=numpy`` (or running without numba installed) selects a
pure-numpy fallback. Both backends are exposed through ``IMPLEMENTATIONS``
so the benchmark script can time them side by side.
"""

import os

import numpy as np

_requested = os.environ.get("IACRSIM_BACKEND", "numba").strip().lower()

try:
    from numba import njit

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - exercised via IACRSIM_BACKEND=numpy
    _HAVE_NUMBA = False

USE_NUMBA = _HAVE_NUMBA and _requested != "numpy"


# ---------------------------------------------------------------------------
# pure-numpy implementations

def _pairwise_gains_np(xs, ys, alpha):
    """Channel gain matrix g[i, j] = d(i, j)^-alpha with zero diagonal."""
    dx = xs[:, None] - xs[None, :]
    dy = ys[:, None] - ys[None, :]
    d = np.sqrt(dx * dx + dy * dy)
    np.fill_diagonal(d, np.inf)
    return d ** (-alpha)


def _interference_vector_np(gains, rx_ids, tx_ids, tx_powers):
    """Aggregate interference at each receiver from the given transmitters.

    A transmitter contributes nothing at its own position (a node does not
    interfere with itself as a receiver).
    """
    out = np.zeros(len(rx_ids))
    for r in range(len(rx_ids)):
        rx = rx_ids[r]
        total = 0.0
        for k in range(len(tx_ids)):
            if tx_ids[k] == rx:
                continue
            total += tx_powers[k] * gains[rx, tx_ids[k]]
        out[r] = total
    return out


def _aggregate_single_np(gains, rx, tx_ids, tx_powers, skip_a, skip_b):
    """Interference sum at one receiver, skipping two excluded node ids."""
    total = 0.0
    for k in range(len(tx_ids)):
        t = tx_ids[k]
        if t == skip_a or t == skip_b or t == rx:
            continue
        total += tx_powers[k] * gains[rx, t]
    return total


# ---------------------------------------------------------------------------
# numba implementations

if _HAVE_NUMBA:

    @njit(cache=True)
    def _pairwise_gains_nb(xs, ys, alpha):
        n = xs.shape[0]
        g = np.zeros((n, n))
        for i in range(n):
            for j in range(n):
                if i == j:
                    continue
                dx = xs[i] - xs[j]
                dy = ys[i] - ys[j]
                d = np.sqrt(dx * dx + dy * dy)
                g[i, j] = d ** (-alpha)
        return g

    @njit(cache=True)
    def _interference_vector_nb(gains, rx_ids, tx_ids, tx_powers):
        out = np.zeros(len(rx_ids))
        for r in range(len(rx_ids)):
            rx = rx_ids[r]
            total = 0.0
            for k in range(len(tx_ids)):
                if tx_ids[k] == rx:
                    continue
                total += tx_powers[k] * gains[rx, tx_ids[k]]
            out[r] = total
        return out

    @njit(cache=True)
    def _aggregate_single_nb(gains, rx, tx_ids, tx_powers, skip_a, skip_b):
        total = 0.0
        for k in range(len(tx_ids)):
            t = tx_ids[k]
            if t == skip_a or t == skip_b or t == rx:
                continue
            total += tx_powers[k] * gains[rx, t]
        return total


IMPLEMENTATIONS = {
    "numpy": {
        "pairwise_gains": _pairwise_gains_np,
        "interference_vector": _interference_vector_np,
        "aggregate_single": _aggregate_single_np,
    }
}
if _HAVE_NUMBA:
    IMPLEMENTATIONS["numba"] = {
        "pairwise_gains": _pairwise_gains_nb,
        "interference_vector": _interference_vector_nb,
        "aggregate_single": _aggregate_single_nb,
    }

BACKEND = "numba" if USE_NUMBA else "numpy"

pairwise_gains = IMPLEMENTATIONS[BACKEND]["pairwise_gains"]
interference_vector = IMPLEMENTATIONS[BACKEND]["interference_vector"]
aggregate_single = IMPLEMENTATIONS[BACKEND]["aggregate_single"]
