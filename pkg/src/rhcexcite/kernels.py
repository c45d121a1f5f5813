"""Hot numeric kernels with a numba path and a pure-numpy fallback.

Both implementations are always importable. ``ACTIVE`` is the one picked by
the ``RHCEXCITE_BACKEND`` environment flag; the rest of the package only
calls through it.
"""

import math
from types import SimpleNamespace

import numpy as np

from ._backend import BACKEND, HAS_NUMBA, njit

METRICS = {"euclidean": 0, "cityblock": 1, "chebyshev": 2}

# Rows of X per broadcast block in the numpy path; bounds temporary memory.
_CHUNK = 512


# ---------------------------------------------------------------------------
# scalar-loop kernels (compiled by numba)


def _pair_dist(A, i, B, o, metric):
    # Euclidean returns the SQUARED distance: sqrt is monotone and correctly
    # rounded, so sqrt(min d^2) == min sqrt(d^2) and only one sqrt is needed.
    # Rows are indexed rather than sliced; slices allocate views inside numba.
    s = 0.0
    if metric == 0:
        for c in range(A.shape[1]):
            d = A[i, c] - B[o, c]
            s += d * d
        return s
    if metric == 1:
        for c in range(A.shape[1]):
            s += abs(A[i, c] - B[o, c])
        return s
    for c in range(A.shape[1]):
        d = abs(A[i, c] - B[o, c])
        if d > s:
            s = d
    return s


def _make_loop_kernels(dist):
    def nn_min_dist(psi, X, metric):
        out = np.empty(psi.shape[0])
        for j in range(psi.shape[0]):
            m = np.inf
            for o in range(X.shape[0]):
                d = dist(psi, j, X, o, metric)
                if d < m:
                    m = d
            out[j] = math.sqrt(m) if metric == 0 else m
        return out

    def weighted_sum(q, d):
        s = 0.0
        for j in range(q.shape[0]):
            s += q[j] * d[j]
        return s

    def horizon_cost(psi, q, base_min, Z, metric):
        s = 0.0
        for j in range(psi.shape[0]):
            m = np.inf
            for o in range(Z.shape[0]):
                d = dist(psi, j, Z, o, metric)
                if d < m:
                    m = d
            if metric == 0:
                m = math.sqrt(m)
            if base_min[j] < m:
                m = base_min[j]
            s += q[j] * m
        return s

    return nn_min_dist, weighted_sum, horizon_cost


def _arx_simulate(a, b, y0, u):
    y = np.empty(u.shape[0] + 1)
    y[0] = y0
    for i in range(u.shape[0]):
        y[i + 1] = a * y[i] + b * u[i]
    return y


# ---------------------------------------------------------------------------
# vectorized numpy kernels


def _pairwise(psi, X, metric):
    diff = psi[:, None, :] - X[None, :, :]
    if metric == 0:
        return np.sqrt(np.sum(diff * diff, axis=-1))
    if metric == 1:
        return np.sum(np.abs(diff), axis=-1)
    return np.max(np.abs(diff), axis=-1)


def _nn_min_dist_np(psi, X, metric):
    out = np.full(psi.shape[0], np.inf)
    for start in range(0, X.shape[0], _CHUNK):
        block = _pairwise(psi, X[start : start + _CHUNK], metric)
        np.minimum(out, block.min(axis=1), out=out)
    return out


def _weighted_sum_np(q, d):
    return float(np.dot(q, d))


def _horizon_cost_np(psi, q, base_min, Z, metric):
    m = np.minimum(base_min, _pairwise(psi, Z, metric).min(axis=1))
    return float(np.dot(q, m))


# ---------------------------------------------------------------------------
# simulated-annealing chain over one receding horizon


def _make_sa_chain(horizon_cost, jit):
    @jit
    def evaluate(cand, u_lo, u_hi, y_k, a, b, box_lo, box_hi, offset, scale,
                 psi, q, base_min, metric, Z):
        # Z is scratch space (L, 2) for the normalized horizon points.
        y = y_k
        for i in range(cand.shape[0]):
            u = cand[i]
            if not (u_lo <= u <= u_hi):
                return np.inf, False
            if not (math.isfinite(y) and box_lo[0] <= u <= box_hi[0]
                    and box_lo[1] <= y <= box_hi[1]):
                return np.inf, False
            Z[i, 0] = (u - offset[0]) / scale[0]
            Z[i, 1] = (y - offset[1]) / scale[1]
            y = a * y + b * u
        return horizon_cost(psi, q, base_min, Z, metric), True

    def sa_chain(start, u_lo, u_hi, y_k, a, b, box_lo, box_hi, offset, scale,
                 psi, q, base_min, metric, temperature, cooling, levels, iters,
                 step, slots, noise, coins):
        L = start.shape[0]
        Z = np.empty((L, 2))
        cur = start.copy()
        cur_j, cur_f = evaluate(cur, u_lo, u_hi, y_k, a, b, box_lo, box_hi,
                                offset, scale, psi, q, base_min, metric, Z)
        best = cur.copy()
        best_j = cur_j
        best_f = cur_f
        prop = cur.copy()
        history = np.empty(levels * iters)
        accepted = 0
        rejected = 0
        t = temperature
        it = 0
        for _ in range(levels):
            for _ in range(iters):
                for i in range(L):
                    prop[i] = cur[i]
                s = slots[it]
                v = cur[s] + step * noise[it]
                if v < u_lo:
                    v = u_lo
                elif v > u_hi:
                    v = u_hi
                prop[s] = v
                pj, pf = evaluate(prop, u_lo, u_hi, y_k, a, b, box_lo, box_hi,
                                  offset, scale, psi, q, base_min, metric, Z)
                if not pf:
                    rejected += 1
                else:
                    delta = pj - cur_j
                    if delta <= 0.0 or coins[it] < math.exp(-delta / t):
                        for i in range(L):
                            cur[i] = prop[i]
                        cur_j = pj
                        accepted += 1
                        if pj < best_j:
                            for i in range(L):
                                best[i] = prop[i]
                            best_j = pj
                            best_f = True
                history[it] = cur_j
                it += 1
            t *= cooling
        return best, best_j, best_f, accepted, rejected, history

    return sa_chain


def _build_numpy():
    return SimpleNamespace(
        name="numpy",
        nn_min_dist=_nn_min_dist_np,
        weighted_sum=_weighted_sum_np,
        horizon_cost=_horizon_cost_np,
        arx_simulate=_arx_simulate,
        sa_chain=_make_sa_chain(_horizon_cost_np, lambda f: f),
    )


def _build_numba():
    nn_min_dist, weighted_sum, horizon_cost = _make_loop_kernels(njit(_pair_dist))
    horizon_cost = njit(horizon_cost)
    return SimpleNamespace(
        name="numba",
        nn_min_dist=njit(nn_min_dist),
        weighted_sum=njit(weighted_sum),
        horizon_cost=horizon_cost,
        arx_simulate=njit(_arx_simulate),
        sa_chain=njit(_make_sa_chain(horizon_cost, njit)),
    )


NUMPY = _build_numpy()
NUMBA = _build_numba() if HAS_NUMBA else None
ACTIVE = NUMBA if BACKEND == "numba" else NUMPY


def get(backend=None):
    """Return the kernel namespace for ``backend`` (default: active one)."""
    if backend is None:
        return ACTIVE
    if backend == "numpy":
        return NUMPY
    if backend == "numba":
        if NUMBA is None:
            raise RuntimeError("numba backend requested but numba is not installed")
        return NUMBA
    raise ValueError(f"unknown backend {backend!r}")
