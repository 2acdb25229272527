"""Gated recurrent unit with explicit forward and backward passes.

Gates, for input x_t and previous state h_{t-1} (zero initial state):

    z_t = sigmoid(Wz x_t + Uz h_{t-1} + bz)
    r_t = sigmoid(Wr x_t + Ur h_{t-1} + br)
    c_t = tanh(Wh x_t + Uh (r_t * h_{t-1}) + bh)
    h_t = (1 - z_t) * h_{t-1} + z_t * c_t

The bidirectional wrapper runs an independently parameterized copy over
the reversed sequence and reports its states aligned to input positions,
so backward_states[0] is the final state of the reverse scan.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def _sigmoid(z: np.ndarray) -> np.ndarray:
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    expz = np.exp(z[~pos])
    out[~pos] = expz / (1.0 + expz)
    return out


@dataclass
class GRUParams:
    w_z: np.ndarray  # hidden x input
    u_z: np.ndarray  # hidden x hidden
    b_z: np.ndarray  # hidden
    w_r: np.ndarray
    u_r: np.ndarray
    b_r: np.ndarray
    w_h: np.ndarray
    u_h: np.ndarray
    b_h: np.ndarray

    @property
    def hidden(self) -> int:
        return self.w_z.shape[0]

    def zeros_like(self) -> "GRUParams":
        return GRUParams(
            **{name: np.zeros_like(getattr(self, name)) for name in GRU_BLOCK_NAMES}
        )


GRU_BLOCK_NAMES = ("w_z", "u_z", "b_z", "w_r", "u_r", "b_r", "w_h", "u_h", "b_h")


@dataclass
class GRUCache:
    xs: np.ndarray  # T x input
    z: np.ndarray  # T x hidden
    r: np.ndarray
    c: np.ndarray
    h: np.ndarray


def gru_forward(params: GRUParams, xs: np.ndarray) -> GRUCache:
    steps = xs.shape[0]
    hidden = params.hidden
    z = np.zeros((steps, hidden))
    r = np.zeros((steps, hidden))
    c = np.zeros((steps, hidden))
    h = np.zeros((steps, hidden))
    h_prev = np.zeros(hidden)
    for t in range(steps):
        x = xs[t]
        z[t] = _sigmoid(params.w_z @ x + params.u_z @ h_prev + params.b_z)
        r[t] = _sigmoid(params.w_r @ x + params.u_r @ h_prev + params.b_r)
        c[t] = np.tanh(params.w_h @ x + params.u_h @ (r[t] * h_prev) + params.b_h)
        h[t] = (1.0 - z[t]) * h_prev + z[t] * c[t]
        h_prev = h[t]
    return GRUCache(xs=xs, z=z, r=r, c=c, h=h)


def gru_backward(
    params: GRUParams, cache: GRUCache, dh: np.ndarray, grads: GRUParams
) -> np.ndarray:
    """Accumulate parameter gradients; return gradients w.r.t. the inputs.

    dh holds the externally supplied gradient at every step; recurrent
    contributions are added while walking backward.
    """
    steps = cache.xs.shape[0]
    dxs = np.zeros_like(cache.xs)
    carry = np.zeros(params.hidden)
    for t in range(steps - 1, -1, -1):
        h_prev = cache.h[t - 1] if t > 0 else np.zeros(params.hidden)
        g = dh[t] + carry
        z, r, c = cache.z[t], cache.r[t], cache.c[t]
        x = cache.xs[t]

        dz = g * (c - h_prev)
        dc = g * z
        dh_prev = g * (1.0 - z)

        da_c = dc * (1.0 - c * c)
        grads.w_h += np.outer(da_c, x)
        grads.u_h += np.outer(da_c, r * h_prev)
        grads.b_h += da_c
        d_rh = params.u_h.T @ da_c
        dr = d_rh * h_prev
        dh_prev += d_rh * r

        da_r = dr * r * (1.0 - r)
        grads.w_r += np.outer(da_r, x)
        grads.u_r += np.outer(da_r, h_prev)
        grads.b_r += da_r
        dh_prev += params.u_r.T @ da_r

        da_z = dz * z * (1.0 - z)
        grads.w_z += np.outer(da_z, x)
        grads.u_z += np.outer(da_z, h_prev)
        grads.b_z += da_z
        dh_prev += params.u_z.T @ da_z

        dxs[t] = params.w_z.T @ da_z + params.w_r.T @ da_r + params.w_h.T @ da_c
        carry = dh_prev
    return dxs


@dataclass
class BiGRUParams:
    fwd: GRUParams
    bwd: GRUParams

    def zeros_like(self) -> "BiGRUParams":
        return BiGRUParams(fwd=self.fwd.zeros_like(), bwd=self.bwd.zeros_like())


@dataclass
class BiGRUCache:
    fwd: GRUCache
    bwd: GRUCache  # computed over the reversed inputs


def bigru_forward(params: BiGRUParams, xs: np.ndarray) -> tuple[np.ndarray, np.ndarray, BiGRUCache]:
    """Returns (forward_states, backward_states) aligned to input positions."""
    fwd_cache = gru_forward(params.fwd, xs)
    bwd_cache = gru_forward(params.bwd, xs[::-1])
    return fwd_cache.h, bwd_cache.h[::-1], BiGRUCache(fwd=fwd_cache, bwd=bwd_cache)


def bigru_backward(
    params: BiGRUParams,
    cache: BiGRUCache,
    dh_fwd: np.ndarray,
    dh_bwd: np.ndarray,
    grads: BiGRUParams,
) -> np.ndarray:
    """dh_fwd / dh_bwd are position-aligned gradients for the two directions."""
    dx = gru_backward(params.fwd, cache.fwd, dh_fwd, grads.fwd)
    dx_rev = gru_backward(params.bwd, cache.bwd, dh_bwd[::-1], grads.bwd)
    return dx + dx_rev[::-1]
