"""Forward/backward pairs for the transformer building blocks.

Each ``*_fwd`` returns ``(output, cache)``; the matching ``*_back`` takes
the upstream gradient and the cache, adds parameter gradients into the
``grads`` dict under the same prefix and returns input gradients.  All
inputs are single sequences shaped ``(n, d)``.
"""

import math

import numpy as np

LN_EPS = 1e-5
_GELU_C = math.sqrt(2.0 / math.pi)


def softmax(x, axis=-1):
    z = x - x.max(axis=axis, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=axis, keepdims=True)


def log_softmax(x, axis=-1):
    z = x - x.max(axis=axis, keepdims=True)
    return z - np.log(np.exp(z).sum(axis=axis, keepdims=True))


def layer_norm_fwd(x, p, pre):
    g, b = p[pre + ".g"], p[pre + ".b"]
    mu = x.mean(-1, keepdims=True)
    xc = x - mu
    rstd = 1.0 / np.sqrt((xc * xc).mean(-1, keepdims=True) + LN_EPS)
    xh = xc * rstd
    return xh * g + b, (xh, rstd, g, pre)


def layer_norm_back(dy, cache, grads):
    xh, rstd, g, pre = cache
    grads[pre + ".g"] += (dy * xh).sum(0)
    grads[pre + ".b"] += dy.sum(0)
    dxh = dy * g
    return rstd * (dxh - dxh.mean(-1, keepdims=True) - xh * (dxh * xh).mean(-1, keepdims=True))


def gelu_fwd(x):
    t = np.tanh(_GELU_C * (x + 0.044715 * x**3))
    return 0.5 * x * (1.0 + t), (x, t)


def gelu_back(dy, cache):
    x, t = cache
    du = _GELU_C * (1.0 + 3 * 0.044715 * x * x)
    return dy * (0.5 * (1.0 + t) + 0.5 * x * (1.0 - t * t) * du)


def ffn_fwd(x, p, pre):
    h = x @ p[pre + ".w1"] + p[pre + ".b1"]
    a, gcache = gelu_fwd(h)
    return a @ p[pre + ".w2"] + p[pre + ".b2"], (x, a, gcache, pre)


def ffn_back(dy, cache, p, grads):
    x, a, gcache, pre = cache
    grads[pre + ".w2"] += a.T @ dy
    grads[pre + ".b2"] += dy.sum(0)
    dh = gelu_back(dy @ p[pre + ".w2"].T, gcache)
    grads[pre + ".w1"] += x.T @ dh
    grads[pre + ".b1"] += dh.sum(0)
    return dh @ p[pre + ".w1"].T


def _split(x, h):
    n, d = x.shape
    return x.reshape(n, h, d // h).transpose(1, 0, 2)


def _merge(x):
    h, n, dh = x.shape
    return x.transpose(1, 0, 2).reshape(n, h * dh)


def attention_fwd(xq, xkv, p, pre, n_heads, causal=False):
    """Multi-head scaled dot-product attention of ``xq`` over ``xkv``."""
    q = _split(xq @ p[pre + ".wq"] + p[pre + ".bq"], n_heads)
    # no key bias: it shifts every score in a row equally and cancels in the softmax
    k = _split(xkv @ p[pre + ".wk"], n_heads)
    v = _split(xkv @ p[pre + ".wv"] + p[pre + ".bv"], n_heads)
    scale = 1.0 / math.sqrt(q.shape[-1])
    s = (q @ k.transpose(0, 2, 1)) * scale
    if causal:
        nq, nk = s.shape[1:]
        s = np.where(np.tri(nq, nk, dtype=bool), s, -np.inf)
    a = softmax(s)
    o = _merge(a @ v)
    out = o @ p[pre + ".wo"] + p[pre + ".bo"]
    return out, (xq, xkv, q, k, v, a, o, scale, n_heads, pre)


def attention_back(dout, cache, p, grads):
    xq, xkv, q, k, v, a, o, scale, n_heads, pre = cache
    grads[pre + ".wo"] += o.T @ dout
    grads[pre + ".bo"] += dout.sum(0)
    do = _split(dout @ p[pre + ".wo"].T, n_heads)
    da = do @ v.transpose(0, 2, 1)
    dv = a.transpose(0, 2, 1) @ do
    ds = a * (da - (da * a).sum(-1, keepdims=True)) * scale
    dq = _merge(ds @ k)
    dk = _merge(ds.transpose(0, 2, 1) @ q)
    dv = _merge(dv)
    grads[pre + ".wq"] += xq.T @ dq
    grads[pre + ".bq"] += dq.sum(0)
    grads[pre + ".wk"] += xkv.T @ dk
    grads[pre + ".wv"] += xkv.T @ dv
    grads[pre + ".bv"] += dv.sum(0)
    dxq = dq @ p[pre + ".wq"].T
    dxkv = dk @ p[pre + ".wk"].T + dv @ p[pre + ".wv"].T
    return dxq, dxkv


def cross_entropy(logits, targets):
    """Summed NLL of ``targets`` under row-wise softmax and its logit gradient."""
    lp = log_softmax(logits)
    rows = np.arange(len(targets))
    nll = -lp[rows, targets].sum()
    d = np.exp(lp)
    d[rows, targets] -= 1.0
    return float(nll), d
