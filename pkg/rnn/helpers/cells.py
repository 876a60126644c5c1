import logging
import numpy as np
from utils.helpers import make_rng

logger = logging.getLogger('mousetrust')

__all__ = ['GATES', 'init_params', 'param_names', 'recurrent_backward', 'recurrent_forward', 'sigmoid']


# Gate blocks per cell kind. Each gate g has input weights W<g> (D, H), recurrent weights U<g> (H, H) and bias b<g> (H,).
GATES = {
    'gru': ('z', 'r', 'h'),
    'lstm': ('i', 'f', 'o', 'g'),
}
READOUT = ('w_out', 'b_out')


def param_names(cell):
    names = []
    for gate in GATES[cell]:
        names += [f'W{gate}', f'U{gate}', f'b{gate}']
    return names + list(READOUT)


def param_shapes(cell, input_width, hidden_units):
    shapes = {}
    for gate in GATES[cell]:
        shapes[f'W{gate}'] = (input_width, hidden_units)
        shapes[f'U{gate}'] = (hidden_units, hidden_units)
        shapes[f'b{gate}'] = (hidden_units,)
    shapes['w_out'] = (hidden_units,)
    shapes['b_out'] = (1,)
    return shapes


# Weights uniform(-r, r) with r = 1 / sqrt(hidden units); biases start at zero
def init_params(cell, input_width, hidden_units, seed):
    rng = make_rng(seed)
    bound = 1.0 / np.sqrt(hidden_units)
    params = {}
    for name, shape in param_shapes(cell, input_width, hidden_units).items():
        if name.startswith('b'):
            params[name] = np.zeros(shape, dtype=np.float64)
        else:
            params[name] = rng.uniform(-bound, bound, shape)
    return params


# Logistic function without overflow; exactly 0.5 at 0
def sigmoid(a):
    decay = np.exp(-np.abs(a))
    return np.where(a >= 0, 1.0 / (1.0 + decay), decay / (1.0 + decay))


#-----------------------------------------------------------------------------

def _gru_step(params, x, h):
    z = sigmoid(x @ params['Wz'] + h @ params['Uz'] + params['bz'])
    r = sigmoid(x @ params['Wr'] + h @ params['Ur'] + params['br'])
    candidate = np.tanh(x @ params['Wh'] + (r * h) @ params['Uh'] + params['bh'])
    h_next = (1.0 - z) * h + z * candidate
    return h_next, (x, h, z, r, candidate)


def _gru_step_backward(params, grads, dh_next, cache):
    x, h, z, r, candidate = cache

    dz = dh_next * (candidate - h)
    dcandidate = dh_next * z
    dh = dh_next * (1.0 - z)

    da_h = dcandidate * (1.0 - candidate ** 2)
    grads['Wh'] += x.T @ da_h
    grads['Uh'] += (r * h).T @ da_h
    grads['bh'] += da_h.sum(axis=0)
    drh = da_h @ params['Uh'].T
    dr = drh * h
    dh += drh * r

    da_z = dz * z * (1.0 - z)
    grads['Wz'] += x.T @ da_z
    grads['Uz'] += h.T @ da_z
    grads['bz'] += da_z.sum(axis=0)
    dh += da_z @ params['Uz'].T

    da_r = dr * r * (1.0 - r)
    grads['Wr'] += x.T @ da_r
    grads['Ur'] += h.T @ da_r
    grads['br'] += da_r.sum(axis=0)
    dh += da_r @ params['Ur'].T
    return dh


def _lstm_step(params, x, h, c):
    i = sigmoid(x @ params['Wi'] + h @ params['Ui'] + params['bi'])
    f = sigmoid(x @ params['Wf'] + h @ params['Uf'] + params['bf'])
    o = sigmoid(x @ params['Wo'] + h @ params['Uo'] + params['bo'])
    g = np.tanh(x @ params['Wg'] + h @ params['Ug'] + params['bg'])
    c_next = f * c + i * g
    tanh_c = np.tanh(c_next)
    h_next = o * tanh_c
    return h_next, c_next, (x, h, c, i, f, o, g, tanh_c)


def _lstm_step_backward(params, grads, dh_next, dc_next, cache):
    x, h, c, i, f, o, g, tanh_c = cache

    do = dh_next * tanh_c
    dc = dc_next + dh_next * o * (1.0 - tanh_c ** 2)
    di = dc * g
    df = dc * c
    dg = dc * i
    dc_prev = dc * f

    dh = np.zeros_like(h)
    for gate, da in (('i', di * i * (1.0 - i)), ('f', df * f * (1.0 - f)), ('o', do * o * (1.0 - o)), ('g', dg * (1.0 - g ** 2))):
        grads[f'W{gate}'] += x.T @ da
        grads[f'U{gate}'] += h.T @ da
        grads[f'b{gate}'] += da.sum(axis=0)
        dh += da @ params[f'U{gate}'].T
    return dh, dc_prev


#-----------------------------------------------------------------------------

# Unrolls the cell over a (B, L, D) batch from a zero state.
# Returns the logits (B,), the hidden states (B, L, H) and the per-step caches for backward.
def recurrent_forward(cell, params, X):
    batch, length, _ = X.shape
    hidden_units = params['w_out'].shape[0]
    h = np.zeros((batch, hidden_units))
    c = np.zeros((batch, hidden_units))
    hidden = np.zeros((batch, length, hidden_units))
    caches = []

    for step in range(length):
        x = X[:, step, :]
        if cell == 'gru':
            h, cache = _gru_step(params, x, h)
        else:
            h, c, cache = _lstm_step(params, x, h, c)
        hidden[:, step, :] = h
        caches.append(cache)

    logits = h @ params['w_out'] + params['b_out'][0]
    return logits, hidden, caches


# Backpropagation through time from dL/dlogit (B,) to every parameter
def recurrent_backward(cell, params, dlogits, hidden, caches):
    grads = {name: np.zeros_like(value) for name, value in params.items()}
    h_last = hidden[:, -1, :]
    grads['w_out'] = h_last.T @ dlogits
    grads['b_out'] = np.array([dlogits.sum()])

    dh = np.outer(dlogits, params['w_out'])
    dc = np.zeros_like(dh)
    for cache in reversed(caches):
        if cell == 'gru':
            dh = _gru_step_backward(params, grads, dh, cache)
        else:
            dh, dc = _lstm_step_backward(params, grads, dh, dc, cache)
    return grads
