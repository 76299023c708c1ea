"""Pure numpy implementations of the hot inner-loop kernels.

These are the fallback for the compiled extension in ``_kernels_cy``; both
expose the same four functions with identical semantics.  Everything here is
a dense Cauchy-type sum or a dense matrix assembly, vectorised and chunked so
peak memory stays bounded for large upsampled node sets.
"""

import numpy as np

_CHUNK = 1 << 22  # complex entries per temporary block (~64 MB)


def cauchy_powersum(targets, nodes, dens, cw, p):
    """sum_k dens[k]*cw[k] / (nodes[k] - t)**p for each target t.

    p is a small positive integer (1, 2 or 3 in practice).
    """
    targets = np.ascontiguousarray(targets, dtype=np.complex128)
    weights = np.asarray(dens, dtype=np.complex128) * np.asarray(cw, dtype=np.complex128)
    n = nodes.size
    out = np.empty(targets.size, dtype=np.complex128)
    step = max(1, _CHUNK // max(n, 1))
    for i0 in range(0, targets.size, step):
        block = targets[i0:i0 + step]
        diff = nodes[None, :] - block[:, None]
        if p == 1:
            ker = 1.0 / diff
        elif p == 2:
            ker = 1.0 / (diff * diff)
        else:
            ker = diff ** (-p)
        out[i0:i0 + step] = ker @ weights
    return out


def assemble_double_layer(z, cw, diag):
    """Dense Nystrom matrix of the double-layer kernel Im(cw_j/(z_j - z_i))/(2 pi).

    diag supplies the curvature limit values used on the diagonal.
    """
    diff = z[None, :] - z[:, None]
    np.fill_diagonal(diff, 1.0)  # dummy, overwritten below
    mat = (cw[None, :] / diff).imag / (2.0 * np.pi)
    np.fill_diagonal(mat, diag)
    return mat


def assemble_ks(z, T, sqrtw):
    """Weighted Kerzman-Stein matrix.

    A(z_i, z_j) = (1/2 pi i) * [ T_j/(z_i - z_j) + conj(T_i)/conj(z_j - z_i) ],
    returned as sqrtw_i * A_ij * sqrtw_j with an exactly zero diagonal, which
    makes the matrix skew-Hermitian to machine precision.
    """
    diff = z[:, None] - z[None, :]
    np.fill_diagonal(diff, 1.0)
    ker = T[None, :] / diff + np.conj(T[:, None]) / np.conj(-diff)
    ker *= 1.0 / (2.0j * np.pi)
    ker *= sqrtw[:, None] * sqrtw[None, :]
    np.fill_diagonal(ker, 0.0)
    return ker


def min_dist(targets, nodes):
    """Per-target minimum distance to the node set."""
    targets = np.ascontiguousarray(targets, dtype=np.complex128)
    n = nodes.size
    out = np.empty(targets.size)
    step = max(1, _CHUNK // max(n, 1))
    for i0 in range(0, targets.size, step):
        block = targets[i0:i0 + step]
        out[i0:i0 + step] = np.abs(nodes[None, :] - block[:, None]).min(axis=1)
    return out
