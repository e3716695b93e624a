"""Compiled inner loops for torus quadrature.

The grid values of a polynomial along the last axis are
``v[r, j] = sum_k a[r, k] * W[j, k]`` where ``a`` holds the coefficients of
the last variable already evaluated on the outer grid nodes ``r``.  Sums run
in a fixed order so results do not depend on how the caller tiles the grid.
"""
import numba as nb
import numpy as np


@nb.njit(cache=True, nogil=True)
def quotient_sq_sum(a_num, a_den, W, floor_sq):
    """Sum of ``|num|^2 / |den|^2`` over nodes with ``|den|^2 >= floor_sq``.

    Returns (sum, number of skipped nodes, smallest ``|den|^2`` seen).
    """
    R, K = a_den.shape
    M = W.shape[0]
    total = 0.0
    skipped = 0
    min_den = np.inf
    for r in range(R):
        for j in range(M):
            nr = 0.0
            ni = 0.0
            dr = 0.0
            di = 0.0
            for k in range(K):
                w = W[j, k]
                c = a_num[r, k] * w
                nr += c.real
                ni += c.imag
                c = a_den[r, k] * w
                dr += c.real
                di += c.imag
            den = dr * dr + di * di
            if den < min_den:
                min_den = den
            if den < floor_sq:
                skipped += 1
            else:
                total += (nr * nr + ni * ni) / den
    return total, skipped, min_den


@nb.njit(cache=True, nogil=True)
def alpha_fill(shape, order, r_idx, r_coef, rhs):
    """Causal recursion ``out[k] = rhs[k] + sum_n c_n out[k - n]`` on a box.

    ``rhs`` and the result are flat C-ordered arrays.  Nodes are visited in
    the lexicographic order whose most significant axis is ``order[0]``; the
    lag sum always runs over ``r_idx`` in the given order.
    """
    d = shape.shape[0]
    strides = np.ones(d, dtype=np.int64)
    for a in range(d - 2, -1, -1):
        strides[a] = strides[a + 1] * shape[a + 1]
    total = 1
    for a in range(d):
        total *= shape[a]
    out = np.zeros(total, dtype=np.complex128)
    k = np.zeros(d, dtype=np.int64)
    nr = r_idx.shape[0]
    for _ in range(total):
        flat = 0
        for a in range(d):
            flat += k[a] * strides[a]
        acc = rhs[flat]
        for j in range(nr):
            ok = True
            off = 0
            for a in range(d):
                if k[a] < r_idx[j, a]:
                    ok = False
                    break
                off += r_idx[j, a] * strides[a]
            if ok:
                acc += r_coef[j] * out[flat - off]
        out[flat] = acc
        # odometer step, order[d-1] fastest
        pos = d - 1
        while pos >= 0:
            a = order[pos]
            k[a] += 1
            if k[a] < shape[a]:
                break
            k[a] = 0
            pos -= 1
    return out
