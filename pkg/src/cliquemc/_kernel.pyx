# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled chain-step kernel; see _kernel_py for the reference semantics."""

import numpy as np

cimport numpy as cnp

BACKEND = "cython"


cdef inline void _steps(
    int m,
    const int[:] clique_off,
    const int[:] clique_poly,
    const double[:] clique_cdf,
    const double[:] p_empty,
    const int[:] poly_clique_off,
    const int[:] poly_clique,
    const int[:] nbr_off,
    const int[:] nbr,
    int[:] occ,
    unsigned char[:] in_state,
    const double[:] u,
) noexcept nogil:
    cdef Py_ssize_t steps = u.shape[0] // 2
    cdef Py_ssize_t t, c
    cdef int i, j, g, lo, hi
    cdef double u2
    cdef bint ok
    for t in range(steps):
        i = <int>(u[2 * t] * m)
        if i >= m:
            i = m - 1
        u2 = u[2 * t + 1]
        if u2 < p_empty[i]:
            g = occ[i]
            if g >= 0:
                in_state[g] = 0
                for c in range(poly_clique_off[g], poly_clique_off[g + 1]):
                    occ[poly_clique[c]] = -1
        else:
            lo = clique_off[i]
            hi = clique_off[i + 1]
            j = lo
            while j < hi - 1 and u2 >= clique_cdf[j]:
                j += 1
            g = clique_poly[j]
            if not in_state[g]:
                ok = True
                for c in range(nbr_off[g], nbr_off[g + 1]):
                    if in_state[nbr[c]]:
                        ok = False
                        break
                if ok:
                    in_state[g] = 1
                    for c in range(poly_clique_off[g], poly_clique_off[g + 1]):
                        occ[poly_clique[c]] = g


def run_steps(
    int m,
    const int[:] clique_off,
    const int[:] clique_poly,
    const double[:] clique_cdf,
    const double[:] p_empty,
    const int[:] poly_clique_off,
    const int[:] poly_clique,
    const int[:] nbr_off,
    const int[:] nbr,
    int[:] occ,
    unsigned char[:] in_state,
    const double[:] u,
):
    _steps(
        m, clique_off, clique_poly, clique_cdf, p_empty,
        poly_clique_off, poly_clique, nbr_off, nbr, occ, in_state, u,
    )


def run_batch(
    int m,
    const int[:] clique_off,
    const int[:] clique_poly,
    const double[:] clique_cdf,
    const double[:] p_empty,
    const int[:] poly_clique_off,
    const int[:] poly_clique,
    const int[:] nbr_off,
    const int[:] nbr,
    const int[:] init_occ,
    const unsigned char[:] init_state,
    int steps,
    const double[:] u,
    unsigned char[:, :] out_states,
):
    cdef Py_ssize_t n_samples = out_states.shape[0]
    cdef Py_ssize_t s, k
    cdef cnp.ndarray occ_arr = np.empty(init_occ.shape[0], dtype=np.int32)
    cdef cnp.ndarray state_arr = np.empty(init_state.shape[0], dtype=np.uint8)
    cdef int[:] occ = occ_arr
    cdef unsigned char[:] in_state = state_arr
    with nogil:
        for s in range(n_samples):
            for k in range(init_occ.shape[0]):
                occ[k] = init_occ[k]
            for k in range(init_state.shape[0]):
                in_state[k] = init_state[k]
            _steps(
                m, clique_off, clique_poly, clique_cdf, p_empty,
                poly_clique_off, poly_clique, nbr_off, nbr, occ, in_state,
                u[s * 2 * steps:(s + 1) * 2 * steps],
            )
            for k in range(init_state.shape[0]):
                out_states[s, k] = in_state[k]
