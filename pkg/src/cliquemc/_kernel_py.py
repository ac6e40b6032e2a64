"""Pure-Python chain-step kernel.

Semantically identical to the compiled kernel in _kernel.pyx: both consume
the same flat array of uniforms (two per step: clique draw, outcome draw), so
trajectories are bit-identical across backends.
"""

BACKEND = "python"


def run_steps(
    m,
    clique_off,
    clique_poly,
    clique_cdf,
    p_empty,
    poly_clique_off,
    poly_clique,
    nbr_off,
    nbr,
    occ,
    in_state,
    u,
):
    """Advance one trajectory in place; u holds 2 uniforms per step."""
    steps = len(u) // 2
    for t in range(steps):
        i = int(u[2 * t] * m)
        if i >= m:  # guard against u == 1.0 - eps rounding
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


def run_batch(
    m,
    clique_off,
    clique_poly,
    clique_cdf,
    p_empty,
    poly_clique_off,
    poly_clique,
    nbr_off,
    nbr,
    init_occ,
    init_state,
    steps,
    u,
    out_states,
):
    """Run len(out_states) independent trajectories from the same initial state.

    u holds 2*steps uniforms per trajectory, concatenated; final memberships
    are written into out_states (n_samples x n_polymers, uint8).
    """
    n_samples = out_states.shape[0]
    occ = init_occ.copy()
    in_state = init_state.copy()
    for s in range(n_samples):
        occ[:] = init_occ
        in_state[:] = init_state
        run_steps(
            m,
            clique_off,
            clique_poly,
            clique_cdf,
            p_empty,
            poly_clique_off,
            poly_clique,
            nbr_off,
            nbr,
            occ,
            in_state,
            u[s * 2 * steps:(s + 1) * 2 * steps],
        )
        out_states[s, :] = in_state
