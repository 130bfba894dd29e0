"""Independent reference computations used to check the fast paths.

Everything here is written as a direct, slow translation of the
transition rules over a dense supra matrix, on purpose: it shares no
code with the sampling implementation it verifies.
"""

import numpy as np


def _adjacency(g):
    """Dense per-layer adjacency read back through the public API."""
    n, L = g.num_nodes, g.num_layers
    a = np.zeros((L, n, n))
    for layer in range(L):
        for i in range(n):
            for j, w in g.neighbors(i, layer):
                a[layer, i, j] = w
    return a


def supra_transition_matrix(g, strategy_token):
    """Row-stochastic (n*L x n*L) matrix of one kernel; state (i, a) sits
    at index a*n + i. Rows for states with no outgoing rule stay zero."""
    n, L = g.num_nodes, g.num_layers
    a = _adjacency(g)
    c0 = g.coupling_weight

    deg = (a > 0).sum(axis=2)
    active = deg > 0  # [layer, node]
    intra = a.sum(axis=2)  # S_{i,alpha}

    def coupling(i, al, be):
        return c0 if active[al, i] and active[be, i] else 0.0

    total = np.zeros((L, n))
    for al in range(L):
        for i in range(n):
            total[al, i] = intra[al, i] + sum(coupling(i, al, be) for be in range(L))
    s_max = total.max()

    def idx(i, al):
        return al * n + i

    m = np.zeros((n * L, n * L))
    for al in range(L):
        for i in range(n):
            if not active[al, i]:
                continue
            row = idx(i, al)
            if strategy_token == "classical":
                s = total[al, i]
                m[row, idx(i, al)] = coupling(i, al, al) / s
                for be in range(L):
                    if be != al:
                        m[row, idx(i, be)] = coupling(i, al, be) / s
                for j in range(n):
                    if a[al, i, j] > 0:
                        m[row, idx(j, al)] = a[al, i, j] / s
            elif strategy_token == "diffusive":
                m[row, idx(i, al)] = (s_max + coupling(i, al, al)
                                      - total[al, i]) / s_max
                for be in range(L):
                    if be != al:
                        m[row, idx(i, be)] = coupling(i, al, be) / s_max
                for j in range(n):
                    if a[al, i, j] > 0:
                        m[row, idx(j, al)] = a[al, i, j] / s_max
            elif strategy_token == "physical":
                for be in range(L):
                    d = coupling(i, al, be)
                    if d == 0.0:
                        continue
                    for j in range(n):
                        if a[be, i, j] > 0:
                            m[row, idx(j, be)] = (a[be, i, j] / total[be, i]) \
                                * (d / intra[al, i])
                m[row] /= m[row].sum()
            elif strategy_token == "multinet":
                n_active = int(active[:, i].sum())
                for ga in range(L):
                    if not active[ga, i]:
                        continue
                    for j in range(n):
                        if a[ga, i, j] > 0 and j != i:
                            m[row, idx(j, ga)] += 1.0 / (n_active * deg[ga, i])
            else:
                raise ValueError(strategy_token)
    return m


def dense_row(g, row_pairs):
    """Fold transition_row output into a dense supra vector."""
    n = g.num_nodes
    vec = np.zeros(n * g.num_layers)
    for state, p in row_pairs:
        vec[state.layer * n + state.node] += p
    return vec


def stationary_distribution(m):
    """Leading left eigenvector (eigenvalue closest to 1), normalized."""
    vals, vecs = np.linalg.eig(m.T)
    lead = np.argmin(np.abs(vals - 1.0))
    pi = np.real(vecs[:, lead])
    pi = np.abs(pi)
    return pi / pi.sum()


def brute_force_auroc(scores, labels):
    """O(n^2) pairwise count: wins plus half the ties."""
    scores = list(map(float, scores))
    pos = [s for s, y in zip(scores, labels) if y == 1]
    neg = [s for s, y in zip(scores, labels) if y == 0]
    numer = 0.0
    for sp in pos:
        for sn in neg:
            if sp > sn:
                numer += 1.0
            elif sp == sn:
                numer += 0.5
    return numer / (len(pos) * len(neg))
