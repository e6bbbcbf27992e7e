"""Independent reference computations used only by the tests.

None of these share code paths with the package implementations they check.
"""
import itertools
import math

import numpy as np
from scipy.special import spherical_jn, spherical_yn


def brute_force_mie(m, x, terms_per_x=10):
    """Q_ext, Q_sca summed over n = 1..ceil(10 x) from scipy spherical Bessel functions.

    Coefficients use the textbook ratio of Riccati-Bessel products directly,
    with no logarithmic-derivative recurrence. Terms whose Neumann function
    has overflowed contribute nothing and end the sum.
    """
    m = complex(m)
    mx = m * x
    n_max = max(int(math.ceil(terms_per_x * x)), 3)
    q_ext = q_sca = 0.0
    with np.errstate(all="ignore"):
        for n in range(1, n_max + 1):
            jn, djn = spherical_jn(n, x), spherical_jn(n, x, derivative=True)
            yn, dyn = spherical_yn(n, x), spherical_yn(n, x, derivative=True)
            jm, djm = spherical_jn(n, mx), spherical_jn(n, mx, derivative=True)
            psi, dpsi = x * jn, jn + x * djn
            xi, dxi = x * (jn + 1j * yn), (jn + 1j * yn) + x * (djn + 1j * dyn)
            psim, dpsim = mx * jm, jm + mx * djm
            a = (m * psim * dpsi - psi * dpsim) / (m * psim * dxi - xi * dpsim)
            b = (psim * dpsi - m * psi * dpsim) / (psim * dxi - m * xi * dpsim)
            if not (np.isfinite(a) and np.isfinite(b)):
                break
            q_ext += (2 * n + 1) * (a + b).real
            q_sca += (2 * n + 1) * (abs(a) ** 2 + abs(b) ** 2)
    return 2 / x**2 * q_ext, 2 / x**2 * q_sca


def rayleigh_q_sca(m, x):
    m = complex(m)
    return 8.0 / 3.0 * x**4 * abs((m * m - 1) / (m * m + 2)) ** 2


# leaves of the per-pair outcome tree: (sender bit, receiver bit or None if lost)
TREE_LEAVES = [(0, None), (1, None), (0, 0), (0, 1), (1, 0), (1, 1)]


def leaf_probability(leaf, p, alpha):
    """Walk the tree: sender outcome, survive the channel or not, receiver outcome."""
    s, r = leaf
    p = np.asarray(p)
    p_sender = p[2 * s] + p[2 * s + 1]
    if r is None:
        return p_sender * (1 - alpha)
    # receiver outcome conditional on the sender's
    return p_sender * alpha * (p[2 * s + r] / p_sender if p_sender > 0 else 0.0)


def counts_of(history):
    a = [0, 0]
    c = {(0, 0): 0, (0, 1): 0, (1, 0): 0, (1, 1): 0}
    for s, r in history:
        a[s] += 1
        if r is not None:
            c[(s, r)] += 1
    return (a[0], a[1], c[(0, 0)], c[(0, 1)], c[(1, 0)], c[(1, 1)])


def enumerate_sequence_probabilities(n_photons, p, alpha):
    """Map counts -> (number of ordered histories, total probability) over all 6^N histories."""
    leaf_p = [leaf_probability(leaf, p, alpha) for leaf in TREE_LEAVES]
    table = {}
    for idx in itertools.product(range(6), repeat=n_photons):
        prob = 1.0
        for i in idx:
            prob *= leaf_p[i]
        key = counts_of([TREE_LEAVES[i] for i in idx])
        n, total = table.get(key, (0, 0.0))
        table[key] = (n + 1, total + prob)
    return table


def enumerate_sequence_probabilities_fast(n_photons, p, alpha):
    """Same enumeration as above, vectorized for N around 10 (6^10 histories)."""
    leaf_p = np.array([leaf_probability(leaf, p, alpha) for leaf in TREE_LEAVES])
    # leaf -> contribution to the 6 count slots (A0, A1, c00, c01, c10, c11)
    contrib = np.zeros((6, 6), dtype=np.int64)
    for i, leaf in enumerate(TREE_LEAVES):
        contrib[i] = counts_of([leaf])
    head = min(n_photons, 3)
    tail = n_photons - head
    tail_idx = np.indices((6,) * tail).reshape(tail, -1).T if tail else np.zeros((1, 0), int)
    tail_counts = contrib[tail_idx].sum(axis=1)
    tail_prob = leaf_p[tail_idx].prod(axis=1)
    radix = np.array([(n_photons + 1) ** k for k in range(6)])
    totals = {}
    for head_idx in itertools.product(range(6), repeat=head):
        hc = contrib[list(head_idx)].sum(axis=0)
        hp = leaf_p[list(head_idx)].prod()
        keys = (tail_counts + hc) @ radix
        uniq, inv = np.unique(keys, return_inverse=True)
        sums = np.bincount(inv, weights=tail_prob * hp)
        nums = np.bincount(inv)
        for k, s, n in zip(uniq.tolist(), sums, nums):
            n0, s0 = totals.get(k, (0, 0.0))
            totals[k] = (n0 + int(n), s0 + float(s))
    out = {}
    for k, v in totals.items():
        digits = tuple((k // (n_photons + 1) ** j) % (n_photons + 1) for j in range(6))
        out[digits] = v
    return out


def concurrence_by_eigenvalues(rho):
    """Square roots of the eigenvalues of rho * rho_tilde, straight from the definition."""
    sy = np.array([[0, -1j], [1j, 0]])
    yy = np.kron(sy, sy)
    rho_tilde = yy @ np.conj(rho) @ yy
    ev = np.linalg.eigvals(rho @ rho_tilde)
    lam = np.sort(np.sqrt(np.clip(ev.real, 0, None)))[::-1]
    return max(0.0, lam[0] - lam[1:].sum())


def werner_concurrence(p):
    return max(0.0, (3 * p - 1) / 2)
