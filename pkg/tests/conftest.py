"""Shared helpers for the test suite.

Complex spectra come back in whatever order the eigensolver picks, and
sorting by (Re, Im) is unstable under ties, so multiset comparisons go
through an optimal assignment instead.  Zak phases are angles: two
values that differ by an exact 2*pi are the same phase, so real parts
are always compared modulo 2*pi.
"""

import numpy as np
from scipy.optimize import linear_sum_assignment

from dissipative_ssh import ModelConfig


def multiset_distance(a, b):
    """Largest pairwise distance under the optimal matching of two multisets."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    assert a.size == b.size, f"multiset sizes differ: {a.size} vs {b.size}"
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return cost[rows, cols].max()


def phase_distance(x, y):
    """Distance between two angles on the circle, in [0, pi]."""
    return abs(np.angle(np.exp(1j * (np.asarray(x) - np.asarray(y)))))


def make_config(**overrides):
    """Baseline alternating-dissipation chain used across the tests."""
    params = dict(
        n=8,
        t=1.0,
        delta=1.0,
        theta=np.pi / 3,
        gamma=0.5,
        boundary="open",
        pattern="u2",
    )
    params.update(overrides)
    return ModelConfig(**params)
