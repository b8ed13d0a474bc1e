"""Dense Fock-space brute force for small chains.

Everything in this module is built straight from Jordan-Wigner fermions
and the Lindblad equation as written, independently of the quadratic
machinery elsewhere in the package.  That makes it slow and small
(superoperators up to n = 6 only) but authoritative: the sign and factor
conventions of the fast paths are pinned against it by the test suite,
so nothing here may import from the modules it validates.

Conventions fixed here:

* Jordan-Wigner with the sign string to the left of the target site,
  site index ascending: c_j = Z x ... x Z x a x 1 x ... x 1 with j
  copies of Z.  Site 0 is the most significant bit of the basis index.
* Column stacking, vec(rho)[i + d*j] = rho[i, j], hence
  vec(A rho B) = (B^T x A) vec(rho).
* Dissipator with the factor-2 convention,
  drho/dt = -i[H, rho] + sum_mu (2 L rho L+ - {L+L, rho}),
  under which a lone loss site empties at rate exactly 2*gamma.
"""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.linalg

from .lattice import ModelConfig, gain_sites, hopping_matrix, loss_sites


class SteadyStateError(RuntimeError):
    """Raised when the Liouvillean null space is not one-dimensional."""


def fock_operators(n):
    """Annihilation operators c_0 .. c_{n-1} as dense 2^n x 2^n matrices."""
    a = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    z = np.diag([1.0, -1.0]).astype(complex)
    eye = np.eye(2, dtype=complex)
    ops = []
    for j in range(n):
        op = np.eye(1, dtype=complex)
        for factor in [z] * j + [a] + [eye] * (n - j - 1):
            op = np.kron(op, factor)
        ops.append(op)
    return ops


def quantize_quadratic(h, ops):
    """Second-quantize sum_pq h[p,q] c_p+ c_q over a prebuilt operator set."""
    dim = ops[0].shape[0]
    out = np.zeros((dim, dim), dtype=complex)
    for p in range(len(ops)):
        for q in range(len(ops)):
            if h[p, q] != 0.0:
                out += h[p, q] * (ops[p].conj().T @ ops[q])
    return out


def fock_hamiltonian(config: ModelConfig, disorder=None):
    """Many-body Hamiltonian on the full 2^n Fock space, guard n <= 8.

    Quantizes the single-particle matrix including the +/- i*gamma
    on-site terms of the gain/loss pattern, so the single-particle
    sector reproduces the n x n effective matrix exactly.
    """
    if config.n > 8:
        raise ValueError(f"n={config.n} exceeds the dense Fock-space guard (n <= 8)")
    h = hopping_matrix(config, disorder).astype(complex)
    for j in gain_sites(config):
        h[j, j] += 1j * config.gamma
    for j in loss_sites(config):
        h[j, j] -= 1j * config.gamma
    return quantize_quadratic(h, fock_operators(config.n))


def jump_operators(config: ModelConfig):
    """Lindblad operators: sqrt(gamma) c_j on loss sites, sqrt(gamma) c_j+ on gain sites."""
    ops = fock_operators(config.n)
    root = np.sqrt(config.gamma)
    jumps = [root * ops[j] for j in loss_sites(config)]
    jumps += [root * ops[j].conj().T for j in gain_sites(config)]
    return jumps


def lindblad_rhs(h, jumps, rho):
    """Right side of the master equation evaluated directly on a density matrix."""
    out = -1j * (h @ rho - rho @ h)
    for l in jumps:
        ldl = l.conj().T @ l
        out += 2.0 * (l @ rho @ l.conj().T) - ldl @ rho - rho @ ldl
    return out


def liouvillean_matrix(h, jumps):
    """Column-stacked superoperator of the master equation for explicit (h, jumps)."""
    dim = h.shape[0]
    eye = np.eye(dim)
    sup = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for l in jumps:
        ldl = l.conj().T @ l
        sup += 2.0 * np.kron(l.conj(), l) - np.kron(eye, ldl) - np.kron(ldl.T, eye)
    return sup


def dense_liouvillean(config: ModelConfig, disorder=None):
    """Full 4^n x 4^n Lindblad superoperator for a chain, guard n <= 6.

    The coherent part is the Hermitian hopping Hamiltonian; gain and
    loss enter only through the jump operators.
    """
    if config.n > 6:
        raise ValueError(f"n={config.n} exceeds the dense superoperator guard (n <= 6)")
    ops = fock_operators(config.n)
    h = quantize_quadratic(hopping_matrix(config, disorder), ops)
    root = np.sqrt(config.gamma)
    jumps = [root * ops[j] for j in loss_sites(config)]
    jumps += [root * ops[j].conj().T for j in gain_sites(config)]
    return liouvillean_matrix(h, jumps)


def vectorize(rho):
    return np.asarray(rho).reshape(-1, order="F")


def unvectorize(vec):
    dim = int(round(np.sqrt(vec.size)))
    return np.asarray(vec).reshape(dim, dim, order="F")


def oracle_steady_state(superop, tol=1e-10):
    """Unique steady state of a Liouvillean superoperator.

    Small problems (dim <= 256) go through a full eigendecomposition so
    the null-space dimension is checked honestly; larger ones use a
    trace-constrained linear solve with one refinement pass, where
    accidental degeneracy surfaces as a failed residual.  Returns a
    Hermitized, trace-one density matrix with ||L rho|| < tol.
    """
    superop = np.asarray(superop)
    dim = superop.shape[0]
    d = int(round(np.sqrt(dim)))

    if dim <= 256:
        w, v = scipy.linalg.eig(superop)
        null_tol = 1e-8 * max(1.0, np.abs(w).max())
        null = np.flatnonzero(np.abs(w) < null_tol)
        if len(null) != 1:
            raise SteadyStateError(
                f"null space dimension {len(null)}, steady state not unique"
            )
        vec = v[:, null[0]]
    else:
        # Replace the rho[0,0] row with the trace constraint; trace
        # preservation makes that row a combination of the retained ones,
        # so the solution still annihilates the full superoperator.
        a = superop.copy()
        a[0, :] = 0.0
        a[0, :: d + 1] = 1.0
        b = np.zeros(dim, dtype=complex)
        b[0] = 1.0
        try:
            lu = scipy.linalg.lu_factor(a)
            vec = scipy.linalg.lu_solve(lu, b)
            vec += scipy.linalg.lu_solve(lu, b - a @ vec)
        except scipy.linalg.LinAlgError as exc:
            raise SteadyStateError(f"singular trace-constrained system: {exc}")
        if not np.all(np.isfinite(vec)):
            raise SteadyStateError("trace-constrained solve diverged")

    rho = unvectorize(vec)
    rho = 0.5 * (rho + rho.conj().T)
    trace = np.trace(rho).real
    if abs(trace) < 1e-12:
        raise SteadyStateError("null vector is traceless, not a state")
    rho /= trace
    residual = np.linalg.norm(superop @ vectorize(rho))
    if residual > tol:
        raise SteadyStateError(f"steady-state residual {residual:.3e} exceeds {tol:.1e}")
    return rho


def site_occupations(rho):
    """<c_j+ c_j> per site, read off the diagonal in the number basis."""
    dim = rho.shape[0]
    n = dim.bit_length() - 1
    pops = np.real(np.diag(rho))
    occ = np.zeros(n)
    for idx in range(dim):
        for j in range(n):
            if (idx >> (n - 1 - j)) & 1:
                occ[j] += pops[idx]
    return occ


def trace_distance(a, b):
    """(1/2) ||a - b||_1 via singular values."""
    return 0.5 * np.linalg.svd(a - b, compute_uv=False).sum()


@dataclasses.dataclass(frozen=True)
class Trajectory:
    """Time grid, per-site occupations (steps+1, n), and distance to the NESS."""

    times: np.ndarray
    occupations: np.ndarray
    trace_distance: np.ndarray


def oracle_time_evolution(superop, rho0, T, steps):
    """Evolve rho0 under the superoperator, tracking occupations and NESS distance.

    One scaling-and-squaring exponential of superop*dt is reused for
    every step.  The raw (non-Hermitized) state is propagated so that
    Hermiticity preservation stays observable.
    """
    ness = oracle_steady_state(superop)
    dt = T / steps
    prop = scipy.linalg.expm(np.asarray(superop) * dt)
    vec = vectorize(np.asarray(rho0, dtype=complex))
    times = np.linspace(0.0, T, steps + 1)
    occ = np.empty((steps + 1, ness.shape[0].bit_length() - 1))
    dist = np.empty(steps + 1)
    for k in range(steps + 1):
        rho = unvectorize(vec)
        occ[k] = site_occupations(rho)
        dist[k] = trace_distance(rho, ness)
        if k < steps:
            vec = prop @ vec
    return Trajectory(times, occ, dist)


def fit_decay_rate(times, dist, tail=0.5, floor=1e-12):
    """Asymptotic rate r of dist ~ e^{-r t}, log-linear fit over the tail.

    Points at or below the noise floor are dropped before taking the
    trailing fraction, so a trajectory that has fully converged does not
    poison the fit with log(0).
    """
    mask = np.asarray(dist) > floor
    t = np.asarray(times)[mask]
    d = np.asarray(dist)[mask]
    start = int(len(t) * (1.0 - tail))
    t, d = t[start:], d[start:]
    if len(t) < 3:
        raise ValueError("not enough points above the noise floor for a rate fit")
    slope = np.polyfit(t, np.log(d), 1)[0]
    return -slope


def export_trajectory_csv(path, traj: Trajectory):
    """Write a trajectory as CSV with columns t, n_1..n_n, trace_distance."""
    n = traj.occupations.shape[1]
    header = "t," + ",".join(f"n_{j + 1}" for j in range(n)) + ",trace_distance"
    data = np.column_stack([traj.times, traj.occupations, traj.trace_distance])
    np.savetxt(path, data, delimiter=",", header=header, comments="")
