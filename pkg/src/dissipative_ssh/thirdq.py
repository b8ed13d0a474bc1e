"""Quadratic Lindblad machinery: Majorana shape matrix, rapidities, NESS.

The master equation with Hamiltonian quadratic in fermions and jump
operators linear in them closes on a 4n-dimensional antisymmetric shape
matrix A whose eigenvalues (rapidities, in +/- pairs) set every decay
rate, and on an n x n covariance fixed point that carries the NESS site
occupations.  Majorana convention used throughout:

    w_{2m}   = c_m + c_m+          (even index, "x" Majorana of site m)
    w_{2m+1} = i (c_m - c_m+)      (odd index, "y" Majorana)

so c_m = (w_{2m} - i w_{2m+1}) / 2.  The Hamiltonian coefficient matrix
Hm (H = sum_jk Hm_jk w_j w_k) and the jump coefficient vectors l_mu
(L_mu = sum_j l_mu_j w_j) combine into A via

    A[2j, 2k]     = -2i Hm_jk + (M_jk - M_kj)
    A[2j+1, 2k+1] = -2i Hm_jk - (M_jk - M_kj)
    A[2j, 2k+1]   =  2i M_jk
    A[2j+1, 2k]   = -2i M_kj

with M = sum_mu l_mu l_mu+.  All of these sign choices are pinned by
the dense-Fock oracle tests; do not change any of them in isolation.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np
import scipy.linalg

from .lattice import (
    ConfigError,
    ModelConfig,
    gain_sites,
    hopping_matrix,
    loss_sites,
    ring_momenta,
)

_SX = np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex)
_SY = np.array([[0.0, -1j], [1j, 0.0]])
_SZ = np.diag([1.0, -1.0]).astype(complex)
_EYE2 = np.eye(2, dtype=complex)

# 4x4 blocks of the banded ring form, in (x/y Majorana) x (doubling) order.
GAMMA_GAIN = -np.kron(_EYE2, _SY) + np.kron(_SY, 1j * _SX + _SZ)
GAMMA_LOSS = -np.kron(_EYE2, _SY) - np.kron(_SY, 1j * _SX + _SZ)
T_BLOCK = np.kron(-1j * _SY, _EYE2)


class PairingError(RuntimeError):
    """Raised when a shape-matrix eigenvalue has no -beta partner."""


def majorana_hamiltonian(config: ModelConfig, disorder=None):
    """Antisymmetric 2n x 2n coefficient matrix of the Hermitian hopping part.

    Valid for the traceless real symmetric h produced by hopping_matrix;
    gain/loss never enter here, they live in the Lindblad vectors.
    """
    h = hopping_matrix(config, disorder)
    n = config.n
    hm = np.zeros((2 * n, 2 * n), dtype=complex)
    hm[0::2, 1::2] = -0.25j * h
    hm[1::2, 0::2] = 0.25j * h
    return hm


def lindblad_vectors(config: ModelConfig):
    """Majorana coefficient vectors, one per jump operator, loss first.

    Loss at site m is sqrt(gamma) c_m = (sqrt(gamma)/2)(w_x - i w_y),
    gain is the conjugate pattern (w_x + i w_y).
    """
    n = config.n
    amp = 0.5 * np.sqrt(config.gamma)
    vecs = []
    for j in loss_sites(config):
        l = np.zeros(2 * n, dtype=complex)
        l[2 * j] = amp
        l[2 * j + 1] = -1j * amp
        vecs.append(l)
    for j in gain_sites(config):
        l = np.zeros(2 * n, dtype=complex)
        l[2 * j] = amp
        l[2 * j + 1] = 1j * amp
        vecs.append(l)
    return vecs


@dataclasses.dataclass(frozen=True)
class ShapeMatrix:
    """Antisymmetric 4n x 4n shape matrix with its provenance tags."""

    matrix: np.ndarray
    pattern: str
    boundary: str


def build_shape_matrix(config: ModelConfig, disorder=None) -> ShapeMatrix:
    """Assemble the shape matrix from the Majorana Hamiltonian and jump vectors.

    Antisymmetry is exact: every block formula pairs with its mirror by
    IEEE-exact negation.
    """
    hm = majorana_hamiltonian(config, disorder)
    m = np.zeros_like(hm)
    for l in lindblad_vectors(config):
        m += np.outer(l, l.conj())
    manti = m - m.T
    dim = 2 * hm.shape[0]
    a = np.zeros((dim, dim), dtype=complex)
    a[0::2, 0::2] = -2j * hm + manti
    a[1::2, 1::2] = -2j * hm - manti
    a[0::2, 1::2] = 2j * m
    a[1::2, 0::2] = -2j * m.T
    return ShapeMatrix(a, config.pattern, config.boundary)


def banded_shape_matrix_u2_ring(config: ModelConfig):
    """Ring shape matrix assembled directly from the banded block pattern.

    Diagonal 4x4 blocks alternate (gamma/2) Gamma_gain / Gamma_loss over
    sites, nearest-neighbor blocks are -(t_bond/2) T_BLOCK including the
    wrap.  Independent construction path used to cross-check
    build_shape_matrix.
    """
    if config.pattern != "u2" or config.boundary != "periodic":
        raise ConfigError("banded form requires the alternating pattern on a ring")
    n = config.n
    t1, t2 = config.t1, config.t2
    a = np.zeros((4 * n, 4 * n), dtype=complex)
    halfg = 0.5 * config.gamma
    for s in range(n):
        block = GAMMA_GAIN if s % 2 == 0 else GAMMA_LOSS
        a[4 * s : 4 * s + 4, 4 * s : 4 * s + 4] = halfg * block
    for s in range(n):
        nxt = (s + 1) % n
        t_bond = t1 if s % 2 == 0 else t2
        blk = -(0.5 * t_bond) * T_BLOCK
        # += so the doubled bond of a two-site ring stacks like the hopping matrix
        a[4 * s : 4 * s + 4, 4 * nxt : 4 * nxt + 4] += blk
        a[4 * nxt : 4 * nxt + 4, 4 * s : 4 * s + 4] += blk
    return a


def build_bloch_liouvillean(config: ModelConfig, k):
    """8 x 8 momentum block of the ring shape matrix at momentum k."""
    if config.pattern != "u2" or config.boundary != "periodic":
        raise ConfigError("Bloch Liouvillean requires the alternating pattern on a ring")
    t1, t2 = config.t1, config.t2
    f = -(t1 + t2 * np.exp(1j * k))
    fc = -(t1 + t2 * np.exp(-1j * k))
    g = config.gamma
    top = np.hstack([g * GAMMA_GAIN, f * T_BLOCK])
    bot = np.hstack([fc * T_BLOCK, g * GAMMA_LOSS])
    return 0.5 * np.vstack([top, bot])


@dataclasses.dataclass(frozen=True)
class RapiditySpectrum:
    """Rapidities beta (Re >= 0 representatives, sorted by (Re, Im)).

    certificate[i] holds the raw eigenvalue indices (j_plus, j_minus) of
    the +/- pair that produced betas[i]; unique_ness is the min Re > 0
    criterion for a unique steady state.
    """

    betas: np.ndarray
    certificate: np.ndarray
    unique_ness: bool


def rapidities(shape, pairing_tol=1e-8, unique_tol=1e-10) -> RapiditySpectrum:
    """Eigenvalues of the shape matrix partitioned into +/- beta pairs.

    Greedy nearest matching, largest magnitude first; a missing partner
    within pairing_tol * scale indicates a construction bug and raises.
    Accepts a ShapeMatrix or a bare antisymmetric array.
    """
    a = shape.matrix if isinstance(shape, ShapeMatrix) else np.asarray(shape)
    w = scipy.linalg.eigvals(a)
    scale = max(1.0, np.abs(w).max())
    used = np.zeros(len(w), dtype=bool)
    betas = []
    cert = []
    for i in np.argsort(-np.abs(w)):
        if used[i]:
            continue
        used[i] = True
        cand = np.flatnonzero(~used)
        j = cand[np.argmin(np.abs(w[i] + w[cand]))]
        if abs(w[i] + w[j]) > pairing_tol * scale:
            raise PairingError(f"eigenvalue {w[i]:.6e} of the shape matrix is unpaired")
        used[j] = True
        if (w[i].real, w[i].imag) >= (w[j].real, w[j].imag):
            betas.append(w[i])
            cert.append((i, j))
        else:
            betas.append(w[j])
            cert.append((j, i))
    betas = np.asarray(betas)
    cert = np.asarray(cert)
    order = np.lexsort((betas.imag, betas.real))
    unique = bool(betas.real.min() > unique_tol * scale)
    return RapiditySpectrum(betas[order], cert[order], unique)


def analytic_rapidities_u2_ring(config: ModelConfig):
    """Closed-form ring rapidities (gamma +/- i E(k))/2, each twofold.

    E(k) is the Hermitian band energy sqrt(t1^2 + t2^2 + 2 t1 t2 cos k),
    not the PT-symmetric one, so Re beta = gamma/2 for every mode and
    every dimerization.  Multiset oracle for rapidities(); the twofold
    degeneracy mirrors the doubling structure of the shape matrix, not a
    lattice symmetry.
    """
    if config.pattern != "u2" or config.boundary != "periodic":
        raise ConfigError("closed-form rapidities exist for the alternating ring only")
    t1, t2 = config.t1, config.t2
    out = []
    for k in ring_momenta(config.n_cells):
        e = np.sqrt(t1 * t1 + t2 * t2 + 2.0 * t1 * t2 * np.cos(k))
        for beta in (0.5 * (config.gamma + 1j * e), 0.5 * (config.gamma - 1j * e)):
            out.extend([beta, beta])
    return np.array(sorted(out, key=lambda z: (z.real, z.imag)))


def ness_covariance(config: ModelConfig, disorder=None):
    """NESS two-point matrix C_mn = <c_m+ c_n> via the covariance fixed point.

    Solves X C + C X+ = 2 G with X = D - i h, D the diagonal of total
    dissipation rates, G the diagonal of gain rates, h the Hermitian
    hopping matrix.  Factor-2 Lindblad convention throughout (a lone
    loss site empties at rate 2*gamma); the full matrix, not just its
    diagonal, is pinned against the dense-Fock oracle in the tests.
    """
    if config.gamma <= 0.0 or config.pattern == "none":
        raise ConfigError("unique steady state needs gamma > 0 and a dissipation pattern")
    h = hopping_matrix(config, disorder)
    n = config.n
    d = np.zeros(n)
    g = np.zeros(n)
    for j in gain_sites(config):
        d[j] += config.gamma
        g[j] += config.gamma
    for j in loss_sites(config):
        d[j] += config.gamma
    x = np.diag(d).astype(complex) - 1j * h
    rhs = 2.0 * np.diag(g).astype(complex)
    c = scipy.linalg.solve_sylvester(x, x.conj().T, rhs)
    residual = np.abs(x @ c + c @ x.conj().T - rhs).max()
    if residual > 1e-10 * max(1.0, config.gamma):
        raise RuntimeError(f"covariance solve residual {residual:.3e}")
    return c


def ness_occupation(c, tol=1e-8):
    """Site occupations: the real diagonal of the covariance matrix.

    Rejects diagonals with |Im| > tol or values outside [-tol, 1 + tol];
    in-range values are clipped to [0, 1] for reporting.
    """
    diag = np.diag(np.asarray(c))
    if np.abs(diag.imag).max() > tol:
        raise RuntimeError(f"covariance diagonal has |Im| up to {np.abs(diag.imag).max():.3e}")
    occ = diag.real
    if occ.min() < -tol or occ.max() > 1.0 + tol:
        raise RuntimeError("occupation outside [0, 1] beyond tolerance")
    return np.clip(occ, 0.0, 1.0)


def export_rapidities_csv(path, spectrum: RapiditySpectrum, degeneracy_tol=1e-8):
    """CSV columns index, re_beta, im_beta, degeneracy_id.

    degeneracy_id labels clusters of equal betas, so the twofold ring
    degeneracy shows up as repeated ids.  Clustering is tolerance-based
    rather than adjacency-based: rounding noise in Re beta can separate
    equal values in the (Re, Im) sort order.
    """
    betas = spectrum.betas
    ids = np.full(len(betas), -1, dtype=int)
    next_id = 0
    for i in range(len(betas)):
        if ids[i] >= 0:
            continue
        close = np.abs(betas - betas[i]) <= degeneracy_tol * max(1.0, abs(betas[i]))
        ids[close & (ids < 0)] = next_id
        next_id += 1
    lines = ["index,re_beta,im_beta,degeneracy_id"]
    for i, b in enumerate(betas):
        lines.append(f"{i},{b.real:.12e},{b.imag:.12e},{ids[i]}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def export_covariance_json(path, c):
    """Covariance matrix as a JSON n x n array of [re, im] pairs."""
    data = [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(c)]
    with open(path, "w") as fh:
        json.dump(data, fh)
