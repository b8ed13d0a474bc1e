"""PT-symmetric effective Hamiltonians for gain/loss SSH chains.

Real-space and Bloch builders produce the non-Hermitian matrices whose
anti-Hermitian part encodes the gain/loss pattern.  Spectral helpers
return biorthogonal left/right eigensystems, classify PT breaking,
verify the anti-pseudo-symmetry that pairs eigenvalues as +/-E, and
construct the maximally PT-broken mode selection together with its
site-occupation profile.
"""

from __future__ import annotations

import dataclasses
import json

import numpy as np
import scipy.linalg
import scipy.optimize

from .lattice import ConfigError, ModelConfig, gain_sites, hopping_matrix, loss_sites

PT_CLASSES = ("real", "gain_broken", "loss_broken")
MBS_RATIONALES = ("negative_real_energy", "gain_filled", "loss_emptied", "unoccupied")


def build_real_space_hamiltonian(config: ModelConfig, disorder=None):
    """n x n effective matrix: SSH hoppings plus +/- i*gamma on the pattern sites."""
    h = hopping_matrix(config, disorder).astype(complex)
    for j in gain_sites(config):
        h[j, j] += 1j * config.gamma
    for j in loss_sites(config):
        h[j, j] -= 1j * config.gamma
    return h


def build_bloch_hamiltonian(config: ModelConfig, k):
    """2 x 2 Bloch matrix [[i*g, -t1 - t2 e^{ik}], [-t1 - t2 e^{-ik}, -i*g]]."""
    if config.pattern == "u1":
        raise ConfigError("u1 dissipation is not translation invariant, no Bloch form")
    t1, t2 = config.t1, config.t2
    g = config.gamma if config.pattern == "u2" else 0.0
    return np.array(
        [
            [1j * g, -t1 - t2 * np.exp(1j * k)],
            [-t1 - t2 * np.exp(-1j * k), -1j * g],
        ]
    )


def bloch_band_energies(config: ModelConfig, k):
    """Closed-form pair +/- sqrt(t1^2 + t2^2 + 2 t1 t2 cos k - gamma^2).

    Principal square root, so the PT-broken branch comes out as +i|E|.
    """
    if config.pattern == "u1":
        raise ConfigError("u1 dissipation is not translation invariant, no Bloch form")
    t1, t2 = config.t1, config.t2
    g = config.gamma if config.pattern == "u2" else 0.0
    root = np.sqrt(complex(t1 * t1 + t2 * t2 + 2.0 * t1 * t2 * np.cos(k) - g * g))
    return root, -root


@dataclasses.dataclass(frozen=True)
class SpectrumResult:
    """Biorthogonal eigensystem of a complex matrix.

    eigenvalues are sorted lexicographically by (Re, Im).  right_vectors
    holds kets as columns (unit Euclidean norm); left_vectors holds bras
    as rows, rescaled so left_vectors @ right_vectors = identity away
    from exceptional points.  defective marks modes whose raw left/right
    overlap collapsed (below 1e-8 at unit norms); their bras stay at
    unit norm and only eigenvalues/pt_class remain trustworthy.
    """

    eigenvalues: np.ndarray
    right_vectors: np.ndarray
    left_vectors: np.ndarray
    pt_class: tuple
    defective: np.ndarray


def _pt_classes(eigenvalues, tol_im, scale):
    classes = []
    for e in eigenvalues:
        if abs(e.imag) <= tol_im * scale:
            classes.append("real")
        elif e.imag > 0.0:
            classes.append("gain_broken")
        else:
            classes.append("loss_broken")
    return tuple(classes)


def complex_spectrum(op, tol_im=1e-10):
    """Full left/right eigendecomposition, sorted by (Re, Im).

    Nearly degenerate eigenvalues are biorthonormalized jointly through
    a small linear solve; clusters whose overlap matrix is numerically
    singular (exceptional points) are flagged defective instead of
    aborting the remaining modes.
    """
    op = np.asarray(op, dtype=complex)
    if op.shape[0] < 2:
        raise ValueError("complex_spectrum needs dim >= 2")
    w, vl, vr = scipy.linalg.eig(op, left=True, right=True)
    order = np.lexsort((w.imag, w.real))
    w, vl, vr = w[order], vl[:, order], vr[:, order]
    dim = len(w)
    scale = max(1.0, np.abs(w).max())
    bras = vl.conj().T.copy()
    defective = np.zeros(dim, dtype=bool)

    cluster_tol = 1e-8 * scale
    start = 0
    while start < dim:
        stop = start + 1
        while stop < dim and abs(w[stop] - w[stop - 1]) < cluster_tol:
            stop += 1
        idx = slice(start, stop)
        overlap = bras[idx] @ vr[:, idx]
        if np.linalg.svd(overlap, compute_uv=False).min() > 1e-8:
            bras[idx] = np.linalg.solve(overlap, bras[idx])
        else:
            defective[idx] = True
        start = stop

    return SpectrumResult(w, vr, bras, _pt_classes(w, tol_im, scale), defective)


def classify_pt(spectrum: SpectrumResult, tol_im=1e-10):
    """Per-mode PT classes plus the global unbroken flag at the given tolerance."""
    scale = max(1.0, np.abs(spectrum.eigenvalues).max())
    classes = _pt_classes(spectrum.eigenvalues, tol_im, scale)
    return classes, all(c == "real" for c in classes)


def lambda_operator(n):
    """Sigma_x Sigma_z: anti-diagonal of alternating +/-1."""
    lam = np.zeros((n, n))
    for j in range(n):
        lam[n - 1 - j, j] = 1.0 if j % 2 == 0 else -1.0
    return lam


def check_lambda_symmetry(h, spectrum: SpectrumResult | None = None, tol=1e-10):
    """True iff Lambda+ H Lambda = -H entrywise and the spectrum pairs as {E} = {-E}.

    The multiset comparison matches each E to some -E' by minimum-cost
    assignment, which is robust when ties in Re E would make a plain
    lexicographic sort order the two lists differently.
    """
    h = np.asarray(h)
    lam = lambda_operator(h.shape[0])
    scale = max(1.0, np.abs(h).max())
    if np.abs(lam.T @ h @ lam + h).max() > tol * scale:
        return False
    w = spectrum.eigenvalues if spectrum is not None else scipy.linalg.eigvals(h)
    cost = np.abs(w[:, None] + w[None, :])
    rows, cols = scipy.optimize.linear_sum_assignment(cost)
    return bool(cost[rows, cols].max() <= tol * max(1.0, np.abs(w).max()))


@dataclasses.dataclass(frozen=True)
class ModeSelection:
    """Occupied-mode choice for the maximally PT-broken steady state."""

    occupied: tuple
    rationale: tuple
    unique: bool


def construct_mbs(spectrum: SpectrumResult, tol=1e-8):
    """Occupy the growing modes and, among the real ones, the Re E <= tol half.

    Modes with Im E > tol fill up, modes with Im E < -tol empty out, and
    real modes are occupied iff Re E <= tol.  Any mode with |E| <= tol
    makes the selection non-unique (unique=False) but is still occupied.
    """
    occupied = []
    rationale = []
    unique = True
    for m, e in enumerate(spectrum.eigenvalues):
        if abs(e) <= tol:
            unique = False
        if e.imag > tol:
            occupied.append(m)
            rationale.append("gain_filled")
        elif e.imag < -tol:
            rationale.append("loss_emptied")
        elif e.real <= tol:
            occupied.append(m)
            rationale.append("negative_real_energy")
        else:
            rationale.append("unoccupied")
    return ModeSelection(tuple(occupied), tuple(rationale), unique)


def mbs_occupation(spectrum: SpectrumResult, selection: ModeSelection, weights="right"):
    """Site occupations of the selected modes.

    weights="right" sums Born weights of unit-norm right eigenvectors,
    so the total equals the number of occupied modes exactly.
    weights="biorthogonal" uses Re <chi|n_i|phi> instead, which can
    leave [0, 1] near exceptional points.
    """
    if weights not in ("right", "biorthogonal"):
        raise ValueError(f"unknown weights {weights!r}")
    occ = np.zeros(spectrum.right_vectors.shape[0])
    for m in selection.occupied:
        phi = spectrum.right_vectors[:, m]
        if weights == "right":
            occ += np.abs(phi) ** 2 / np.vdot(phi, phi).real
        else:
            occ += (spectrum.left_vectors[m] * phi).real
    return occ


def _permute(spectrum: SpectrumResult, perm):
    perm = np.asarray(perm)
    return SpectrumResult(
        spectrum.eigenvalues[perm],
        spectrum.right_vectors[:, perm],
        spectrum.left_vectors[perm],
        tuple(spectrum.pt_class[p] for p in perm),
        spectrum.defective[perm],
    )


def continue_spectra(spectra):
    """Permute a sweep of spectra so band identity follows eigenvector overlap.

    The first spectrum keeps its (Re, Im) order; each later one is
    reordered by maximum-overlap assignment against its predecessor.
    Plain sorting would swap branches where Re E crosses; this keeps a
    band's row index stable through such crossings.
    """
    if not spectra:
        return []
    out = [spectra[0]]
    for nxt in spectra[1:]:
        overlap = np.abs(out[-1].right_vectors.conj().T @ nxt.right_vectors)
        _, cols = scipy.optimize.linear_sum_assignment(-overlap)
        out.append(_permute(nxt, cols))
    return out


def export_spectrum_csv(path, spectrum: SpectrumResult):
    """CSV with columns index, re_E, im_E, pt_class."""
    lines = ["index,re_E,im_E,pt_class"]
    for m, e in enumerate(spectrum.eigenvalues):
        lines.append(f"{m},{e.real:.12e},{e.imag:.12e},{spectrum.pt_class[m]}")
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")


def export_eigenvectors_json(path, spectrum: SpectrumResult):
    """Right eigenvectors as JSON lists of [re, im] pairs, one list per mode."""
    data = [
        [[float(z.real), float(z.imag)] for z in spectrum.right_vectors[:, m]]
        for m in range(spectrum.right_vectors.shape[1])
    ]
    with open(path, "w") as fh:
        json.dump(data, fh)
