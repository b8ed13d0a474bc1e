"""Complex Zak phases from biorthogonal Wilson loops.

Bands of the 2x2 Bloch Hamiltonian or the 8x8 Bloch Liouvillean are
tracked around the Brillouin zone by eigenvector overlap; the Zak phase
then comes from the discrete Wilson loop built on the link matrices
F_j[a,b] = <chi_a(k_j)|phi_b(k_{j+1})> and their reverses
B_j[a,b] = <chi_a(k_{j+1})|phi_b(k_j)>:

* Re(nu) is minus the phase of the mean eigenvalue of the ordered
  product W = F_0 F_1 ... F_{N-1}.  Per-k rescalings of the frames only
  conjugate W, so this is exactly gauge invariant, and it is read once,
  modulo 2*pi, which is the natural domain of a Zak phase.  Averaging
  the eigenvalues before taking the phase keeps a degenerate band's
  Wilson pair from straddling the branch cut at +/-pi.
* Im(nu) is (1/2d) sum_j (ln|det F_j| - ln|det B_j|).  Frame
  rescalings telescope away around the closed loop, the one-sided
  O(dk) magnitude bias cancels between F and B, and in the Hermitian
  limit B_j = conj(F_j) makes the sum exactly zero.

Per-link principal logarithms of complex links are deliberately
avoided: no branch assignment of individual links can survive the
random-gauge invariance contract, while the spectrum of W can.
"""

from __future__ import annotations

import dataclasses

import numpy as np
import scipy.linalg

from .effective import build_bloch_hamiltonian, complex_spectrum
from .lattice import ModelConfig
from .thirdq import build_bloch_liouvillean

ZAK_CLASSES = ("zero", "pi", "unquantized", "undefined_broken", "undefined_gapless")


class GaplessError(RuntimeError):
    """Band gap (or band continuity) lost somewhere on the k-loop."""


class DefectiveFrameError(RuntimeError):
    """Tracked band hit an exceptional point or lost biorthonormality."""


class BranchError(RuntimeError):
    """A Wilson link degenerated; refine N_k."""


@dataclasses.dataclass(frozen=True)
class BlochBand:
    """Band frames around the Brillouin zone, endpoint identified.

    right holds kets with shape (N_k+1, dim, d), left holds bras with
    shape (N_k+1, d, dim), biorthonormal per k; the k = 2*pi entry
    repeats the k = 0 entry, so loop closure is exact by construction.
    """

    k_grid: np.ndarray
    right: np.ndarray
    left: np.ndarray
    eigenvalues: np.ndarray
    band_index: int
    degeneracy: int


@dataclasses.dataclass(frozen=True)
class ZakPhaseResult:
    nu: complex
    real_class: str
    n_k: int
    richardson_estimate: float


def _invariant_frames(a, center, radius, d, k):
    """Biorthonormal frames of the d-dim invariant subspace around center.

    Schur reordering is used instead of raw eigenvectors: within a
    numerically split degenerate cluster of a non-normal matrix, eig can
    return nearly parallel vectors, while the reordered Schur basis is
    conditioned by the cluster's gap to the rest of the spectrum only.
    """
    t, z, sdim = scipy.linalg.schur(
        a, output="complex", sort=lambda w: np.abs(w - center) <= radius
    )
    t2, z2, sdim2 = scipy.linalg.schur(
        a.conj().T, output="complex",
        sort=lambda w: np.abs(w - np.conj(center)) <= radius,
    )
    if sdim != d or sdim2 != d:
        raise GaplessError(
            f"cluster selected {sdim}/{sdim2} states, expected {d}, near k={k:.6f}"
        )
    right = z[:, :d]
    rows = z2[:, :d].conj().T
    overlap = rows @ right
    if np.linalg.svd(overlap, compute_uv=False).min() <= 1e-8:
        raise DefectiveFrameError(f"exceptional point near k={k:.6f}")
    return right, np.linalg.solve(overlap, rows)


def track_band(builder, band_index, n_k, degeneracy=1, gap_tol=1e-6, link_tol=0.5):
    """Follow one band (or degenerate subspace) around the Brillouin zone.

    builder maps k to the Bloch matrix.  band_index selects the start
    eigenvalue at k=0 in (Re, Im) order; with degeneracy d > 1 the
    whole d-dimensional cluster containing it is tracked.  Continuation
    picks, at each k step, the d eigenvalues nearest the previous
    cluster center; frames come from Schur invariant subspaces.  Raises
    GaplessError when the rest of the spectrum approaches the cluster
    within gap_tol*scale (or crowds the selection), and
    DefectiveFrameError at exceptional points.  Frames are phase
    aligned to their predecessor (unitary polar factor of the link);
    this keeps the finite-difference connection check meaningful and
    does not affect the Wilson spectrum.
    """
    k_grid = np.linspace(0.0, 2.0 * np.pi, n_k + 1)
    spec = complex_spectrum(builder(k_grid[0]))
    dim = len(spec.eigenvalues)
    scale = max(1.0, np.abs(spec.eigenvalues).max())
    target = spec.eigenvalues[band_index]
    cluster = np.flatnonzero(np.abs(spec.eigenvalues - target) < 1e-8 * scale)
    if len(cluster) != degeneracy:
        raise GaplessError(
            f"band {band_index} at k=0 has multiplicity {len(cluster)}, expected {degeneracy}"
        )

    right = np.empty((n_k + 1, dim, degeneracy), dtype=complex)
    left = np.empty((n_k + 1, degeneracy, dim), dtype=complex)
    evs = np.empty((n_k + 1, degeneracy), dtype=complex)
    center = spec.eigenvalues[cluster].mean()

    for j in range(n_k):
        k = k_grid[j]
        a = builder(k)
        w = np.linalg.eigvals(a)
        order = np.argsort(np.abs(w - center))
        chosen = w[order[:degeneracy]]
        center = chosen.mean()
        spread = np.abs(chosen - center).max()
        rest = w[order[degeneracy:]]
        gap = np.abs(rest - center).min() if len(rest) else np.inf
        if gap <= max(gap_tol * scale, 3.0 * spread):
            raise GaplessError(f"band gap {gap:.3e} near k={k:.6f}")
        right[j], left[j] = _invariant_frames(
            a, center, 0.5 * (spread + gap), degeneracy, k
        )
        evs[j] = chosen[np.lexsort((chosen.imag, chosen.real))]
        if j:
            link = left[j - 1] @ right[j]
            if np.linalg.svd(link, compute_uv=False).min() < link_tol:
                raise GaplessError(f"band continuity lost near k={k:.6f}")
            u, _ = scipy.linalg.polar(link)
            right[j] = right[j] @ u.conj().T
            left[j] = u @ left[j]

    right[n_k] = right[0]
    left[n_k] = left[0]
    evs[n_k] = evs[0]
    closing = left[n_k - 1] @ right[n_k]
    if np.linalg.svd(closing, compute_uv=False).min() < link_tol:
        raise GaplessError("band continuity lost on the closing link")
    return BlochBand(k_grid, right, left, evs, band_index, degeneracy)


def _wilson_nu(band: BlochBand, stride=1):
    """nu at the given k stride: Wilson spectrum phase + symmetric magnitude sum."""
    n_k = len(band.k_grid) - 1
    d = band.degeneracy
    wilson = np.eye(d, dtype=complex)
    im_sum = 0.0
    for j in range(0, n_k, stride):
        nxt = j + stride
        fwd = band.left[j] @ band.right[nxt]
        bwd = band.left[nxt] @ band.right[j]
        det_f = np.linalg.det(fwd)
        det_b = np.linalg.det(bwd)
        if det_f == 0.0 or det_b == 0.0:
            raise BranchError("vanishing Wilson link; refine N_k")
        wilson = wilson @ fwd
        im_sum += np.log(abs(det_f)) - np.log(abs(det_b))
    lam = np.linalg.eigvals(wilson)
    lam_bar = lam.mean()
    if abs(lam_bar) == 0.0 or np.abs(lam - lam_bar).max() > 0.5 * abs(lam_bar):
        raise DefectiveFrameError("Wilson eigenvalues of the degenerate band split")
    return complex(-np.angle(lam_bar), im_sum / (2.0 * d))


def discrete_zak_phase(band: BlochBand, quantization_tol=1e-6) -> ZakPhaseResult:
    """Zak phase of a tracked band from its discrete Wilson loop.

    Re(nu) lives in (-pi, pi]; a band at the quantized value pi may
    legitimately report -pi, which quantize_real_part treats as the
    same class.  The Richardson estimate re-evaluates the same frames
    on every second k-point and divides the change by three (O(dk^2)
    estimator), with the Re difference taken modulo 2*pi.
    """
    n_k = len(band.k_grid) - 1
    for j in (0, n_k // 2):
        resid = np.abs(band.left[j] @ band.right[j] - np.eye(band.degeneracy)).max()
        if resid > 1e-6:
            raise DefectiveFrameError(
                f"frame at k={band.k_grid[j]:.6f} is not biorthonormal"
            )
    nu = _wilson_nu(band)
    if n_k % 2 == 0:
        nu_half = _wilson_nu(band, stride=2)
        d_re = abs(np.angle(np.exp(1j * (nu.real - nu_half.real))))
        richardson = abs(complex(d_re, nu.imag - nu_half.imag)) / 3.0
    else:
        richardson = float("nan")
    real_class = quantize_real_part(nu, quantization_tol)
    return ZakPhaseResult(nu, real_class, n_k, richardson)


def quantize_real_part(nu, tol=1e-6):
    """Classify Re(nu) mod 2*pi against {0, pi}."""
    if isinstance(nu, ZakPhaseResult):
        nu = nu.nu
    re = np.mod(np.real(nu), 2.0 * np.pi)
    if min(re, 2.0 * np.pi - re) <= tol:
        return "zero"
    if abs(re - np.pi) <= tol:
        return "pi"
    return "unquantized"


def finite_difference_connection_check(band: BlochBand, j):
    """|centered-difference connection - link-log connection| at node j.

    Only defined for nondegenerate bands; both estimates are O(dk^2)
    approximations of i<chi|d_k phi> in the tracked (phase-aligned)
    gauge, so the residual shrinks by ~4 when N_k doubles.
    """
    if band.degeneracy != 1:
        raise ValueError("connection check is defined for nondegenerate bands")
    n_k = len(band.k_grid) - 1
    if not 1 <= j <= n_k - 1:
        raise IndexError("need an interior node with both neighbors")
    dk = band.k_grid[1] - band.k_grid[0]
    chi = band.left[j][0]
    fd = 1j * (chi @ (band.right[j + 1][:, 0] - band.right[j - 1][:, 0])) / (2.0 * dk)
    fwd = chi @ band.right[j + 1][:, 0]
    bwd = chi @ band.right[j - 1][:, 0]
    linklog = 1j * np.log(fwd / bwd) / (2.0 * dk)
    return abs(fd - linklog)


def bloch_hamiltonian_builder(config: ModelConfig):
    return lambda k: build_bloch_hamiltonian(config, k)


def bloch_liouvillean_builder(config: ModelConfig):
    return lambda k: build_bloch_liouvillean(config, k)


def nmm_band_index(config: ModelConfig):
    """Deterministic NMM band choice: largest Im at k=0, then largest Re.

    Returns (band_index, degeneracy) in the (Re, Im)-sorted order used
    by complex_spectrum; for the alternating ring this is the twofold
    (gamma + i E(0))/2 cluster.
    """
    spec = complex_spectrum(build_bloch_liouvillean(config, 0.0))
    w = spec.eigenvalues
    scale = max(1.0, np.abs(w).max())
    best = max(range(len(w)), key=lambda m: (w[m].imag, w[m].real))
    cluster = np.flatnonzero(np.abs(w - w[best]) < 1e-8 * scale)
    return int(cluster[0]), len(cluster)


def effective_zak_phase(config: ModelConfig, band_index=0, n_k=2000) -> ZakPhaseResult:
    """Zak phase of one Bloch-Hamiltonian band (0 = lower in Re order)."""
    band = track_band(bloch_hamiltonian_builder(config), band_index, n_k)
    return discrete_zak_phase(band)


def liouvillean_zak_phase(config: ModelConfig, n_k=2000) -> ZakPhaseResult:
    """Zak phase of the deterministic NMM band of the Bloch Liouvillean."""
    idx, deg = nmm_band_index(config)
    band = track_band(bloch_liouvillean_builder(config), idx, n_k, degeneracy=deg)
    return discrete_zak_phase(band)


@dataclasses.dataclass(frozen=True)
class PhaseDiagram:
    """(theta, gamma) grid of Zak phases; cells that failed hold nan + a class."""

    theta_grid: np.ndarray
    gamma_grid: np.ndarray
    re_nu: np.ndarray
    im_nu: np.ndarray
    classes: tuple
    which: str


def phase_diagram(config_template: ModelConfig, theta_grid, gamma_grid, which,
                  n_k=2000, tol=1e-6) -> PhaseDiagram:
    """Zak-phase classes over a (theta, gamma) grid.

    which="effective": lower Bloch-Hamiltonian band, with cells at
    gamma >= |t1 - t2| classified undefined_broken up front (PT-broken
    regime, no quantization statement).  which="liouvillean": the NMM
    band, defined for gamma > 0 away from the gapless line theta=pi/2.
    Per-cell failures are recorded as undefined classes, never raised.
    """
    if which not in ("effective", "liouvillean"):
        raise ValueError(f"unknown diagram kind {which!r}")
    theta_grid = np.asarray(theta_grid, dtype=float)
    gamma_grid = np.asarray(gamma_grid, dtype=float)
    shape = (len(theta_grid), len(gamma_grid))
    re_nu = np.full(shape, np.nan)
    im_nu = np.full(shape, np.nan)
    classes = []
    for i, theta in enumerate(theta_grid):
        row = []
        for j, gamma in enumerate(gamma_grid):
            cfg = config_template.replace(theta=float(theta), gamma=float(gamma))
            row.append(_diagram_cell(cfg, which, n_k, tol, re_nu, im_nu, i, j))
        classes.append(tuple(row))
    return PhaseDiagram(theta_grid, gamma_grid, re_nu, im_nu, tuple(classes), which)


def _diagram_cell(cfg, which, n_k, tol, re_nu, im_nu, i, j):
    if which == "effective":
        if cfg.gamma >= abs(cfg.t1 - cfg.t2):
            return "undefined_broken"
        compute = lambda: effective_zak_phase(cfg, band_index=0, n_k=n_k)
    else:
        if cfg.gamma <= 0.0:
            return "undefined_gapless"
        compute = lambda: liouvillean_zak_phase(cfg, n_k=n_k)
    try:
        result = compute()
    except (GaplessError, BranchError):
        return "undefined_gapless"
    except DefectiveFrameError:
        return "undefined_broken"
    re_nu[i, j] = result.nu.real
    im_nu[i, j] = result.nu.imag
    return quantize_real_part(result.nu, tol)


def export_phase_diagram_csv(path, diagram: PhaseDiagram, metadata=()):
    """CSV columns theta, gamma, re_nu, im_nu, class with # metadata lines."""
    lines = [f"# {m}" for m in metadata]
    lines.append(f"# diagram={diagram.which}")
    lines.append("theta,gamma,re_nu,im_nu,class")
    for i, theta in enumerate(diagram.theta_grid):
        for j, gamma in enumerate(diagram.gamma_grid):
            lines.append(
                f"{theta:.12e},{gamma:.12e},{diagram.re_nu[i, j]:.12e},"
                f"{diagram.im_nu[i, j]:.12e},{diagram.classes[i][j]}"
            )
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
