"""Cross-validation suite wiring the independent computation routes together.

Each check compares two routes that share no code path (covariance solve
vs dense Fock null space, shape-matrix rapidities vs the alternating-ring
closed form, subset-sum reconstruction of the dense Liouvillean spectrum,
Wilson-loop quantization, spectral reflection symmetry) and reports the
worst residual seen.  The CLI exposes this as the `validate` subcommand;
a fresh checkout must pass every check.
"""

from __future__ import annotations

import dataclasses

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import effective, fock, thirdq, zak
from .lattice import ModelConfig


@dataclasses.dataclass(frozen=True)
class ValidationCheck:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return bool(self.residual <= self.tolerance)


def multiset_distance(a, b):
    """Max pair distance of the optimal matching between two multisets."""
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.shape != b.shape:
        raise ValueError(f"multisets differ in size: {a.shape} vs {b.shape}")
    cost = np.abs(a[:, None] - b[None, :])
    rows, cols = linear_sum_assignment(cost)
    return float(cost[rows, cols].max())


def _oracle_configs():
    for n in (2, 4):
        for pattern, boundary in (("u1", "open"), ("u2", "open"), ("u2", "periodic")):
            for gamma in (0.5, 2.5):
                yield ModelConfig(n=n, t=1.0, delta=1.0, theta=np.pi / 3,
                                  gamma=gamma, boundary=boundary, pattern=pattern)


def check_oracle_equivalence() -> ValidationCheck:
    """Covariance-solve NESS occupations vs dense-Liouvillean null space."""
    worst = 0.0
    for cfg in _oracle_configs():
        occ_cov = thirdq.ness_occupation(thirdq.ness_covariance(cfg))
        rho = fock.oracle_steady_state(fock.dense_liouvillean(cfg))
        occ_dense = fock.site_occupations(rho)
        worst = max(worst, float(np.abs(occ_cov - occ_dense).max()))
    return ValidationCheck("oracle equivalence (NESS occupations)", worst, 1e-8)


def check_ness_residual() -> ValidationCheck:
    """Dense steady states annihilated by their Liouvillean."""
    worst = 0.0
    for cfg in _oracle_configs():
        superop = fock.dense_liouvillean(cfg)
        rho = fock.oracle_steady_state(superop)
        worst = max(worst, float(np.linalg.norm(superop @ fock.vectorize(rho))))
    return ValidationCheck("dense NESS residual", worst, 1e-10)


def check_spectrum_reconstruction() -> ValidationCheck:
    """Dense Liouvillean spectrum equals subset sums of -2*beta."""
    worst = 0.0
    for pattern in ("u1", "u2"):
        cfg = ModelConfig(n=2, t=1.0, delta=1.0, theta=np.pi / 3, gamma=1.1,
                          boundary="open", pattern=pattern)
        betas = thirdq.rapidities(thirdq.build_shape_matrix(cfg)).betas
        sums = []
        for mask in range(1 << len(betas)):
            picked = [betas[m] for m in range(len(betas)) if mask >> m & 1]
            sums.append(-2.0 * np.sum(picked) if picked else 0.0)
        dense = np.linalg.eigvals(fock.dense_liouvillean(cfg))
        worst = max(worst, multiset_distance(dense, np.asarray(sums)))
    return ValidationCheck("liouvillean spectrum reconstruction", worst, 1e-8)


def check_closed_form_rapidities() -> ValidationCheck:
    """Shape-matrix rapidities vs the alternating-ring closed form, n=64."""
    worst = 0.0
    for theta in (np.pi / 6, np.pi / 3, 2 * np.pi / 3):
        for gamma in (0.5, 1.0, 2.0):
            cfg = ModelConfig(n=64, t=1.0, delta=1.0, theta=theta, gamma=gamma,
                              boundary="periodic", pattern="u2")
            numeric = thirdq.rapidities(thirdq.build_shape_matrix(cfg)).betas
            worst = max(worst, multiset_distance(
                numeric, thirdq.analytic_rapidities_u2_ring(cfg)))
    return ValidationCheck("closed-form rapidities (alternating ring)", worst, 1e-9)


def check_zak_quantization() -> ValidationCheck:
    """Re(nu) lands on {0, pi} with the class set by the dimerization sign."""
    cells = ((np.pi / 3, 0.5, "pi"), (np.pi / 3, 0.9, "pi"),
             (2 * np.pi / 3, 0.5, "zero"), (np.pi / 6, 1.2, "pi"))
    worst = 0.0
    for theta, gamma, expected in cells:
        cfg = ModelConfig(n=8, t=1.0, delta=1.0, theta=theta, gamma=gamma,
                          boundary="periodic", pattern="u2")
        result = zak.effective_zak_phase(cfg, band_index=0, n_k=400)
        re = np.mod(result.nu.real, 2.0 * np.pi)
        worst = max(worst, min(re, abs(re - np.pi), 2.0 * np.pi - re))
        if result.real_class != expected:
            worst = max(worst, np.inf)
    return ValidationCheck("zak quantization (unbroken cells)", worst, 1e-6)


def check_lambda_pairing() -> ValidationCheck:
    """Open-chain spectra reflect to their negatives under the site flip."""
    rng = np.random.default_rng(20240817)
    worst = 0.0
    for pattern in ("u1", "u2"):
        for _ in range(3):
            cfg = ModelConfig(n=16, t=1.0, delta=1.0,
                              theta=float(rng.uniform(0.1, np.pi - 0.1)),
                              gamma=float(rng.uniform(0.1, 3.0)),
                              boundary="open", pattern=pattern)
            w = np.linalg.eigvals(effective.build_real_space_hamiltonian(cfg))
            worst = max(worst, multiset_distance(w, -w))
    return ValidationCheck("spectral reflection pairing", worst, 1e-10)


ALL_CHECKS = (
    check_oracle_equivalence,
    check_ness_residual,
    check_spectrum_reconstruction,
    check_closed_form_rapidities,
    check_zak_quantization,
    check_lambda_pairing,
)


def run_validation() -> tuple:
    return tuple(check() for check in ALL_CHECKS)


def format_report(checks) -> str:
    width = max(len(c.name) for c in checks)
    lines = []
    for c in checks:
        status = "PASS" if c.passed else "FAIL"
        lines.append(
            f"{status}  {c.name:<{width}}  max residual {c.residual:.3e}"
            f"  (tolerance {c.tolerance:.1e})"
        )
    failed = sum(not c.passed for c in checks)
    lines.append(
        f"{len(checks) - failed}/{len(checks)} checks passed"
        + (f", {failed} FAILED" if failed else "")
    )
    return "\n".join(lines)
