import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_config, multiset_distance
from dissipative_ssh import (
    ConfigError,
    bloch_band_energies,
    build_bloch_hamiltonian,
    build_real_space_hamiltonian,
    check_lambda_symmetry,
    classify_pt,
    complex_spectrum,
    construct_mbs,
    continue_spectra,
    hopping_matrix,
    lambda_operator,
    mbs_occupation,
)
from dissipative_ssh.effective import export_eigenvectors_json, export_spectrum_csv


def test_real_space_matrix_is_hopping_plus_imaginary_diagonal():
    for pattern, boundary in (("u1", "open"), ("u2", "open"), ("u2", "periodic")):
        cfg = make_config(n=6, pattern=pattern, boundary=boundary, gamma=0.8)
        h = build_real_space_hamiltonian(cfg)
        assert np.array_equal(h.real, hopping_matrix(cfg))
        diag = np.diag(h).imag
        if pattern == "u1":
            expected = np.zeros(6)
            expected[0] = -cfg.gamma
            expected[-1] = cfg.gamma
        else:
            expected = np.where(np.arange(6) % 2 == 0, cfg.gamma, -cfg.gamma)
        assert np.array_equal(diag, expected)
        assert np.array_equal(np.diag(np.diag(h)), h - h.real)


def test_bloch_hamiltonian_matches_ring_spectrum():
    """The 2x2 Bloch blocks over ring momenta reproduce the real-space ring."""
    from dissipative_ssh import ring_momenta

    cfg = make_config(n=8, boundary="periodic", gamma=0.7)
    ring = np.linalg.eigvals(build_real_space_hamiltonian(cfg))
    bloch = np.concatenate(
        [np.linalg.eigvals(build_bloch_hamiltonian(cfg, k)) for k in ring_momenta(cfg.n_cells)]
    )
    assert multiset_distance(ring, bloch) < 1e-12


def test_bloch_band_energies_closed_form():
    cfg = make_config(gamma=0.4)
    for k in (0.0, 1.0, np.pi):
        closed = bloch_band_energies(cfg, k)
        direct = np.linalg.eigvals(build_bloch_hamiltonian(cfg, k))
        assert multiset_distance(closed, direct) < 1e-12
    # u1 has no Bloch form: dissipation only at the two edges
    with pytest.raises(ConfigError):
        build_bloch_hamiltonian(make_config(pattern="u1"), 0.3)


def test_pt_threshold_at_gap_minimum():
    """Eigenvalues stay real up to gamma = |t1 - t2| and split just above."""
    cfg = make_config(boundary="periodic")
    gap = abs(cfg.t1 - cfg.t2)
    ks = np.linspace(-np.pi, np.pi, 101)
    below = np.concatenate([bloch_band_energies(cfg.replace(gamma=0.99 * gap), k) for k in ks])
    above = np.concatenate([bloch_band_energies(cfg.replace(gamma=1.01 * gap), k) for k in ks])
    assert np.abs(below.imag).max() < 1e-10
    assert np.abs(above.imag).max() > 1e-3


def test_complex_spectrum_biorthonormal_on_random_matrix():
    rng = np.random.default_rng(5)
    a = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    spec = complex_spectrum(a)
    assert multiset_distance(spec.eigenvalues, np.linalg.eigvals(a)) < 1e-10
    assert np.allclose(spec.left_vectors @ spec.right_vectors, np.eye(12), atol=1e-9)
    # lexicographic (Re, Im) order
    order = np.lexsort((spec.eigenvalues.imag, spec.eigenvalues.real))
    assert np.array_equal(order, np.arange(12))
    assert not spec.defective.any()
    # left rows reproduce the eigenvalue equation from the left
    resid = spec.left_vectors @ a - spec.eigenvalues[:, None] * spec.left_vectors
    assert np.abs(resid).max() < 1e-9


def test_complex_spectrum_flags_defective_modes():
    jordan = np.array([[0.0, 1.0], [0.0, 0.0]])
    spec = complex_spectrum(jordan)
    assert spec.defective.any()


def test_classify_pt_and_flag():
    cfg = make_config(n=16, gamma=0.5)
    spec = complex_spectrum(build_real_space_hamiltonian(cfg))
    classes, all_real = classify_pt(spec)
    assert set(classes) <= {"real", "gain_broken", "loss_broken"}
    assert not all_real  # edge modes at +-i*gamma break PT at any gamma > 0
    # broken labels come in equal numbers (spectrum symmetric about the real axis)
    assert list(classes).count("gain_broken") == list(classes).count("loss_broken")
    hermitian = complex_spectrum(
        build_real_space_hamiltonian(make_config(n=16, gamma=0.0, pattern="none"))
    )
    h_classes, h_flag = classify_pt(hermitian)
    assert h_flag and set(h_classes) == {"real"}


def test_lambda_symmetry_of_open_chains():
    lam = lambda_operator(6)
    # signed reflection: squares to -1 on even chains, like a spinful parity
    assert np.array_equal(lam @ lam, -np.eye(6))
    for pattern in ("u1", "u2"):
        cfg = make_config(n=6, pattern=pattern, gamma=0.9)
        h = build_real_space_hamiltonian(cfg)
        assert check_lambda_symmetry(h)
        assert np.allclose(lam.T @ h @ lam, -h, atol=1e-14)
    # breaking one hopping element destroys the anti-symmetry
    h[0, 1] += 0.1
    assert not check_lambda_symmetry(h)


def test_spectrum_is_symmetric_about_imaginary_axis():
    rng = np.random.default_rng(17)
    for pattern in ("u1", "u2"):
        for _ in range(3):
            cfg = make_config(
                n=10,
                pattern=pattern,
                theta=rng.uniform(0.1, np.pi - 0.1),
                gamma=rng.uniform(0.1, 2.0),
            )
            w = np.linalg.eigvals(build_real_space_hamiltonian(cfg))
            assert multiset_distance(w, -w) < 1e-10


def test_construct_mbs_rationales_and_count():
    cfg = make_config(n=8, gamma=0.5)
    spec = complex_spectrum(build_real_space_hamiltonian(cfg))
    sel = construct_mbs(spec)
    assert sel.unique
    assert len(sel.occupied) == 4  # half filling
    assert set(sel.rationale) <= {
        "gain_filled",
        "loss_emptied",
        "negative_real_energy",
        "unoccupied",
    }
    # every growing mode is occupied, every decaying one is not
    for m, label in enumerate(sel.rationale):
        e = spec.eigenvalues[m]
        if e.imag > 1e-8:
            assert label == "gain_filled" and m in sel.occupied
        if e.imag < -1e-8:
            assert label == "loss_emptied" and m not in sel.occupied


def test_construct_mbs_flags_zero_modes_as_nonunique():
    # long topological Hermitian chain: the edge pair is zero to machine precision
    cfg = make_config(n=64, gamma=0.0, pattern="none")
    spec = complex_spectrum(build_real_space_hamiltonian(cfg))
    sel = construct_mbs(spec)
    assert not sel.unique
    # 31 strictly negative modes plus both zero modes are occupied
    assert len(sel.occupied) == 33


def test_mbs_occupation_weight_conventions():
    cfg = make_config(n=8, gamma=0.5)
    spec = complex_spectrum(build_real_space_hamiltonian(cfg))
    sel = construct_mbs(spec)
    born = mbs_occupation(spec, sel, weights="right")
    assert born.sum() == pytest.approx(len(sel.occupied), abs=1e-12)
    assert born.min() >= 0.0
    bio = mbs_occupation(spec, sel, weights="biorthogonal")
    assert bio.sum() == pytest.approx(len(sel.occupied), abs=1e-8)
    with pytest.raises(ValueError):
        mbs_occupation(spec, sel, weights="left")


def test_continue_spectra_keeps_branch_identity_through_crossing():
    # two fixed eigenvectors whose eigenvalues cross as the parameter sweeps
    def mat(g):
        return np.diag([g, 1.0 - g]).astype(complex)

    spectra = [complex_spectrum(mat(g)) for g in (0.2, 0.45, 0.55, 0.8)]
    tracked = continue_spectra(spectra)
    first_branch = [s.eigenvalues[0] for s in tracked]
    # row 0 follows the eigenvector that started lowest, through the crossing
    assert np.allclose(first_branch, [0.2, 0.45, 0.55, 0.8])
    # plain (Re, Im) sorting would instead give 0.45 at the third point
    assert spectra[2].eigenvalues[0] == pytest.approx(0.45)


def test_spectrum_exporters(tmp_path):
    cfg = make_config(n=4, gamma=0.3)
    spec = complex_spectrum(build_real_space_hamiltonian(cfg))
    csv_path = tmp_path / "spec.csv"
    export_spectrum_csv(csv_path, spec)
    lines = csv_path.read_text().strip().splitlines()
    assert lines[0] == "index,re_E,im_E,pt_class"
    assert len(lines) == 1 + 4
    json_path = tmp_path / "vecs.json"
    export_eigenvectors_json(json_path, spec)
    import json

    data = json.loads(json_path.read_text())
    assert len(data) == 4 and len(data[0]) == 4 and len(data[0][0]) == 2


@settings(max_examples=30, deadline=None)
@given(
    theta=st.floats(min_value=0.05, max_value=np.pi - 0.05),
    gamma=st.floats(min_value=0.0, max_value=3.0),
    pattern=st.sampled_from(["u1", "u2"]),
)
def test_eigenvalue_pairing_property(theta, gamma, pattern):
    """Open chains: {E} = {-E} as multisets for every theta, gamma, pattern."""
    cfg = make_config(n=8, theta=theta, gamma=gamma, pattern=pattern)
    w = np.linalg.eigvals(build_real_space_hamiltonian(cfg))
    assert multiset_distance(w, -w) < 1e-9
