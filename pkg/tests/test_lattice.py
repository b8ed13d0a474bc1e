import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import make_config
from dissipative_ssh import (
    ConfigError,
    ModelConfig,
    apply_disorder,
    critical_disorder_strengths,
    gain_sites,
    hopping_amplitudes,
    hopping_matrix,
    loss_sites,
    ring_momenta,
    sample_symmetric_disorder,
)


def test_hopping_amplitudes_follow_theta():
    cfg = make_config(theta=np.pi / 3)
    t1, t2 = hopping_amplitudes(cfg)
    assert t1 == pytest.approx(0.5)
    assert t2 == pytest.approx(1.5)
    # theta = pi/2 removes the dimerization entirely
    flat = make_config(theta=np.pi / 2)
    assert flat.t1 == pytest.approx(flat.t2)
    # the cell sum is theta independent
    assert t1 + t2 == pytest.approx(2 * cfg.t)


@pytest.mark.parametrize(
    "overrides",
    [
        dict(n=7),  # odd site count has no unit cell
        dict(n=0),
        dict(t=0.0),
        dict(t=-1.0),
        dict(delta=-0.1),
        dict(delta=1.5),  # |delta cos(theta)| > 1 makes a hopping negative
        dict(theta=-0.1),
        dict(theta=np.pi + 0.1),
        dict(gamma=-0.5),
        dict(boundary="twisted"),
        dict(pattern="u3"),
        dict(pattern="u1", boundary="periodic"),  # edge dissipation needs edges
    ],
)
def test_config_validation_rejects(overrides):
    params = dict(n=8, t=1.0, delta=1.0, theta=0.0, gamma=0.5, boundary="open", pattern="u2")
    params.update(overrides)
    with pytest.raises(ConfigError):
        ModelConfig(**params)


def test_config_json_roundtrip():
    cfg = make_config(n=12, gamma=1.25, boundary="periodic")
    again = ModelConfig.from_json(cfg.to_json())
    assert again == cfg
    assert cfg.replace(gamma=2.0).gamma == 2.0
    assert cfg.gamma == 1.25  # frozen original untouched


def test_hopping_matrix_open_structure():
    cfg = make_config(n=6, boundary="open", gamma=0.0, pattern="none")
    h = hopping_matrix(cfg)
    t1, t2 = cfg.t1, cfg.t2
    expected = np.zeros((6, 6))
    for i, t in zip(range(5), [t1, t2, t1, t2, t1]):
        expected[i, i + 1] = expected[i + 1, i] = -t
    assert np.array_equal(h, expected)


def test_hopping_matrix_ring_wrap():
    cfg = make_config(n=4, boundary="periodic", pattern="none", gamma=0.0)
    h = hopping_matrix(cfg)
    assert h[3, 0] == h[0, 3] == -cfg.t2
    # n = 2 is the degenerate ring where the wrap bond and the intracell
    # bond connect the same pair of sites; amplitudes must accumulate
    tiny = make_config(n=2, boundary="periodic", pattern="none", gamma=0.0)
    h2 = hopping_matrix(tiny)
    assert h2[0, 1] == pytest.approx(-(tiny.t1 + tiny.t2))


def test_gain_loss_site_patterns():
    edge = make_config(pattern="u1", boundary="open")
    assert list(loss_sites(edge)) == [0]
    assert list(gain_sites(edge)) == [edge.n - 1]
    alt = make_config(pattern="u2", n=6)
    assert list(gain_sites(alt)) == [0, 2, 4]
    assert list(loss_sites(alt)) == [1, 3, 5]
    silent = make_config(pattern="none")
    assert len(gain_sites(silent)) == len(loss_sites(silent)) == 0


def test_ring_momenta():
    k = ring_momenta(4)
    assert len(k) == 4
    assert np.allclose(sorted(k % (2 * np.pi)), [0.0, np.pi / 2, np.pi, 3 * np.pi / 2])


def test_symmetric_disorder_is_palindromic_and_deterministic():
    for n_cells in (5, 8):
        xi = sample_symmetric_disorder(n_cells, seed=7)
        assert xi.shape == (n_cells,)
        assert np.array_equal(xi, xi[::-1])
        assert np.abs(xi).max() < 1.0
        assert np.array_equal(xi, sample_symmetric_disorder(n_cells, seed=7))
    assert not np.array_equal(
        sample_symmetric_disorder(8, seed=7), sample_symmetric_disorder(8, seed=8)
    )


def test_apply_disorder_validation():
    cfg = make_config(n=8)
    good = np.ones(4)
    with pytest.raises(ValueError):
        apply_disorder(cfg, -0.1, good)
    with pytest.raises(ValueError):
        apply_disorder(cfg, 0.2, np.ones(3))
    with pytest.raises(ValueError):
        apply_disorder(cfg, 0.2, 1.5 * good)
    with pytest.raises(ValueError):
        apply_disorder(cfg, 0.2, np.array([0.1, 0.2, 0.3, 0.4]))


def test_extreme_realization_hits_crossings():
    cfg = make_config(n=8, theta=np.pi / 3, gamma=0.5)
    xi = np.ones(cfg.n_cells)
    # at R = 0.5 the extreme realization equalizes every bond pair
    half = apply_disorder(cfg, 0.5, xi)
    assert np.allclose(half.t1_tilde, half.t2_tilde)
    # at R = 0.25 the local contrast first touches gamma
    quarter = apply_disorder(cfg, 0.25, xi)
    assert np.allclose(np.abs(quarter.t1_tilde - quarter.t2_tilde), cfg.gamma)


def test_critical_disorder_strengths():
    cfg = make_config(theta=np.pi / 3, gamma=0.5)  # contrast |t1 - t2| = 1
    rc1, rc2 = critical_disorder_strengths(cfg)
    assert rc1 == pytest.approx(0.5)
    assert rc2 == pytest.approx(0.25)
    # gamma at or above the contrast: no PT crossing left to find
    assert critical_disorder_strengths(cfg.replace(gamma=1.0))[1] is None
    assert critical_disorder_strengths(make_config(theta=np.pi / 2))[1] is None


@settings(max_examples=50, deadline=None)
@given(
    r=st.floats(min_value=0.0, max_value=1.0),
    half=st.lists(st.floats(min_value=-1.0, max_value=1.0), min_size=2, max_size=4),
    theta=st.floats(min_value=0.0, max_value=np.pi),
    gamma=st.floats(min_value=0.0, max_value=3.0),
)
def test_disorder_preserves_cell_sums(r, half, theta, gamma):
    """The symmetric draw shifts t1 and t2 oppositely inside every cell."""
    xi = np.concatenate([half, half[::-1]])
    cfg = make_config(n=2 * len(xi), theta=theta, gamma=gamma)
    real = apply_disorder(cfg, r, xi)
    assert np.allclose(real.t1_tilde + real.t2_tilde, cfg.t1 + cfg.t2, atol=1e-12)
    assert np.array_equal(real.t1_tilde[::-1], real.t1_tilde) == np.array_equal(
        xi, xi[::-1]
    )
