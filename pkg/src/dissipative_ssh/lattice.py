"""Chain geometry, hopping parameterization, and symmetric bond disorder.

The chain has n sites grouped into n/2 two-site unit cells (sublattices A, B).
Nearest-neighbor hoppings alternate between t1 (intra-cell) and t2
(inter-cell) and are parameterized by a mean amplitude t and a dimerization
angle theta:

    t1 = t * (1 - delta * cos(theta)),   t2 = t * (1 + delta * cos(theta))

so theta < pi/2 is the nontrivial dimerization t1 < t2 (edge modes under open
boundaries) and theta = pi/2 is the gap-closing point t1 = t2.

Balanced gain and loss of rate gamma attaches in one of two patterns:
"u1" puts loss on the first site and gain on the last (open chains only),
"u2" alternates gain on A sites and loss on B sites.

Bond disorder shifts the two hoppings of each cell j in opposite directions,

    t1_j = t1 + R * xi_j * |t1 - t2|,   t2_j = t2 - R * xi_j * |t1 - t2|,

with xi_j drawn uniformly from (-1, 1) under the palindromic constraint
xi_j = xi_{n/2+1-j}, which preserves the reflection symmetry of the chain.
"""

from __future__ import annotations

import dataclasses
import json
import math

import numpy as np

PATTERNS = ("none", "u1", "u2")
BOUNDARIES = ("open", "periodic")


class ConfigError(ValueError):
    """Raised when a model configuration violates a domain constraint."""


@dataclasses.dataclass(frozen=True)
class ModelConfig:
    """Immutable description of one chain instance.

    n: even site count >= 2; t: mean hopping > 0; delta: dimerization
    amplitude >= 0; theta: dimerization angle in [0, pi]; gamma: gain/loss
    rate >= 0; boundary: "open" | "periodic"; pattern: "none" | "u1" | "u2".
    """

    n: int
    t: float = 1.0
    delta: float = 1.0
    theta: float = math.pi / 3
    gamma: float = 0.0
    boundary: str = "open"
    pattern: str = "none"

    def __post_init__(self):
        if not isinstance(self.n, (int, np.integer)) or isinstance(self.n, bool):
            raise ConfigError(f"n must be an integer, got {self.n!r}")
        if self.n < 2 or self.n % 2 != 0:
            raise ConfigError(f"n must be even and >= 2, got {self.n}")
        if not self.t > 0:
            raise ConfigError(f"t must be > 0, got {self.t}")
        if self.delta < 0:
            raise ConfigError(f"delta must be >= 0, got {self.delta}")
        if not 0 <= self.theta <= math.pi:
            raise ConfigError(f"theta must lie in [0, pi], got {self.theta}")
        if self.gamma < 0:
            raise ConfigError(f"gamma must be >= 0, got {self.gamma}")
        if self.boundary not in BOUNDARIES:
            raise ConfigError(f"boundary must be one of {BOUNDARIES}, got {self.boundary!r}")
        if self.pattern not in PATTERNS:
            raise ConfigError(f"pattern must be one of {PATTERNS}, got {self.pattern!r}")
        if self.pattern == "u1" and self.boundary != "open":
            raise ConfigError("pattern 'u1' places gain/loss at the chain ends and requires boundary 'open'")
        if abs(self.delta * math.cos(self.theta)) > 1:
            # Negative hoppings are out of scope; reject rather than clamp.
            raise ConfigError(
                f"|delta*cos(theta)| = {abs(self.delta * math.cos(self.theta)):.6g} > 1 "
                "would produce a negative hopping amplitude"
            )

    @property
    def n_cells(self) -> int:
        return self.n // 2

    @property
    def t1(self) -> float:
        return self.t * (1.0 - self.delta * math.cos(self.theta))

    @property
    def t2(self) -> float:
        return self.t * (1.0 + self.delta * math.cos(self.theta))

    def replace(self, **changes) -> "ModelConfig":
        return dataclasses.replace(self, **changes)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "t": self.t,
            "delta": self.delta,
            "theta": self.theta,
            "gamma": self.gamma,
            "boundary": self.boundary,
            "pattern": self.pattern,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ModelConfig":
        known = {"n", "t", "delta", "theta", "gamma", "boundary", "pattern"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        if "n" not in data:
            raise ConfigError("config requires key 'n'")
        return cls(**data)

    @classmethod
    def from_json(cls, text: str) -> "ModelConfig":
        return cls.from_dict(json.loads(text))


def hopping_amplitudes(config: ModelConfig) -> tuple[float, float]:
    """Return (t1, t2); always satisfies t1 + t2 = 2t."""
    return config.t1, config.t2


@dataclasses.dataclass(frozen=True)
class DisorderRealization:
    """Per-cell disordered hoppings with the cell sums t1_j + t2_j preserved."""

    R: float
    xi: np.ndarray
    t1_tilde: np.ndarray
    t2_tilde: np.ndarray

    @property
    def n_cells(self) -> int:
        return len(self.xi)


def sample_symmetric_disorder(n_cells: int, seed: int) -> np.ndarray:
    """Draw a palindromic vector of n_cells uniform variates on (-1, 1).

    The first half is sampled with numpy's PCG64 generator and mirrored onto
    the second half, so the symmetry xi_j = xi_{n_cells+1-j} holds exactly;
    an odd middle entry is sampled independently. Same seed, same vector.
    """
    if n_cells < 1:
        raise ValueError(f"n_cells must be >= 1, got {n_cells}")
    rng = np.random.Generator(np.random.PCG64(seed))
    half = (n_cells + 1) // 2
    xi = np.empty(n_cells)
    xi[:half] = rng.uniform(-1.0, 1.0, size=half)
    xi[n_cells - half :] = xi[:half][::-1]
    return xi


def apply_disorder(config: ModelConfig, R: float, xi: np.ndarray) -> DisorderRealization:
    """Build the disordered hoppings for one realization.

    xi must be palindromic and lie in [-1, 1]; the closed interval admits the
    deterministic extreme scenario xi_j = 1 used to locate the transitions.
    """
    xi = np.asarray(xi, dtype=float)
    if R < 0:
        raise ValueError(f"disorder strength R must be >= 0, got {R}")
    if xi.shape != (config.n_cells,):
        raise ValueError(f"xi must have length n/2 = {config.n_cells}, got shape {xi.shape}")
    if np.max(np.abs(xi)) > 1:
        raise ValueError("xi entries must lie in [-1, 1]")
    if not np.array_equal(xi, xi[::-1]):
        raise ValueError("xi must be palindromic (xi_j = xi_{n/2+1-j}); asymmetric disorder breaks the chain's reflection symmetry")
    t1, t2 = hopping_amplitudes(config)
    shift = R * xi * abs(t1 - t2)
    return DisorderRealization(R=R, xi=xi, t1_tilde=t1 + shift, t2_tilde=t2 - shift)


def critical_disorder_strengths(config: ModelConfig) -> tuple[float, float | None]:
    """Return (Rc1, Rc2).

    Rc1 = 0.5 is the strength at which the extreme realization equalizes the
    two hoppings (gap closing). Rc2 = (1 - gamma/|t1-t2|)/2 is where it first
    brings the local hopping contrast down to gamma (PT transition); returned
    as None when gamma >= |t1-t2| (already broken at R=0, including t1=t2).
    """
    t1, t2 = hopping_amplitudes(config)
    contrast = abs(t1 - t2)
    rc1 = 0.5
    if config.gamma >= contrast:
        return rc1, None
    return rc1, 0.5 * (1.0 - config.gamma / contrast)


def hopping_matrix(config: ModelConfig, disorder: DisorderRealization | None = None) -> np.ndarray:
    """Real symmetric n x n single-particle hopping matrix (no gain/loss).

    Entry (i, i+1) is -t1_j inside cell j and -t2_j between cells j, j+1;
    periodic chains add the wrap bond -t2 of the last cell between sites
    n-1 and 0.
    """
    n = config.n
    if disorder is None:
        t1 = np.full(config.n_cells, config.t1)
        t2 = np.full(config.n_cells, config.t2)
    else:
        if disorder.n_cells != config.n_cells:
            raise ValueError("disorder realization does not match config size")
        t1 = np.asarray(disorder.t1_tilde, dtype=float)
        t2 = np.asarray(disorder.t2_tilde, dtype=float)
    h = np.zeros((n, n))
    for j in range(config.n_cells):
        a, b = 2 * j, 2 * j + 1
        h[a, b] -= t1[j]
        h[b, a] -= t1[j]
        if b + 1 < n:
            h[b, b + 1] -= t2[j]
            h[b + 1, b] -= t2[j]
        elif config.boundary == "periodic":
            # Wrap bond of the last cell; for n=2 it stacks onto the intra bond.
            h[b, 0] -= t2[j]
            h[0, b] -= t2[j]
    return h


def gain_sites(config: ModelConfig) -> list[int]:
    """0-based site indices subject to gain (particle injection)."""
    if config.pattern == "u1":
        return [config.n - 1]
    if config.pattern == "u2":
        return list(range(0, config.n, 2))
    return []


def loss_sites(config: ModelConfig) -> list[int]:
    """0-based site indices subject to loss (particle extraction)."""
    if config.pattern == "u1":
        return [0]
    if config.pattern == "u2":
        return list(range(1, config.n, 2))
    return []


def ring_momenta(n_cells: int) -> np.ndarray:
    """Allowed momenta 2*pi*j/n_cells, j = 0..n_cells-1, of an n_cells ring."""
    return 2.0 * math.pi * np.arange(n_cells) / n_cells
