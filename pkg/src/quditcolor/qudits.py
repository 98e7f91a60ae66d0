"""Per-node qudit states: hyperspherical angles, angular-momentum matrices,
and the initial-state constructions for both solution strategies.

Each node carries a real unit vector of length c (one component per color),
parameterized by c-1 unconstrained angles.  Basis ordering is by ascending
eigenvalue m of the z angular-momentum matrix; color index = m + (c-1)/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph

# A vanishing prefix sine product makes the remaining angles unidentifiable;
# below this threshold they are set to 0 in the inverse transform.
_DEGENERATE_TAIL = 1e-14

_GRAPH_DEFAULT = object()  # sentinel: fix the graph's own j_max


@dataclass(frozen=True)
class AngularMomentumOps:
    """Angular-momentum matrices for a c-dimensional qudit (l = (c-1)/2)."""

    dim: int
    l: float
    lz: np.ndarray
    lx: np.ndarray
    lx_offdiag: np.ndarray  # superdiagonal of lx, length c-1


def build_ops(c: int) -> AngularMomentumOps:
    """Build Lz (diagonal m = -l..l) and the symmetric tridiagonal Lx."""
    if c < 2:
        raise ValueError(f"qudit dimension must be >= 2, got {c}")
    l = (c - 1) / 2.0
    m = np.arange(c) - l
    lz = np.diag(m)
    # <m+1| Lx |m> = sqrt((l - m)(l + m + 1)) / 2
    off = 0.5 * np.sqrt((l - m[:-1]) * (l + m[:-1] + 1.0))
    lx = np.diag(off, 1) + np.diag(off, -1)
    return AngularMomentumOps(dim=c, l=l, lz=lz, lx=lx, lx_offdiag=off)


def lx_ground_state(c: int) -> np.ndarray:
    """Unit eigenvector of -Lx with lowest eigenvalue (-l), all components >= 0.

    Closed form in the Lz basis: component k is sqrt(C(c-1, k)) / 2^((c-1)/2),
    a binomial-shaped profile peaked at the central colors.
    """
    if c < 2:
        raise ValueError(f"qudit dimension must be >= 2, got {c}")
    v = np.array([math.sqrt(math.comb(c - 1, k)) for k in range(c)])
    return v / np.linalg.norm(v)


def spherical_to_amplitudes(phi: np.ndarray) -> np.ndarray:
    """Map spherical angles to a unit amplitude vector.

    Component k (k < c-1) is cos(phi_k) times the product of sin(phi_j) for
    j < k; the last component is the full sine product.  Accepts a single
    angle vector of length c-1 or a (n, c-1) batch.
    """
    phi = np.asarray(phi, dtype=np.float64)
    single = phi.ndim == 1
    rows = phi[None, :] if single else phi
    psi = _forward(rows)[0]
    return psi[0] if single else psi


def _forward(phi: np.ndarray):
    """Batched spherical map; returns (psi, sin, cos, prefix sine products)."""
    n, _ = phi.shape
    s = np.sin(phi)
    u = np.cos(phi)
    r = np.empty((n, phi.shape[1] + 1))
    r[:, 0] = 1.0
    np.cumprod(s, axis=1, out=r[:, 1:])
    psi = np.empty_like(r)
    np.multiply(r[:, :-1], u, out=psi[:, :-1])
    psi[:, -1] = r[:, -1]
    return psi, s, u, r


def amplitudes_to_angles(psi: np.ndarray) -> np.ndarray:
    """Invert the spherical map for a unit vector (or a batch of them).

    Uses phi_k = atan2(||tail||, psi_k) so all but the final angle land in
    [0, pi]; once the remaining tail norm drops below 1e-14 the rest of the
    angles are set to 0.
    """
    psi = np.asarray(psi, dtype=np.float64)
    single = psi.ndim == 1
    rows = psi[None, :] if single else psi
    norms = np.linalg.norm(rows, axis=1)
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise ValueError("amplitude vector is not unit-norm")
    # tail[:, k] = norm of components k..c-1; tail[:, k] is also the prefix
    # sine product multiplying component k in the forward map.
    tail = np.sqrt(np.cumsum(rows[:, ::-1] ** 2, axis=1))[:, ::-1]
    phi = np.arctan2(tail[:, 1:], rows[:, :-1])
    phi[:, -1] = np.arctan2(rows[:, -1], rows[:, -2])
    degenerate = tail[:, :-1] < _DEGENERATE_TAIL
    phi[degenerate] = 0.0
    return phi[0] if single else phi


@dataclass
class AngleState:
    """The full parameter vector: c-1 angles per free node.

    The fixed node (if any) carries no parameters; its amplitude vector is
    pinned to one-hot (1, 0, ..., 0), i.e. color 0.
    """

    num_nodes: int
    num_colors: int
    angles: np.ndarray  # (n_free, c-1), float64, mutated in place by optimizers
    fixed_node: int | None = None

    def __post_init__(self):
        n_free = self.num_nodes - (0 if self.fixed_node is None else 1)
        expected = (n_free, self.num_colors - 1)
        if self.angles.shape != expected:
            raise ValueError(f"angles shape {self.angles.shape}, expected {expected}")

    @property
    def num_free(self) -> int:
        return self.angles.shape[0]

    @property
    def free_nodes(self) -> np.ndarray:
        """Node indices owning parameter rows, in ascending order."""
        if self.fixed_node is None:
            return np.arange(self.num_nodes)
        return np.delete(np.arange(self.num_nodes), self.fixed_node)

    def amplitudes(self) -> np.ndarray:
        """Per-node unit amplitude vectors, shape (num_nodes, c)."""
        psi = np.empty((self.num_nodes, self.num_colors))
        psi[self.free_nodes] = _forward(self.angles)[0]
        if self.fixed_node is not None:
            psi[self.fixed_node] = 0.0
            psi[self.fixed_node, 0] = 1.0
        return psi

    def probabilities(self) -> np.ndarray:
        """Per-node color probabilities (componentwise squared amplitudes)."""
        return self.amplitudes() ** 2


def _resolve_fixed(graph: Graph, fixed_node) -> int | None:
    if fixed_node is _GRAPH_DEFAULT:
        return graph.j_max
    if fixed_node is not None and not 0 <= fixed_node < graph.num_nodes:
        raise ValueError(f"fixed node {fixed_node} out of range")
    return fixed_node


def init_qdlqa_state(graph: Graph, c: int, f: float, rng: np.random.Generator,
                     fixed_node=_GRAPH_DEFAULT) -> AngleState:
    """Annealing start: every free node near the -Lx ground state.

    Each angle is the ground-state angle plus i.i.d. uniform noise in
    [-f, f); the fixed node (default: the graph's j_max) is one-hot and
    never perturbed.
    """
    if f < 0:
        raise ValueError("perturbation f must be >= 0")
    fixed = _resolve_fixed(graph, fixed_node)
    n_free = graph.num_nodes - (0 if fixed is None else 1)
    base = amplitudes_to_angles(lx_ground_state(c))
    angles = np.tile(base, (n_free, 1))
    if f > 0:
        angles += rng.uniform(-f, f, size=angles.shape)
    return AngleState(graph.num_nodes, c, angles, fixed)


def init_qdgd_state(graph: Graph, c: int, f_tilde: float, rng: np.random.Generator,
                    fixed_node=_GRAPH_DEFAULT) -> AngleState:
    """Gradient-descent start: random amplitudes, normalized.

    Per free node, c entries are drawn uniformly from [0, f_tilde) and the
    vector is normalized (all-zero draws are redrawn); the fixed node is
    one-hot as in the annealing variant.
    """
    if f_tilde <= 0:
        raise ValueError("init scale f_tilde must be > 0")
    fixed = _resolve_fixed(graph, fixed_node)
    n_free = graph.num_nodes - (0 if fixed is None else 1)
    draws = rng.uniform(0.0, f_tilde, size=(n_free, c))
    norms = np.linalg.norm(draws, axis=1)
    while np.any(norms == 0.0):
        zero = norms == 0.0
        draws[zero] = rng.uniform(0.0, f_tilde, size=(int(zero.sum()), c))
        norms = np.linalg.norm(draws, axis=1)
    angles = amplitudes_to_angles(draws / norms[:, None])
    return AngleState(graph.num_nodes, c, angles, fixed)
