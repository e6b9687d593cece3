"""Fully analytic covariance formulas for homogeneous complete and star graphs.

All formulas assume identical inertia eta, identical damping d and
identical line weights gamma, with canonical node/line indices: complete
graphs list lines in lexicographic order; star graphs have the root at
node 1 and line k connecting the root to node k + 1.

The scalar display functions accept the network size as a float so that
trend analysis can differentiate with respect to it; the report builders
require an integer size.

Non-displayed block entries (frequency off-diagonals, cross block) come
from the uniform-ratio solution evaluated on the exact eigenvalue
clusters of these graphs, via their spectral projectors: no numerical
eigendecomposition or Lyapunov solve is involved anywhere in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AssumptionViolatedError, InvalidGraphError
from .graphs import canonical_complete, canonical_star, incidence
from .variance import METHOD_CLOSED, CovarianceReport, make_report


@dataclass(frozen=True)
class HomogeneousParams:
    """Homogeneous network parameters: size, line weight, inertia, damping, noise."""

    n: int
    gamma: float
    eta: float
    damping: float
    noise: np.ndarray

    def __post_init__(self) -> None:
        if self.n < 2:
            raise InvalidGraphError(f"need at least 2 nodes, got {self.n}")
        if not (self.gamma > 0 and self.eta > 0 and self.damping > 0):
            raise InvalidGraphError("gamma, eta and damping must all be positive")
        noise = np.asarray(self.noise, dtype=float)
        if noise.shape != (self.n,):
            raise InvalidGraphError(f"noise must have shape ({self.n},), got {noise.shape}")
        if not np.all(noise >= 0):
            raise InvalidGraphError("noise strengths must be non-negative")
        object.__setattr__(self, "noise", noise)

    @property
    def noise_sq(self) -> np.ndarray:
        return self.noise**2

    @property
    def trace_noise_sq(self) -> float:
        return float(self.noise_sq.sum())


@dataclass(frozen=True)
class SingleSourceSummary:
    """Scalar variances for a single disturbance source on a complete graph
    (also valid for a star graph disturbed at its root)."""

    source_frequency_variance: float
    other_frequency_variance: float
    incident_line_variance: float
    other_line_variance: float


@dataclass(frozen=True)
class StarLeafSummary:
    """Scalar variances for a star graph disturbed at leaf node 2 only."""

    root_frequency_variance: float
    leaf_frequency_variance: float
    other_frequency_variance: float
    source_line_variance: float
    other_line_variance: float


# ---------------------------------------------------------------------------
# Scalar displays (continuous network size)
# ---------------------------------------------------------------------------


def complete_source_frequency(n: float, gamma: float, eta: float, damping: float, noise: float) -> float:
    """Frequency variance at the single disturbed node of a complete graph."""
    d, b2 = damping, noise**2
    return b2 / (2 * d * eta) - (n - 1) * gamma * b2 / (d * n * (2 * d**2 + gamma * eta * n))


def complete_other_frequency(n: float, gamma: float, eta: float, damping: float, noise: float) -> float:
    """Frequency variance at any undisturbed node of a complete graph."""
    d, b2 = damping, noise**2
    return gamma * b2 / (d * n * (2 * d**2 + gamma * eta * n))


def _complete_frequency_diag(n: float, gamma: float, eta: float, damping: float,
                             b_sq: float, trace_sq: float) -> float:
    """Frequency variance at a node of a complete graph, general noise pattern."""
    d = damping
    denom = d * n * (2 * d**2 + gamma * eta * n)
    return (1 / (2 * d * eta) - gamma * (n - 1) / denom) * b_sq + gamma * (trace_sq - b_sq) / denom


def _star_leaf_frequency_diag(n: float, gamma: float, eta: float, damping: float,
                              b_sq: float, root_sq: float, trace_sq: float) -> float:
    """Frequency variance at a star leaf, general noise pattern (seven terms)."""
    d, g, e = damping, gamma, eta
    w_top = 2 * d**2 + g * e * n
    w_star = 2 * d**2 * (n + 1) + g * e * (n - 1) ** 2
    w_mid = 2 * d**2 + g * e
    rest = trace_sq - b_sq - root_sq
    return (
        g * root_sq / (d * n * w_top)
        + b_sq / (2 * d * e)
        - g * b_sq / (d * n * w_top)
        - g * (n - 2) * b_sq / (d * n * w_star)
        - g**2 * e * (n - 2) * b_sq / (d * n * w_mid * w_top)
        + g * rest / (d * n * w_star)
        + g**2 * e * rest / (d * n * w_mid * w_top)
    )


def star_leaf_frequency(n: float, gamma: float, eta: float, damping: float, noise: float) -> float:
    """Frequency variance at the disturbed leaf (node 2) of a star graph."""
    d, g, e, b2 = damping, gamma, eta, noise**2
    return (
        b2 / (2 * d * e)
        - g * b2 / (d * n * (2 * d**2 + g * e * n))
        - g * (n - 2) * b2 / (d * n * (2 * d**2 * (n + 1) + g * e * (n - 1) ** 2))
        - g**2 * e * (n - 2) * b2 / (d * n * (2 * d**2 + g * e) * (2 * d**2 + g * e * n))
    )


def star_other_frequency(n: float, gamma: float, eta: float, damping: float, noise: float) -> float:
    """Frequency variance at an undisturbed leaf when leaf 2 is the source."""
    d, g, e, b2 = damping, gamma, eta, noise**2
    return (
        g * b2 / (d * n * (2 * d**2 * (1 + n) + g * e * (n - 1) ** 2))
        + g**2 * e * b2 / (d * n * (2 * d**2 + g * e) * (2 * d**2 + g * e * n))
    )


def star_source_line(n: float, gamma: float, eta: float, damping: float, noise: float) -> float:
    """Angle-difference variance on the root-source line when leaf 2 is the source."""
    d, g, e, b2 = damping, gamma, eta, noise**2
    w_star = 2 * d**2 * (1 + n) + g * e * (n - 1) ** 2
    return ((n - 1) / (2 * d * g * n) - (n - 2) * (2 * d**2 + g * e * (n + 1)) / (2 * d * g * n * w_star)) * b2


def star_other_line(n: float, gamma: float, eta: float, damping: float, noise: float) -> float:
    """Angle-difference variance on any other line when leaf 2 is the source."""
    d, g, e, b2 = damping, gamma, eta, noise**2
    w_star = 2 * d**2 * (1 + n) + g * e * (n - 1) ** 2
    return (2 * d**2 + g * e * (n + 1)) / (2 * d * g * n * w_star) * b2


def _star_line_diag(n: float, gamma: float, eta: float, damping: float,
                    leaf_sq: float, root_sq: float, trace_sq: float) -> float:
    """Angle-difference variance on star line k (root to node k+1), general noise."""
    d, g, e = damping, gamma, eta
    w_star = 2 * d**2 * (1 + n) + g * e * (n - 1) ** 2
    coef = 2 * d**2 + g * e * (n + 1)
    return (
        root_sq / (2 * d * g * n)
        + ((n - 1) / (2 * d * g * n) - (n - 2) * coef / (2 * d * g * n * w_star)) * leaf_sq
        + coef * (trace_sq - leaf_sq - root_sq) / (2 * d * g * n * w_star)
    )


def _star_line_offdiag(n: float, gamma: float, eta: float, damping: float,
                       leaf_k_sq: float, leaf_q_sq: float, root_sq: float,
                       trace_sq: float) -> float:
    """Angle-difference covariance between distinct star lines k and q."""
    d, g, e = damping, gamma, eta
    w_star = 2 * d**2 * (1 + n) + g * e * (n - 1) ** 2
    lead = 2 * d**2 * (n + 1) + g * e * (n - 1) ** 2
    mid = -2 * d**2 * (n - 1) + g * e * (2 * n - n**2 + 1)
    coef = 2 * d**2 + g * e * (n + 1)
    return (
        lead * root_sq
        + mid * (leaf_k_sq + leaf_q_sq)
        + coef * (trace_sq - leaf_k_sq - leaf_q_sq - root_sq)
    ) / (2 * d * g * n * w_star)


def critical_size(damping: float, gamma: float, eta: float) -> int:
    """Network size beyond which the source node's frequency variance grows.

    Returns floor(1 + sqrt(1 + 2 d^2 / (gamma eta))); for complete graphs
    larger than this, adding nodes increases the variance at the source.
    """
    if not (damping > 0 and gamma > 0 and eta > 0):
        raise InvalidGraphError("damping, gamma and eta must all be positive")
    return math.floor(1.0 + math.sqrt(1.0 + 2.0 * damping**2 / (gamma * eta)))


def complete_source_frequency_floor(gamma: float, eta: float, damping: float, noise: float) -> float:
    """Size-independent lower bound of the source-node frequency variance."""
    d, b2 = damping, noise**2
    root = (math.sqrt(gamma * eta) + math.sqrt(gamma * eta + 2 * d**2)) ** 2
    return (1 / (2 * d * eta) - gamma / (d * root)) * b2


# ---------------------------------------------------------------------------
# Exact spectral-cluster evaluation of the uniform-ratio solution
# ---------------------------------------------------------------------------


def _cluster_covariance(
    clusters: list[tuple[float, np.ndarray]],
    noise_sq: np.ndarray,
    inc: np.ndarray,
    eta: float,
    alpha: float,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Uniform-ratio covariance blocks from exact eigenvalue clusters.

    ``clusters`` lists (eigenvalue of the inertia-whitened Laplacian,
    spectral projector), ascending, the first being the simple zero mode.
    The explicit spectral-coordinate solution depends on eigenvectors only
    through these projectors, so any orthonormal cluster basis is implied.
    """

    def chi(lam_a: float, lam_b: float) -> float:
        return (lam_a - lam_b) ** 2 + 2 * alpha**2 * (lam_a + lam_b)

    b_sq = np.diag(noise_sq)
    n = b_sq.shape[0]
    q_omega = np.zeros((n, n))
    q_delta_core = np.zeros((n, n))
    q_cross_core = np.zeros((n, n))
    for lam_a, proj_a in clusters:
        for lam_b, proj_b in clusters:
            sandwich = proj_a @ b_sq @ proj_b
            if lam_a == 0.0 and lam_b == 0.0:
                q_omega += sandwich / (2 * alpha)
                continue
            q_omega += alpha * (lam_a + lam_b) / chi(lam_a, lam_b) * sandwich
            if lam_a > 0.0 and lam_b > 0.0:
                q_delta_core += 2 * alpha / chi(lam_a, lam_b) * sandwich
            if lam_b > 0.0:
                q_cross_core += (lam_b - lam_a) / chi(lam_a, lam_b) * sandwich

    q_delta = inc.T @ q_delta_core @ inc / eta**2
    q_omega /= eta**2
    q_cross = q_cross_core @ inc / eta**2
    return q_delta, q_omega, q_cross


def _complete_clusters(p: HomogeneousParams) -> list[tuple[float, np.ndarray]]:
    n = p.n
    mean_proj = np.full((n, n), 1.0 / n)
    return [(0.0, mean_proj), (p.gamma * n / p.eta, np.eye(n) - mean_proj)]


def _star_clusters(p: HomogeneousParams) -> list[tuple[float, np.ndarray]]:
    n = p.n
    mean_proj = np.full((n, n), 1.0 / n)
    heavy = np.full(n, -1.0)
    heavy[0] = n - 1.0
    heavy_proj = np.outer(heavy, heavy) / (n * (n - 1.0))
    middle_proj = np.eye(n) - mean_proj - heavy_proj
    return [
        (0.0, mean_proj),
        (p.gamma / p.eta, middle_proj),
        (p.gamma * n / p.eta, heavy_proj),
    ]


# ---------------------------------------------------------------------------
# Report builders
# ---------------------------------------------------------------------------


def complete_report(p: HomogeneousParams) -> CovarianceReport:
    """Covariance blocks for the homogeneous complete graph.

    The angle block is (1 / (2 d gamma n)) C^T B^2 C and the frequency
    diagonal follows the per-node display; remaining entries come from the
    exact cluster evaluation.
    """
    graph = canonical_complete(p.n, p.gamma)
    inc = incidence(graph)
    alpha = p.damping / p.eta

    q_delta = inc.T @ (p.noise_sq[:, None] * inc) / (2 * p.damping * p.gamma * p.n)
    _, q_omega, q_cross = _cluster_covariance(_complete_clusters(p), p.noise_sq, inc, p.eta, alpha)
    for i in range(p.n):
        q_omega[i, i] = _complete_frequency_diag(
            p.n, p.gamma, p.eta, p.damping, p.noise_sq[i], p.trace_noise_sq
        )
    return make_report(q_delta, q_omega, q_cross, METHOD_CLOSED, {"graph": "complete"})


def star_report(p: HomogeneousParams) -> CovarianceReport:
    """Covariance blocks for the homogeneous star graph (root at node 1).

    Every angle-difference entry and the frequency diagonal follow the
    displayed formulas; the remaining entries come from the exact cluster
    evaluation.
    """
    graph = canonical_star(p.n, p.gamma)
    inc = incidence(graph)
    alpha = p.damping / p.eta
    b_sq = p.noise_sq
    trace_sq = p.trace_noise_sq

    m = p.n - 1
    q_delta = np.empty((m, m))
    for k in range(m):
        q_delta[k, k] = _star_line_diag(
            p.n, p.gamma, p.eta, p.damping, b_sq[k + 1], b_sq[0], trace_sq
        )
        for q in range(k + 1, m):
            value = _star_line_offdiag(
                p.n, p.gamma, p.eta, p.damping, b_sq[k + 1], b_sq[q + 1], b_sq[0], trace_sq
            )
            q_delta[k, q] = q_delta[q, k] = value

    _, q_omega, q_cross = _cluster_covariance(_star_clusters(p), b_sq, inc, p.eta, alpha)
    q_omega[0, 0] = _complete_frequency_diag(
        p.n, p.gamma, p.eta, p.damping, b_sq[0], trace_sq
    )
    for i in range(1, p.n):
        q_omega[i, i] = _star_leaf_frequency_diag(
            p.n, p.gamma, p.eta, p.damping, b_sq[i], b_sq[0], trace_sq
        )
    return make_report(q_delta, q_omega, q_cross, METHOD_CLOSED, {"graph": "star"})


def _require_single_source(p: HomogeneousParams, source: int) -> float:
    nonzero = np.flatnonzero(p.noise_sq)
    if nonzero.size != 1 or nonzero[0] != source - 1:
        raise AssumptionViolatedError(
            f"exactly one disturbance source at node {source} required; "
            f"nonzero noise at nodes {[int(i) + 1 for i in nonzero]}"
        )
    return float(p.noise[source - 1])


def complete_single_source(p: HomogeneousParams, source: int) -> SingleSourceSummary:
    """Scalar variances when a complete graph is disturbed at one node only."""
    b = _require_single_source(p, source)
    return SingleSourceSummary(
        source_frequency_variance=complete_source_frequency(p.n, p.gamma, p.eta, p.damping, b),
        other_frequency_variance=complete_other_frequency(p.n, p.gamma, p.eta, p.damping, b),
        incident_line_variance=b**2 / (2 * p.damping * p.gamma * p.n),
        other_line_variance=0.0,
    )


def star_single_source_root(p: HomogeneousParams) -> SingleSourceSummary:
    """Root-disturbed star graph: identical formulas to the complete graph."""
    b = _require_single_source(p, 1)
    return SingleSourceSummary(
        source_frequency_variance=complete_source_frequency(p.n, p.gamma, p.eta, p.damping, b),
        other_frequency_variance=complete_other_frequency(p.n, p.gamma, p.eta, p.damping, b),
        incident_line_variance=b**2 / (2 * p.damping * p.gamma * p.n),
        other_line_variance=0.0,
    )


def star_single_source_leaf(p: HomogeneousParams) -> StarLeafSummary:
    """Star graph disturbed at leaf node 2 only: the displayed scalar set."""
    b = _require_single_source(p, 2)
    return StarLeafSummary(
        root_frequency_variance=complete_other_frequency(p.n, p.gamma, p.eta, p.damping, b),
        leaf_frequency_variance=star_leaf_frequency(p.n, p.gamma, p.eta, p.damping, b),
        other_frequency_variance=star_other_frequency(p.n, p.gamma, p.eta, p.damping, b),
        source_line_variance=star_source_line(p.n, p.gamma, p.eta, p.damping, b),
        other_line_variance=star_other_line(p.n, p.gamma, p.eta, p.damping, b),
    )


def complete_first_order(p: HomogeneousParams) -> np.ndarray:
    """Zero-inertia angle-difference covariance on the complete graph.

    Identical to the inertial result: (1 / (2 d gamma n)) C^T B^2 C.
    """
    inc = incidence(canonical_complete(p.n, p.gamma))
    return inc.T @ (p.noise_sq[:, None] * inc) / (2 * p.damping * p.gamma * p.n)


def star_first_order(p: HomogeneousParams) -> np.ndarray:
    """Zero-inertia angle-difference covariance on the star graph."""
    d, g, n = p.damping, p.gamma, p.n
    b_sq = p.noise_sq
    trace_sq = p.trace_noise_sq
    m = n - 1
    out = np.empty((m, m))
    for k in range(m):
        out[k, k] = (
            b_sq[0] / (2 * d * g * n)
            + (n**2 - n + 1) * b_sq[k + 1] / (2 * d * g * n * (1 + n))
            + (trace_sq - b_sq[k + 1] - b_sq[0]) / (2 * d * g * n * (1 + n))
        )
        for q in range(k + 1, m):
            value = (
                b_sq[0] / (2 * d * g * n)
                + (1 - n) * (b_sq[k + 1] + b_sq[q + 1]) / (2 * d * g * n * (1 + n))
                + (trace_sq - b_sq[k + 1] - b_sq[q + 1] - b_sq[0]) / (2 * d * g * n * (1 + n))
            )
            out[k, q] = out[q, k] = value
    return out
