"""Parameter-trend analysis of the single-source closed forms.

Analytic derivatives and limits of the homogeneous complete/star scalar
variances with respect to the line weight, the network size (treated as a
continuous variable here; reports require integer sizes) and the inertia,
together with sign verdicts.  Every derivative is the exact derivative of
the corresponding scalar in :mod:`gridfluct.closedforms` and is expected
to match a central finite difference to high accuracy.
"""

from __future__ import annotations

from dataclasses import dataclass

from .closedforms import (
    HomogeneousParams,
    _require_single_source,
    complete_source_frequency_floor,
    critical_size,
)
from .errors import AssumptionViolatedError


@dataclass(frozen=True)
class TrendReport:
    """Derivative/limit values of the single-source scalar variances.

    ``sign_verdicts`` records, per named derivative, whether its sign at the
    evaluated parameters matches the expected monotonicity claim.
    """

    graph_kind: str
    source: int
    derivatives: dict[str, float]
    limits: dict[str, float]
    critical_size: int | None
    source_frequency_lower_bound: float | None
    sign_verdicts: dict[str, bool]


# -- complete graph, single source (also star graph disturbed at the root) --


def d_complete_source_frequency_d_weight(n, gamma, eta, damping, noise):
    d, b2 = damping, noise**2
    return 2 * d * (1 - n) * b2 / (n * (2 * d**2 + gamma * eta * n) ** 2)


def d_complete_other_frequency_d_weight(n, gamma, eta, damping, noise):
    d, b2 = damping, noise**2
    return 2 * d * b2 / (n * (2 * d**2 + gamma * eta * n) ** 2)


def d_complete_source_frequency_d_size(n, gamma, eta, damping, noise):
    d, g, e, b2 = damping, gamma, eta, noise**2
    return g * (g * e * n**2 - 2 * g * e * n - 2 * d**2) * b2 / (d * (2 * d**2 * n + g * e * n**2) ** 2)


def d_complete_other_frequency_d_size(n, gamma, eta, damping, noise):
    d, g, e, b2 = damping, gamma, eta, noise**2
    return -g * (2 * d**2 + 2 * g * e * n) * b2 / (d * (2 * d**2 * n + g * e * n**2) ** 2)


# -- star graph, single source at leaf node 2 --


def d_star_leaf_frequency_d_weight(n, gamma, eta, damping, noise):
    d, g, e, b2 = damping, gamma, eta, noise**2
    w_top = 2 * d**2 + g * e * n
    w_star = 2 * d**2 * (n + 1) + e * g * (n - 1) ** 2
    w_mid = 2 * d**2 + g * e
    return (
        -2 * d * b2 / (n * w_top**2)
        - 2 * d * (n + 1) * (n - 2) * b2 / (n * w_star**2)
        - 2 * d * g * e * (4 * d**2 + g * e * (n + 1)) * (n - 2) * b2 / (n * w_mid**2 * w_top**2)
    )


def d_star_leaf_frequency_d_size(n, gamma, eta, damping, noise):
    d, g, e, b2 = damping, gamma, eta, noise**2
    w_top = 2 * d**2 + g * e * n
    w_star = 2 * d**2 * (n + 1) + g * e * (n - 1) ** 2
    w_mid = 2 * d**2 + g * e
    return (
        2 * g * b2 * (d**2 + g * e * n) / (d * n**2 * w_top**2)
        - g**2 * e * b2 * (4 * d**2 + g * e * n * (4 - n)) / (d * n**2 * w_mid * w_top**2)
        + 2 * g * b2 * (d**2 * (n**2 - 4 * n - 2) + g * e * (n - 1) * (n**2 - 3 * n + 1)) / (d * n**2 * w_star**2)
    )


def d_star_source_line_d_inertia(n, gamma, eta, damping, noise):
    d, b2 = damping, noise**2
    w_star = 2 * d**2 * (n + 1) + gamma * eta * (n - 1) ** 2
    return -4 * (n - 2) * d * b2 / w_star**2


def d_star_other_line_d_inertia(n, gamma, eta, damping, noise):
    d, b2 = damping, noise**2
    w_star = 2 * d**2 * (n + 1) + gamma * eta * (n - 1) ** 2
    return 4 * d * b2 / w_star**2


def d_star_source_line_d_size(n, gamma, eta, damping, noise):
    d, g, e, b2 = damping, gamma, eta, noise**2
    w_star = 2 * d**2 * (1 + n) + g * e * (n - 1) ** 2
    numer = (
        4 * d**4 * (2 * n**2 - 2 * n - 1)
        + 4 * d**2 * g * e * (2 * n**3 - 6 * n**2 + n - 1)
        + g**2 * e**2 * (n - 1) * (2 * n**3 - 4 * n**2 - 3 * n + 1)
    )
    return numer * b2 / (2 * d * g * n**2 * w_star**2)


def d_star_other_line_d_size(n, gamma, eta, damping, noise):
    d, g, e, b2 = damping, gamma, eta, noise**2
    w_star = 2 * d**2 * (1 + n) + g * e * (n - 1) ** 2
    numer = (
        4 * d**4 * (1 + 2 * n)
        + 4 * d**2 * g * e * (2 * n**2 - n + 1)
        + g**2 * e**2 * (n - 1) * (2 * n**2 + 3 * n - 1)
    )
    return -numer * b2 / (2 * d * g * n**2 * w_star**2)


def _complete_trend(p: HomogeneousParams, source: int, graph_kind: str) -> TrendReport:
    b = _require_single_source(p, source)
    n, g, e, d = p.n, p.gamma, p.eta, p.damping
    b2 = b**2

    derivatives = {
        "source_frequency_wrt_weight": d_complete_source_frequency_d_weight(n, g, e, d, b),
        "other_frequency_wrt_weight": d_complete_other_frequency_d_weight(n, g, e, d, b),
        "source_frequency_wrt_size": d_complete_source_frequency_d_size(n, g, e, d, b),
        "other_frequency_wrt_size": d_complete_other_frequency_d_size(n, g, e, d, b),
    }
    limits = {
        "source_frequency_weight_to_inf": b2 / (2 * d * e) - (n - 1) * b2 / (d * e * n**2),
        "other_frequency_weight_to_inf": b2 / (d * e * n**2),
        "source_frequency_size_to_inf": b2 / (2 * d * e),
    }
    n_c = critical_size(d, g, e)
    sign_verdicts = {
        "source_frequency_decreases_in_weight": derivatives["source_frequency_wrt_weight"] < 0,
        "other_frequency_increases_in_weight": derivatives["other_frequency_wrt_weight"] > 0,
        "other_frequency_decreases_in_size": derivatives["other_frequency_wrt_size"] < 0,
        "source_frequency_grows_beyond_critical_size": (
            n <= n_c or derivatives["source_frequency_wrt_size"] > 0
        ),
    }
    return TrendReport(
        graph_kind=graph_kind,
        source=source,
        derivatives=derivatives,
        limits=limits,
        critical_size=n_c,
        source_frequency_lower_bound=complete_source_frequency_floor(g, e, d, b),
        sign_verdicts=sign_verdicts,
    )


def _star_leaf_trend(p: HomogeneousParams) -> TrendReport:
    b = _require_single_source(p, 2)
    n, g, e, d = p.n, p.gamma, p.eta, p.damping
    b2 = b**2

    derivatives = {
        "leaf_frequency_wrt_weight": d_star_leaf_frequency_d_weight(n, g, e, d, b),
        "leaf_frequency_wrt_size": d_star_leaf_frequency_d_size(n, g, e, d, b),
        "source_line_wrt_inertia": d_star_source_line_d_inertia(n, g, e, d, b),
        "other_line_wrt_inertia": d_star_other_line_d_inertia(n, g, e, d, b),
        "source_line_wrt_size": d_star_source_line_d_size(n, g, e, d, b),
        "other_line_wrt_size": d_star_other_line_d_size(n, g, e, d, b),
    }
    limits = {
        "leaf_frequency_weight_to_inf": b2 / (2 * d * e)
        - (b2 / (d * e)) * (1.0 / n - 1.0 / (n**2 * (n - 1.0) ** 2)),
        "leaf_frequency_size_to_inf": b2 / (2 * d * e),
        "source_line_inertia_to_zero": ((n - 1) / (2 * d * g * n) - (n - 2) / (2 * d * g * n * (n + 1))) * b2,
        "other_line_inertia_to_zero": b2 / (2 * d * g * n * (n + 1)),
    }
    sign_verdicts = {
        "leaf_frequency_decreases_in_weight": derivatives["leaf_frequency_wrt_weight"] < 0,
        "leaf_frequency_increases_in_size": derivatives["leaf_frequency_wrt_size"] > 0,
        "source_line_nonincreasing_in_inertia": derivatives["source_line_wrt_inertia"] <= 0,
        "other_line_increases_in_inertia": derivatives["other_line_wrt_inertia"] > 0,
        "source_line_increases_in_size": derivatives["source_line_wrt_size"] > 0,
        "other_line_decreases_in_size": derivatives["other_line_wrt_size"] < 0,
    }
    return TrendReport(
        graph_kind="star",
        source=2,
        derivatives=derivatives,
        limits=limits,
        critical_size=None,
        source_frequency_lower_bound=None,
        sign_verdicts=sign_verdicts,
    )


def trend_report(graph_kind: str, p: HomogeneousParams, source: int) -> TrendReport:
    """Evaluate the single-source derivative/limit displays with sign verdicts.

    ``graph_kind`` is ``"complete"`` (any source node) or ``"star"``.  A
    star disturbed at its root behaves exactly like the complete graph and
    returns the same quantities; ``source == 2`` selects the leaf-source
    star analysis.  Other star sources have no displayed scalar set.
    """
    if graph_kind == "complete":
        return _complete_trend(p, source, "complete")
    if graph_kind == "star":
        if source == 1:
            return _complete_trend(p, 1, "star")
        if source == 2:
            return _star_leaf_trend(p)
        raise AssumptionViolatedError(
            "star trend analysis covers a root source (node 1) or leaf source (node 2)"
        )
    raise AssumptionViolatedError(f"unknown graph kind {graph_kind!r}; use 'complete' or 'star'")
