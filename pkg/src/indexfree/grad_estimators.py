"""Full-gradient estimators over the stochastic first-order oracle.

The quantized estimator samples gradients at one point, counts the distinct
gradient values seen (exact byte equality), rounds the scaled counters, and
averages.  After required_samples(n, delta) queries it returns the exact full
gradient with probability at least 1 - delta -- bit for bit, since both sides
sum in canonical byte order.

The naive estimator is the plain empirical average: unbiased, but its variance
decays only like 1/m, which is what dooms plain SGD/SVRG built on it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .categorical import CategoryTable, required_samples

__all__ = [
    "GradientEstimate",
    "quantized_full_gradient",
    "quantized_full_gradients_batch",
    "naive_full_gradient",
]


@dataclass(frozen=True, eq=False)
class GradientEstimate:
    """An estimated full gradient plus the oracle budget it consumed.

    ``exactness_probe`` compares against the problem's true gradient and exists
    for measurement only; no algorithmic path reads it.
    """

    gradient: np.ndarray
    oracle_calls_spent: int
    method: str
    exactness_probe: bool | None = None


def _probe(session, w: np.ndarray, estimate: np.ndarray) -> bool:
    truth = session.problem.full_gradient(w)
    return estimate.tobytes() == truth.tobytes()


def quantized_full_gradient(session, w: np.ndarray, delta: float, probe: bool = True) -> GradientEstimate:
    """Estimate the full gradient at ``w`` from required_samples(n, delta)
    stochastic first-order calls.

    Every call queries ``w`` in all batch slots and contributes its first
    gradient to the category table.  On successful counter recovery (prob.
    >= 1 - delta) the result equals the true full gradient exactly.
    """
    n = session.problem.n
    m = required_samples(n, delta)
    table = CategoryTable(n=n)
    points = [w] * session.batch
    before = session.call_count
    for _ in range(m):
        response = session.query_stochastic_first_order(points)
        table.ingest(response.gradients[0])
    spent = session.call_count - before
    estimate = np.atleast_1d(table.quantized_mean())
    return GradientEstimate(
        gradient=estimate,
        oracle_calls_spent=spent,
        method="quantized",
        exactness_probe=_probe(session, w, estimate) if probe else None,
    )


def quantized_full_gradients_batch(
    session, points: Sequence[np.ndarray], delta: float, probe: bool = True
) -> list[GradientEstimate]:
    """Estimate full gradients at k points, all exact simultaneously with
    probability >= 1 - delta.

    Splits the failure budget evenly (delta / k per point), so the total cost
    is k * ceil(2 n^2 ln(2 n k / delta)) calls.
    """
    points = list(points)
    if not points:
        raise ValueError("need at least one query point")
    per_point = delta / len(points)
    return [quantized_full_gradient(session, w, per_point, probe=probe) for w in points]


def naive_full_gradient(session, w: np.ndarray, m_samples: int, probe: bool = True) -> GradientEstimate:
    """Plain empirical average of ``m_samples`` sampled gradients at ``w``.

    Unbiased; per-coordinate variance scales as 1/m_samples.
    """
    if m_samples < 1:
        raise ValueError(f"m_samples must be >= 1, got {m_samples}")
    points = [w] * session.batch
    before = session.call_count
    total = None
    for _ in range(m_samples):
        g = session.query_stochastic_first_order(points).gradients[0]
        total = g.copy() if total is None else total + g
    spent = session.call_count - before
    estimate = np.atleast_1d(total / m_samples)
    return GradientEstimate(
        gradient=estimate,
        oracle_calls_spent=spent,
        method="naive",
        exactness_probe=_probe(session, w, estimate) if probe else None,
    )
