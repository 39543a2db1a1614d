"""Seeded, call-counted oracle sessions mediating all solver access to a sum.

Four access models: incremental (caller picks the individual) versus
stochastic (a uniformly random individual, index hidden), each in a
first-order flavor (values and gradients at a batch of points, all from the
same individual) and a global flavor (the whole individual function).

Accounting is one unit per query regardless of the batch size B.  Stochastic
responses never expose which individual answered: the response type has no
index field, and the sampled index never leaves the session.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .problems import FiniteSumProblem, QuadraticIndividual

__all__ = ["OracleKind", "OracleUsageError", "FirstOrderResponse", "OracleSession"]


class OracleUsageError(ValueError):
    """A query that violates the session's contract (kind, batch, or index)."""


class OracleKind(enum.Enum):
    INCREMENTAL_FIRST_ORDER = "incremental_first_order"
    INCREMENTAL_GLOBAL = "incremental_global"
    STOCHASTIC_FIRST_ORDER = "stochastic_first_order"
    STOCHASTIC_GLOBAL = "stochastic_global"


@dataclass(frozen=True, eq=False, slots=True)
class FirstOrderResponse:
    """B (value, gradient) pairs, all evaluated on one individual.

    Deliberately carries no index field: stochastic callers must not learn
    which individual was sampled.
    """

    values: tuple[float, ...]
    gradients: tuple[np.ndarray, ...]

    def __len__(self) -> int:
        return len(self.values)


class OracleSession:
    """Single-owner access channel to one problem under one oracle model.

    ``call_count`` increments by exactly 1 per query.  Two sessions built with
    equal seeds answer identical query sequences identically.  A session is
    not safe to share mid-run; concurrent runs should each own one.
    """

    def __init__(
        self,
        problem: FiniteSumProblem,
        kind: OracleKind,
        batch: int = 1,
        seed: int | np.random.SeedSequence = 0,
    ) -> None:
        if batch < 1:
            raise OracleUsageError(f"batch size must be >= 1, got {batch}")
        if kind in (OracleKind.INCREMENTAL_GLOBAL, OracleKind.STOCHASTIC_GLOBAL) and batch != 1:
            raise OracleUsageError("global oracles take no batch parameter; use batch=1")
        self.problem = problem
        self.kind = kind
        self.batch = batch
        self.call_count = 0
        self._rng = np.random.default_rng(seed)
        self._individuals = problem.individuals
        self._n = problem.n

    # -- queries ------------------------------------------------------------

    def query_incremental_first_order(self, points, index: int) -> FirstOrderResponse:
        """Values and gradients of the chosen f_index at ``batch`` points."""
        self._require(OracleKind.INCREMENTAL_FIRST_ORDER)
        if not 0 <= index < self._n:
            raise OracleUsageError(f"index {index} outside [0, {self._n})")
        return self._respond(self._individuals[index], points)

    def query_incremental_global(self, index: int) -> QuadraticIndividual:
        """The chosen individual itself, evaluable and differentiable."""
        self._require(OracleKind.INCREMENTAL_GLOBAL)
        if not 0 <= index < self._n:
            raise OracleUsageError(f"index {index} outside [0, {self._n})")
        self.call_count += 1
        return self._individuals[index]

    def query_stochastic_first_order(self, points) -> FirstOrderResponse:
        """Values and gradients of one uniformly sampled individual at
        ``batch`` points; the index is not revealed."""
        self._require(OracleKind.STOCHASTIC_FIRST_ORDER)
        i = int(self._rng.integers(self._n))
        return self._respond(self._individuals[i], points)

    def query_stochastic_global(self) -> QuadraticIndividual:
        """One uniformly sampled individual, as a whole function."""
        self._require(OracleKind.STOCHASTIC_GLOBAL)
        i = int(self._rng.integers(self._n))
        self.call_count += 1
        return self._individuals[i]

    # -- internals ----------------------------------------------------------

    def _require(self, kind: OracleKind) -> None:
        if self.kind is not kind:
            raise OracleUsageError(f"session of kind {self.kind.value} cannot answer {kind.value} queries")

    def _respond(self, ind: QuadraticIndividual, points) -> FirstOrderResponse:
        if len(points) != self.batch:
            raise OracleUsageError(f"expected {self.batch} query points, got {len(points)}")
        values = []
        gradients = []
        a, b, c = ind.A, ind.b, ind.c
        for p in points:
            g = a @ p - b  # must match QuadraticIndividual.gradient bit for bit
            values.append(0.5 * (p @ g - b @ p) + c)
            gradients.append(g)
        self.call_count += 1
        return FirstOrderResponse(values=tuple(values), gradients=tuple(gradients))
