"""Minimization through the stochastic global oracle.

Under a global oracle each query returns a whole individual function, so the
only difficulty is statistical: recover the multiset {f_1, ..., f_n} from
uniform samples.  The quantized counter estimator does exactly that with
required_samples(n, delta) queries, after which the reconstructed sum can be
minimized exactly (local computation is free in this oracle model).  Recovery
works for arbitrary individuals -- it never inspects convexity or smoothness;
exact minimization is implemented for quadratic sums.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .categorical import CategoryTable, required_samples
from .oracles import OracleKind, OracleSession, OracleUsageError
from .problems import FiniteSumProblem, QuadraticIndividual

__all__ = ["SingularReconstructionError", "Reconstruction", "recover_finite_sum", "minimize_reconstructed"]


class SingularReconstructionError(ValueError):
    """The reconstructed sum has no unique minimizer."""


@dataclass(frozen=True, eq=False)
class Reconstruction:
    """A recovered weighted sum (1/n) sum_i counts[i] * individuals[i].

    ``counts`` are the quantized counters; on successful recovery they equal
    the true multiplicities and the reconstruction equals F as a function.  On
    failure they may not even sum to n, which is why this is kept as an
    explicit weighted form rather than a materialized n-term sum.
    """

    individuals: tuple[QuadraticIndividual, ...]
    counts: tuple[int, ...]
    n: int
    oracle_calls_spent: int

    def value(self, w: np.ndarray) -> float:
        return sum(k * ind.value(w) for ind, k in zip(self.individuals, self.counts)) / self.n

    def gradient(self, w: np.ndarray) -> np.ndarray:
        total = sum(k * ind.gradient(w) for ind, k in zip(self.individuals, self.counts))
        return np.atleast_1d(total / self.n)

    def matches_problem(self, problem: FiniteSumProblem) -> bool:
        """True when the recovered (parameters, multiplicity) multiset equals
        the problem's, byte for byte."""
        recovered = {
            ind.params_key(): k for ind, k in zip(self.individuals, self.counts) if k != 0
        }
        truth = {ind.params_key(): k for ind, k in problem.distinct_individuals()}
        return recovered == truth

    def as_problem(self, initial_point: np.ndarray) -> FiniteSumProblem:
        """Materialize an n-term finite sum; only possible when counts sum to n."""
        if sum(self.counts) != self.n:
            raise SingularReconstructionError(
                f"quantized counts sum to {sum(self.counts)} != n = {self.n}; "
                "reconstruction is not a valid n-term sum"
            )
        individuals: list[QuadraticIndividual] = []
        for ind, k in zip(self.individuals, self.counts):
            individuals.extend([ind] * k)
        return FiniteSumProblem(
            individuals=tuple(individuals),
            L=max(float(np.linalg.eigvalsh(ind.A).max()) for ind in self.individuals),
            mu=min(float(np.linalg.eigvalsh(ind.A).min()) for ind in self.individuals),
            initial_point=initial_point,
            family="reconstructed",
        )


def recover_finite_sum(session: OracleSession, delta: float) -> Reconstruction:
    """Recover the sum's individuals and multiplicities from
    required_samples(n, delta) stochastic global queries.

    Sampled functions are categorized by exact byte equality of their
    parameter records; with probability >= 1 - delta the quantized counters
    equal the true multiplicities and the reconstruction equals F exactly.
    """
    if session.kind is not OracleKind.STOCHASTIC_GLOBAL:
        raise OracleUsageError(f"need a stochastic global session, got {session.kind.value}")
    n = session.problem.n
    m = required_samples(n, delta)
    table = CategoryTable(n=n)
    before = session.call_count
    for _ in range(m):
        handle = session.query_stochastic_global()
        table.ingest(handle, key=handle.params_key())
    return Reconstruction(
        individuals=tuple(table.payloads),
        counts=tuple(table.quantized_counts()),
        n=n,
        oracle_calls_spent=session.call_count - before,
    )


def minimize_reconstructed(reconstruction: Reconstruction) -> tuple[np.ndarray, float]:
    """Exact minimizer of the reconstructed quadratic sum via a dense solve.

    Returns (w*, reconstructed value at w*).  Raises if the weighted Hessian
    sum is singular (no unique minimizer to report).
    """
    a_hat = sum(k * ind.A for ind, k in zip(reconstruction.individuals, reconstruction.counts))
    b_hat = sum(k * ind.b for ind, k in zip(reconstruction.individuals, reconstruction.counts))
    a_hat = np.atleast_2d(a_hat)
    b_hat = np.atleast_1d(b_hat)
    try:
        w_star = np.linalg.solve(a_hat, b_hat)
    except np.linalg.LinAlgError as err:
        raise SingularReconstructionError("reconstructed normal system is singular") from err
    if not np.all(np.isfinite(w_star)) or np.linalg.norm(a_hat @ w_star - b_hat) > 1e-8 * (
        1.0 + np.linalg.norm(b_hat)
    ):
        raise SingularReconstructionError("reconstructed normal system is numerically singular")
    return w_star, reconstruction.value(w_star)
