"""Finite-sum problem instances with certified constants and known optima.

All individuals are quadratics f(w) = 1/2 w'Aw - b'w + c, which gives exact
gradients, exact smoothness / strong-convexity constants (the extreme
eigenvalues of A), and closed-form optima via a dense linear solve.  Problems
are immutable after construction and safe to share across concurrent runs.

Duplicate individuals are literal copies sharing the same parameter arrays, so
their gradients at any query point are bit-identical -- the property category
discovery relies on.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .categorical import payload_key, weighted_payload_mean

__all__ = [
    "MissingOptimumError",
    "QuadraticIndividual",
    "FiniteSumProblem",
    "quadratic_sum_from_individuals",
    "make_counterexample",
    "make_random_quadratic_sum",
    "add_proximal_term",
    "suboptimality",
    "problem_to_dict",
    "problem_from_dict",
]

_NEGATIVE_SLACK = 1e-12  # numerical slack below which suboptimality clamps to 0


class MissingOptimumError(ValueError):
    """Raised when an operation needs a known optimum the problem lacks."""


def _frozen(a: np.ndarray) -> np.ndarray:
    out = np.array(a, dtype=np.float64)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class QuadraticIndividual:
    """f(w) = 1/2 w'Aw - b'w + c with A symmetric; gradient Aw - b."""

    A: np.ndarray
    b: np.ndarray
    c: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "A", _frozen(self.A))
        object.__setattr__(self, "b", _frozen(self.b))
        object.__setattr__(self, "c", float(self.c))
        if self.A.ndim != 2 or self.A.shape[0] != self.A.shape[1]:
            raise ValueError(f"A must be square, got shape {self.A.shape}")
        if self.b.shape != (self.A.shape[0],):
            raise ValueError(f"b must have shape ({self.A.shape[0]},), got {self.b.shape}")
        if not np.array_equal(self.A, self.A.T):
            raise ValueError("A must be exactly symmetric")

    @property
    def dim(self) -> int:
        return self.A.shape[0]

    def value(self, w: np.ndarray) -> float:
        return self.value_and_gradient(w)[0]

    def gradient(self, w: np.ndarray) -> np.ndarray:
        return self.A @ w - self.b

    def value_and_gradient(self, w: np.ndarray) -> tuple[float, np.ndarray]:
        """Both quantities from one matrix-vector product: with g = Aw - b,
        f(w) = (w'g - b'w)/2 + c.

        The gradient expression matches ``gradient`` exactly, so duplicates
        stay bit-identical whichever entry point evaluated them.
        """
        g = self.A @ w - self.b
        return 0.5 * (float(w @ g) - float(self.b @ w)) + self.c, g

    def params_key(self) -> bytes:
        """Canonical byte record of (A, b, c); category identity under oracles
        that return whole functions."""
        return self.A.tobytes() + self.b.tobytes() + np.float64(self.c).tobytes()

    def shift_proximal(self, beta: float, center: np.ndarray) -> "QuadraticIndividual":
        """The individual plus (beta/2) * ||w - center||^2, again a quadratic."""
        center = np.asarray(center, dtype=np.float64)
        return QuadraticIndividual(
            A=self.A + beta * np.eye(self.dim),
            b=self.b + beta * center,
            c=self.c + 0.5 * beta * float(center @ center),
        )


@dataclass(frozen=True, eq=False)
class FiniteSumProblem:
    """F(w) = (1/n) sum_i f_i(w) with certified constants.

    ``L`` and ``mu`` are uniform per-individual bounds: every f_i is L-smooth
    and mu-strongly convex (mu may be 0, or negative for deliberately nonconvex
    instances used in recovery-only experiments).  ``optimum`` is (w*, F*) when
    known; ``initial_gap`` bounds F(w_0) - F* from above.
    """

    individuals: tuple[QuadraticIndividual, ...]
    L: float
    mu: float
    initial_point: np.ndarray
    optimum: tuple[np.ndarray, float] | None = None
    initial_gap: float | None = None
    family: str = "quadratic_sum"
    seed: int | None = None

    def __post_init__(self) -> None:
        if not self.individuals:
            raise ValueError("a finite sum needs at least one individual")
        if self.mu > self.L:
            raise ValueError(f"mu={self.mu} exceeds L={self.L}")
        object.__setattr__(self, "initial_point", _frozen(np.atleast_1d(self.initial_point)))
        dims = {ind.dim for ind in self.individuals}
        if dims != {self.initial_point.shape[0]}:
            raise ValueError(f"inconsistent dimensions: individuals {dims}, w0 {self.initial_point.shape}")
        # Group literal duplicates once; evaluation and ground-truth category
        # counts both come from this table.
        slots: dict[bytes, int] = {}
        distinct: list[QuadraticIndividual] = []
        counts: list[int] = []
        for ind in self.individuals:
            key = ind.params_key()
            slot = slots.get(key)
            if slot is None:
                slots[key] = len(distinct)
                distinct.append(ind)
                counts.append(1)
            else:
                counts[slot] += 1
        object.__setattr__(self, "_distinct", tuple(distinct))
        object.__setattr__(self, "_counts", tuple(counts))
        if self.optimum is not None:
            w_star, f_star = self.optimum
            object.__setattr__(self, "optimum", (_frozen(np.atleast_1d(w_star)), float(f_star)))
            if self.initial_gap is None:
                object.__setattr__(self, "initial_gap", self.full_value(self.initial_point) - float(f_star))

    @property
    def n(self) -> int:
        return len(self.individuals)

    @property
    def dim(self) -> int:
        return self.individuals[0].dim

    @property
    def num_distinct(self) -> int:
        return len(self._distinct)

    def distinct_individuals(self) -> list[tuple[QuadraticIndividual, int]]:
        """Distinct parameter records with their multiplicities, in construction order."""
        return list(zip(self._distinct, self._counts))

    def full_value(self, w: np.ndarray) -> float:
        return sum(k * ind.value(w) for ind, k in zip(self._distinct, self._counts)) / self.n

    def distinct_gradients(self, w: np.ndarray) -> tuple[list[np.ndarray], list[int]]:
        """Distinct gradient values at w with multiplicities.

        Grouping is by exact gradient bytes at w, so individuals with different
        parameters but coinciding gradients merge into one category, matching
        what a sampling observer can distinguish.
        """
        slots: dict[bytes, int] = {}
        payloads: list[np.ndarray] = []
        weights: list[int] = []
        for ind, k in zip(self._distinct, self._counts):
            g = ind.gradient(w)
            key = payload_key(g)
            slot = slots.get(key)
            if slot is None:
                slots[key] = len(payloads)
                payloads.append(g)
                weights.append(k)
            else:
                weights[slot] += k
        return payloads, weights

    def full_gradient(self, w: np.ndarray) -> np.ndarray:
        """Exact (1/n) sum_i grad f_i(w), summed in canonical byte order.

        Uses the same weighted-mean routine as the quantized estimator, so a
        successful recovery reproduces this vector bit for bit.
        """
        payloads, weights = self.distinct_gradients(w)
        result = weighted_payload_mean(payloads, weights, self.n)
        return np.atleast_1d(result)

    def suboptimality(self, w: np.ndarray) -> float:
        return suboptimality(self, w)


def suboptimality(problem: FiniteSumProblem, w: np.ndarray) -> float:
    """F(w) - F*, clamped at tiny negative slack; needs a known optimum."""
    if problem.optimum is None:
        raise MissingOptimumError(
            "problem has no stored optimum; supply an external reference value"
        )
    gap = problem.full_value(np.atleast_1d(w)) - problem.optimum[1]
    if gap < -_NEGATIVE_SLACK:
        raise ValueError(
            f"suboptimality {gap} below numerical slack: stored optimum is not a minimum"
        )
    return max(gap, 0.0)


def quadratic_sum_from_individuals(
    individuals: Sequence[QuadraticIndividual],
    initial_point: np.ndarray | Sequence[float],
    L: float | None = None,
    mu: float | None = None,
    family: str = "quadratic_sum",
    seed: int | None = None,
) -> FiniteSumProblem:
    """Assemble a problem from explicit quadratics.

    Constants default to the extreme eigenvalues across the A_i.  The optimum
    solves (sum A_i) w = sum b_i; if that system is singular (possible only
    when mu <= 0) the optimum is recorded as absent.
    """
    individuals = tuple(individuals)
    unique = {id(ind): ind for ind in individuals}
    eigs = np.concatenate([np.linalg.eigvalsh(ind.A) for ind in unique.values()])
    L_eff = float(eigs.max()) if L is None else float(L)
    mu_eff = float(eigs.min()) if mu is None else float(mu)
    if eigs.min() < mu_eff - 1e-9 * max(1.0, abs(mu_eff)) or eigs.max() > L_eff * (1 + 1e-9) + 1e-12:
        raise ValueError(
            f"declared constants [mu={mu_eff}, L={L_eff}] do not contain the spectrum "
            f"[{eigs.min()}, {eigs.max()}]"
        )
    n = len(individuals)
    a_sum = sum(ind.A for ind in individuals)
    b_sum = sum(ind.b for ind in individuals)
    optimum = None
    try:
        w_star = np.linalg.solve(a_sum, b_sum)
        if np.all(np.isfinite(w_star)) and np.linalg.norm(a_sum @ w_star - b_sum) <= 1e-8 * (
            1.0 + np.linalg.norm(b_sum)
        ):
            f_star = sum(ind.value(w_star) for ind in individuals) / n
            optimum = (w_star, f_star)
    except np.linalg.LinAlgError:
        optimum = None
    if optimum is None and mu_eff > 0:
        raise ValueError("strongly convex sum produced a singular normal system")
    return FiniteSumProblem(
        individuals=individuals,
        L=L_eff,
        mu=mu_eff,
        initial_point=np.asarray(initial_point, dtype=np.float64),
        optimum=optimum,
        family=family,
        seed=seed,
    )


def make_counterexample(n_even: int, initial_point: float = 1.0) -> FiniteSumProblem:
    """The 1-D sum with F(w) = (w^2 + 1) / 2: half the individuals are
    (w-1)^2 / 2, half are (w+1)^2 / 2, so L = mu = 1, w* = 0, F* = 1/2,
    and the gradients at any w form exactly two categories, w-1 and w+1.

    This is the instance on which plain averaging of sampled gradients
    provably stalls at a noise floor.
    """
    if n_even < 2 or n_even % 2 != 0:
        raise ValueError(f"n_even must be an even integer >= 2, got {n_even}")
    minus = QuadraticIndividual(A=np.ones((1, 1)), b=np.ones(1), c=0.5)    # (w-1)^2 / 2
    plus = QuadraticIndividual(A=np.ones((1, 1)), b=-np.ones(1), c=0.5)    # (w+1)^2 / 2
    half = n_even // 2
    return quadratic_sum_from_individuals(
        individuals=(minus,) * half + (plus,) * half,
        initial_point=np.array([float(initial_point)]),
        L=1.0,
        mu=1.0,
        family="counterexample",
    )


def _balanced_counts(n: int, q: int) -> list[int]:
    base, extra = divmod(n, q)
    return [base + 1 if i < extra else base for i in range(q)]


def _random_spectrum_matrix(rng: np.random.Generator, dim: int, L: float, mu: float) -> np.ndarray:
    if dim == 1:
        return np.array([[L]])
    evals = rng.uniform(mu, L, size=dim)
    evals[0], evals[-1] = mu, L
    g = rng.standard_normal((dim, dim))
    q_mat, r = np.linalg.qr(g)
    q_mat = q_mat * np.sign(np.diag(r))
    a = q_mat @ np.diag(evals) @ q_mat.T
    return (a + a.T) / 2.0


def make_random_quadratic_sum(
    n: int,
    dim: int,
    L: float,
    mu: float,
    q_distinct: int,
    seed: int | np.random.SeedSequence = 0,
    counts: Sequence[int] | None = None,
    shared_curvature: bool = False,
    initial_point: Sequence[float] | np.ndarray | None = None,
) -> FiniteSumProblem:
    """Random sum of n quadratics of which exactly ``q_distinct`` are distinct.

    Each distinct A_i = Q D Q' has eigenvalues drawn uniformly from [mu, L]
    with the first and last pinned to mu and L (dim >= 2), so the declared
    constants are attained, not just bounds.  Duplicates share parameter
    arrays, guaranteeing bit-identical gradients.  ``counts`` optionally fixes
    the multiplicity of each distinct individual (defaults to near-balanced).

    With ``shared_curvature`` every individual uses the same A and only the
    linear terms differ, so the aggregate Hessian keeps the full [mu, L]
    spread; independent rotations average toward much better conditioning.
    """
    if not 0.0 <= mu <= L:
        raise ValueError(f"need 0 <= mu <= L, got mu={mu}, L={L}")
    if not 1 <= q_distinct <= n:
        raise ValueError(f"need 1 <= q_distinct <= n, got q_distinct={q_distinct}, n={n}")
    if counts is None:
        counts = _balanced_counts(n, q_distinct)
    counts = [int(k) for k in counts]
    if len(counts) != q_distinct or any(k < 1 for k in counts) or sum(counts) != n:
        raise ValueError(f"counts must be {q_distinct} positive integers summing to {n}")

    rng = np.random.default_rng(seed)
    shared = _random_spectrum_matrix(rng, dim, L, mu) if shared_curvature else None
    distinct: list[QuadraticIndividual] = []
    for _ in range(q_distinct):
        a = shared if shared is not None else _random_spectrum_matrix(rng, dim, L, mu)
        b = rng.standard_normal(dim)
        c = float(rng.standard_normal())
        distinct.append(QuadraticIndividual(A=a, b=b, c=c))

    individuals: list[QuadraticIndividual] = []
    for ind, k in zip(distinct, counts):
        individuals.extend([ind] * k)
    w0 = rng.standard_normal(dim) if initial_point is None else np.asarray(initial_point, dtype=np.float64)
    seed_repr = seed if isinstance(seed, int) else None
    return quadratic_sum_from_individuals(
        individuals, initial_point=w0, L=L, mu=mu, seed=seed_repr
    )


def add_proximal_term(problem: FiniteSumProblem, beta: float, center: np.ndarray) -> FiniteSumProblem:
    """The sum with every individual shifted by (beta/2) ||w - center||^2.

    The result is (L + beta)-smooth and (mu + beta)-strongly convex, with the
    duplicate structure of the original preserved.
    """
    if beta < 0:
        raise ValueError(f"beta must be nonnegative, got {beta}")
    center = np.asarray(center, dtype=np.float64)
    shifted: dict[int, QuadraticIndividual] = {}
    individuals = []
    for ind in problem.individuals:
        if id(ind) not in shifted:
            shifted[id(ind)] = ind.shift_proximal(beta, center)
        individuals.append(shifted[id(ind)])
    individuals = tuple(individuals)
    return quadratic_sum_from_individuals(
        individuals,
        initial_point=problem.initial_point,
        L=problem.L + beta,
        mu=problem.mu + beta,
        family=problem.family + "+prox",
        seed=problem.seed,
    )


def problem_to_dict(problem: FiniteSumProblem) -> dict:
    """JSON-compatible record (matrices row-major) from which the problem can
    be rebuilt exactly."""
    return {
        "family": problem.family,
        "n": problem.n,
        "dim": problem.dim,
        "L": problem.L,
        "mu": problem.mu,
        "seed": problem.seed,
        "initial_point": problem.initial_point.tolist(),
        "individuals": [
            {
                "A": [float(x) for x in ind.A.ravel(order="C")],
                "b": ind.b.tolist(),
                "c": ind.c,
                "count": count,
            }
            for ind, count in problem.distinct_individuals()
        ],
        "optimum": None
        if problem.optimum is None
        else {"w": problem.optimum[0].tolist(), "value": problem.optimum[1]},
    }


def problem_from_dict(doc: dict) -> FiniteSumProblem:
    dim = int(doc["dim"])
    individuals: list[QuadraticIndividual] = []
    for rec in doc["individuals"]:
        ind = QuadraticIndividual(
            A=np.asarray(rec["A"], dtype=np.float64).reshape(dim, dim),
            b=np.asarray(rec["b"], dtype=np.float64),
            c=float(rec["c"]),
        )
        individuals.extend([ind] * int(rec["count"]))
    if len(individuals) != int(doc["n"]):
        raise ValueError("individual multiplicities do not sum to n")
    optimum = doc.get("optimum")
    return FiniteSumProblem(
        individuals=tuple(individuals),
        L=float(doc["L"]),
        mu=float(doc["mu"]),
        initial_point=np.asarray(doc["initial_point"], dtype=np.float64),
        optimum=None
        if optimum is None
        else (np.asarray(optimum["w"], dtype=np.float64), float(optimum["value"])),
        family=str(doc["family"]),
        seed=doc.get("seed"),
    )
