"""Quantized estimation of categorical distributions with integer-rounded counters.

A discrete random variable taking q distinct payload values with probabilities
n_i / n (integer n_i summing to n) can be recovered *exactly* from samples: round
the scaled empirical counters n * Z_i / m to the nearest integer.  Once every
counter is within 1/(2n) of its true frequency, rounding snaps to the true n_i,
which happens with probability at least 1 - delta after
m >= 2 n^2 ln(2n / delta) samples (Hoeffding + union bound).

Categories are discovered on the fly; equality of payloads is exact byte
equality of their canonical encoding (for float vectors, the IEEE-754 bit
pattern of each coordinate in order).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "rnd",
    "required_samples",
    "payload_key",
    "weighted_payload_mean",
    "CategoryTable",
    "BiasEnumeration",
    "bias_demo",
    "simulate_recovery",
]


def rnd(a: float) -> int:
    """Round to the nearest integer, with exact half-integers rounding down.

    rnd(1.5) == 1, rnd(1.8) == 2.  Only nonnegative finite inputs are in the
    domain (all uses are scaled counters n*Z/m >= 0); everything else raises.
    """
    if not math.isfinite(a):
        raise ValueError(f"rnd requires a finite input, got {a!r}")
    if a < 0:
        raise ValueError(f"rnd is defined for nonnegative inputs only, got {a!r}")
    return math.ceil(a - 0.5)


def _rnd_ratio(num: int, den: int) -> int:
    # Exact integer form of rnd(num/den): ceil(num/den - 1/2) without float error.
    return -((den - 2 * num) // (2 * den))


def required_samples(n: int, delta: float) -> int:
    """Samples sufficient to recover all counters of an n-denominator categorical
    variable with failure probability at most ``delta``: ceil(2 n^2 ln(2n/delta))."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return math.ceil(2.0 * n * n * math.log(2.0 * n / delta))


def payload_key(payload) -> bytes:
    """Canonical byte encoding used for exact category equality."""
    if isinstance(payload, bytes):
        return payload
    if isinstance(payload, np.ndarray):
        return payload.tobytes()
    if isinstance(payload, float):
        return np.float64(payload).tobytes()
    if isinstance(payload, int):
        return int(payload).to_bytes(16, "little", signed=True)
    raise TypeError(f"no canonical byte encoding for payload of type {type(payload)!r}")


def weighted_payload_mean(payloads: Sequence, weights: Sequence[int], n: int):
    """Return (1/n) * sum_i weights[i] * payloads[i] in a canonical order.

    Terms are summed in byte-lexicographic order of the payload keys, so two
    computations over the same weighted multiset produce bitwise-identical
    floats regardless of discovery order.
    """
    order = sorted(range(len(payloads)), key=lambda i: payload_key(payloads[i]))
    total = None
    for i in order:
        term = float(weights[i]) * payloads[i]
        total = term if total is None else total + term
    if total is None:
        raise ValueError("cannot average an empty payload collection")
    return total / float(n)


@dataclass
class CategoryTable:
    """On-the-fly category counters for samples of an n-denominator categorical
    variable.

    Payloads are kept as first seen; ``counts[i]`` is the number of ingested
    samples whose canonical bytes equal those of ``payloads[i]``.  The table is
    single-writer: concurrent trials should each own one.
    """

    n: int
    payloads: list = field(default_factory=list)
    counts: list[int] = field(default_factory=list)
    m: int = 0
    _slots: dict[bytes, int] = field(default_factory=dict, repr=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"declared denominator n must be >= 1, got {self.n}")

    @property
    def num_categories(self) -> int:
        return len(self.payloads)

    def ingest(self, payload, key: bytes | None = None) -> None:
        """Record one sample; new payloads open a new category with count 1."""
        if key is None:
            key = payload_key(payload)
        slot = self._slots.get(key)
        if slot is None:
            self._slots[key] = len(self.payloads)
            self.payloads.append(payload)
            self.counts.append(1)
        else:
            self.counts[slot] += 1
        self.m += 1

    def quantized_counts(self) -> list[int]:
        """Per discovered category, rnd(n * Z_i / m), in discovery order."""
        if self.m < 1:
            raise ValueError("quantized_counts requires at least one ingested sample")
        return [_rnd_ratio(self.n * z, self.m) for z in self.counts]

    def quantized_mean(self, combine: Callable | None = None):
        """The quantized estimate (1/n) * sum_i rnd(n Z_i / m) * payload_i.

        With all quantized counts equal to the true n_i this is exactly the
        mean of the sampled variable.  ``combine(payloads, weights, n)`` may be
        supplied for payload types without arithmetic; the default handles
        floats and numpy arrays and sums in canonical byte order.
        """
        weights = self.quantized_counts()
        if combine is None:
            combine = weighted_payload_mean
        return combine(self.payloads, weights, self.n)

    def as_multiset(self) -> dict[bytes, int]:
        """Canonical view {payload bytes -> raw count}, for order-free comparison."""
        return {payload_key(p): z for p, z in zip(self.payloads, self.counts)}


@dataclass(frozen=True)
class BiasEnumeration:
    """Exhaustive enumeration of all q^m equiprobable sample sequences."""

    n: int
    q: int
    m: int
    expected_count_sum: Fraction
    # sorted raw-count multiset -> sorted quantized-count multiset
    outcome_table: dict[tuple[int, ...], tuple[int, ...]]


def bias_demo(n: int = 3, q: int = 3, m: int = 5) -> BiasEnumeration:
    """Show that count quantization is biased by brute force.

    Enumerates every sample sequence of length m over q equiprobable categories
    (probabilities 1/q each with n == q), quantizes the counters of each
    outcome, and returns the exact expected value of the quantized-count sum.
    For n=q=3, m=5 the expectation exceeds 3, so the estimator cannot be
    unbiased.
    """
    if n != q:
        raise ValueError("bias_demo assumes uniform categories, i.e. n == q")
    outcome_table: dict[tuple[int, ...], tuple[int, ...]] = {}
    total = Fraction(0)
    for seq in itertools.product(range(q), repeat=m):
        raw = [0] * q
        for s in seq:
            raw[s] += 1
        quantized = [_rnd_ratio(n * z, m) for z in raw]
        total += sum(quantized)
        key = tuple(sorted(raw, reverse=True))
        val = tuple(sorted(quantized, reverse=True))
        previous = outcome_table.setdefault(key, val)
        assert previous == val  # quantization depends on counts only
    return BiasEnumeration(
        n=n, q=q, m=m,
        expected_count_sum=total / q**m,
        outcome_table=outcome_table,
    )


def simulate_recovery(
    true_counts: Sequence[int],
    trials: int,
    delta: float | None = None,
    m: int | None = None,
    seed: int | np.random.SeedSequence = 0,
) -> np.ndarray:
    """Vectorized Monte Carlo of counter recovery; returns per-trial success.

    Draws multinomial counters (distributionally identical to per-sample
    ingestion) and checks that every quantized counter equals its true value.
    Exactly one of ``delta`` (then m = required_samples) or ``m`` must be given.
    """
    counts = np.asarray(true_counts, dtype=np.int64)
    if counts.ndim != 1 or np.any(counts <= 0):
        raise ValueError("true_counts must be a 1-D sequence of positive integers")
    n = int(counts.sum())
    if (delta is None) == (m is None):
        raise ValueError("pass exactly one of delta or m")
    if m is None:
        m = required_samples(n, delta)
    if m < 1:
        raise ValueError(f"sample size m must be >= 1, got {m}")
    rng = np.random.default_rng(seed)
    z = rng.multinomial(m, counts / n, size=int(trials))
    # rnd with half-down ties: ceil(nZ/m - 1/2); products stay below 2**53 so
    # the float division is exact at every representable tie.
    quantized = np.ceil(n * z / m - 0.5).astype(np.int64)
    return np.all(quantized == counts, axis=1)
