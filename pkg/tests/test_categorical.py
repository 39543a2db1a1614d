"""Counter quantization: rounding convention, sample sizes, bias, recovery."""

import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from indexfree.categorical import (
    CategoryTable,
    bias_demo,
    payload_key,
    required_samples,
    rnd,
    simulate_recovery,
    weighted_payload_mean,
)


class TestRnd:
    @pytest.mark.parametrize(
        "value, expected",
        [
            (1.5, 1),       # exact half rounds down
            (1.8, 2),
            (9 / 5, 2),     # the scaled counters of the bias example
            (3 / 5, 1),
            (0.0, 0),
            (2.5, 2),
            (0.49999, 0),
        ],
    )
    def test_values(self, value, expected):
        assert rnd(value) == expected

    @pytest.mark.parametrize("bad", [float("nan"), float("inf"), -0.25, -3.0])
    def test_rejects_outside_domain(self, bad):
        with pytest.raises(ValueError):
            rnd(bad)

    @given(st.integers(min_value=0, max_value=10**9))
    def test_half_integers_round_down(self, k):
        assert rnd(k + 0.5) == k

    @given(st.floats(min_value=0.0, max_value=1e12, allow_nan=False))
    def test_within_half_of_input(self, a):
        assert abs(rnd(a) - a) <= 0.5


class TestRequiredSamples:
    def test_frozen_values(self):
        # ceil(2 * 100 * ln(400)) and ceil(2 * ln 4), evaluated independently
        # at high precision.
        assert required_samples(10, 0.05) == 1199
        assert required_samples(1, 0.5) == 3

    def test_monotone_in_delta(self):
        assert required_samples(10, 0.01) > required_samples(10, 0.05)

    @given(st.integers(min_value=1, max_value=200), st.floats(min_value=1e-6, max_value=0.999))
    def test_matches_formula(self, n, delta):
        assert required_samples(n, delta) == math.ceil(2 * n * n * math.log(2 * n / delta))

    @pytest.mark.parametrize("delta", [0.0, 1.0, -0.1, 2.0])
    def test_rejects_bad_delta(self, delta):
        with pytest.raises(ValueError):
            required_samples(5, delta)


class TestIngest:
    def test_first_payload_opens_category(self):
        table = CategoryTable(n=3)
        table.ingest(b"p")
        assert table.counts == [1] and table.m == 1

    def test_repeat_increments(self):
        table = CategoryTable(n=3)
        table.ingest(b"p")
        table.ingest(b"p")
        assert table.counts == [2] and table.num_categories == 1

    def test_distinct_payloads_split(self):
        table = CategoryTable(n=3)
        table.ingest(b"p")
        table.ingest(b"q")
        assert table.num_categories == 2

    def test_array_payloads_compared_by_bits(self):
        table = CategoryTable(n=2)
        g = np.array([0.1, 0.2])
        table.ingest(g)
        table.ingest(g.copy())                    # equal bits, same category
        table.ingest(np.array([0.1, np.nextafter(0.2, 1)]))  # one ulp off
        assert table.counts == [2, 1]

    @given(st.lists(st.integers(min_value=0, max_value=5), min_size=1, max_size=60))
    def test_counts_always_sum_to_m(self, draws):
        table = CategoryTable(n=6)
        for d in draws:
            table.ingest(d.to_bytes(1, "little"))
        assert sum(table.counts) == table.m == len(draws)

    @given(st.lists(st.integers(min_value=0, max_value=4), min_size=1, max_size=40), st.randoms())
    def test_order_independent_up_to_permutation(self, draws, pyrandom):
        table_a = CategoryTable(n=5)
        for d in draws:
            table_a.ingest(d.to_bytes(1, "little"))
        shuffled = list(draws)
        pyrandom.shuffle(shuffled)
        table_b = CategoryTable(n=5)
        for d in shuffled:
            table_b.ingest(d.to_bytes(1, "little"))
        assert table_a.as_multiset() == table_b.as_multiset()


class TestQuantizedCounts:
    def test_bias_example_counters(self):
        table = CategoryTable(n=3)
        for payload, reps in ((b"a", 3), (b"b", 1), (b"c", 1)):
            for _ in range(reps):
                table.ingest(payload)
        assert table.quantized_counts() == [2, 1, 1]  # sums to 4, not 3

    def test_uniform_exact(self):
        table = CategoryTable(n=3)
        for payload in (b"a", b"b", b"c"):
            table.ingest(payload)
        assert table.quantized_counts() == [1, 1, 1]

    def test_empty_table_rejected(self):
        with pytest.raises(ValueError):
            CategoryTable(n=3).quantized_counts()

    @given(
        st.lists(st.integers(min_value=1, max_value=8), min_size=1, max_size=6),
        st.integers(min_value=1, max_value=60),
    )
    def test_exact_recovery_inside_half_gap(self, true_counts, oversample):
        """If every counter is within 1/(2n) of its frequency, quantization
        returns the true counts exactly (no randomness involved)."""
        n = sum(true_counts)
        m = n * oversample
        table = CategoryTable(n=n)
        for i, k in enumerate(true_counts):
            for _ in range(k * oversample):
                table.ingest(i.to_bytes(2, "little"))
        for z, k in zip(table.counts, true_counts):
            assume(abs(z / m - k / n) < 1 / (2 * n))  # exact multiples: always true
        assert table.quantized_counts() == true_counts

    @given(st.lists(st.integers(min_value=0, max_value=500), min_size=1, max_size=8).filter(sum))
    def test_matches_scalar_rnd(self, counters):
        n = 7
        table = CategoryTable(n=n)
        for i, z in enumerate(counters):
            for _ in range(z):
                table.ingest(i.to_bytes(2, "little"))
        m = sum(counters)
        expected = [rnd(n * z / m) for z in counters if z]
        assert table.quantized_counts() == expected


class TestQuantizedMean:
    def test_single_category_returns_payload(self):
        table = CategoryTable(n=4)
        for _ in range(9):
            table.ingest(np.array([2.0, -1.0]))
        np.testing.assert_array_equal(table.quantized_mean(), np.array([2.0, -1.0]))

    def test_bias_example_scalar_payloads(self):
        table = CategoryTable(n=3)
        for payload, reps in ((1.0, 3), (10.0, 1), (100.0, 1)):
            for _ in range(reps):
                table.ingest(payload)
        # quantized counts (2, 1, 1) -> (2*1 + 1*10 + 1*100) / 3
        assert table.quantized_mean() == pytest.approx(112 / 3, rel=1e-15)

    def test_exact_counts_give_exact_mean(self):
        payloads = [np.array([1.0, 0.0]), np.array([0.0, 1.0]), np.array([-1.0, 2.0])]
        counts = [2, 3, 1]
        n = sum(counts)
        table = CategoryTable(n=n)
        for p, k in zip(payloads, counts):
            for _ in range(k * 5):  # frequencies exactly n_i / n
                table.ingest(p)
        expected = weighted_payload_mean(payloads, counts, n)
        np.testing.assert_array_equal(table.quantized_mean(), expected)

    def test_canonical_order_is_discovery_independent(self):
        a, b = np.array([3.0, 1.0]), np.array([-2.0, 5.0])
        t1, t2 = CategoryTable(n=2), CategoryTable(n=2)
        for x in (a, b):
            t1.ingest(x)
        for x in (b, a):
            t2.ingest(x)
        assert t1.quantized_mean().tobytes() == t2.quantized_mean().tobytes()


def _enumerate_bias_by_count_vectors(n=3, q=3, m=5) -> Fraction:
    """Independent oracle: enumerate multinomial count vectors with their
    coefficients instead of raw sequences."""
    total = Fraction(0)
    for counts in itertools.product(range(m + 1), repeat=q):
        if sum(counts) != m:
            continue
        coeff = math.factorial(m)
        for z in counts:
            coeff //= math.factorial(z)
        quantized_sum = sum(math.ceil(Fraction(n * z, m) - Fraction(1, 2)) for z in counts)
        total += Fraction(coeff * quantized_sum, q**m)
    return total


class TestBiasDemo:
    def test_outcome_table(self):
        demo = bias_demo()
        assert demo.outcome_table == {
            (5, 0, 0): (3, 0, 0),
            (4, 1, 0): (2, 1, 0),
            (3, 2, 0): (2, 1, 0),
            (3, 1, 1): (2, 1, 1),
            (2, 2, 1): (1, 1, 1),
        }

    def test_expected_sum_exceeds_n(self):
        demo = bias_demo()
        oracle = _enumerate_bias_by_count_vectors()
        assert demo.expected_count_sum == oracle
        assert demo.expected_count_sum > 3
        assert demo.expected_count_sum == Fraction(263, 81)

    def test_requires_uniform_setup(self):
        with pytest.raises(ValueError):
            bias_demo(n=4, q=3)


class TestSimulateRecovery:
    def test_skewed_counts_recovery_rate(self):
        # true counts (3, 1) over n=4 at the certified sample size
        success = simulate_recovery([3, 1], trials=10_000, delta=0.1, seed=42)
        assert success.mean() >= 0.9

    def test_calibration_failure_rate_below_delta(self):
        success = simulate_recovery([2, 2, 1, 1], trials=5_000, delta=0.2, seed=7)
        assert 1.0 - success.mean() <= 0.2

    def test_tiny_m_fails_often(self):
        success = simulate_recovery([5, 3, 2], trials=2_000, m=4, seed=3)
        assert success.mean() < 0.5

    def test_validates_arguments(self):
        with pytest.raises(ValueError):
            simulate_recovery([2, 1], trials=10)  # neither delta nor m
        with pytest.raises(ValueError):
            simulate_recovery([2, 1], trials=10, delta=0.1, m=50)  # both
        with pytest.raises(ValueError):
            simulate_recovery([0, 1], trials=10, m=5)

    @given(st.lists(st.integers(min_value=1, max_value=6), min_size=1, max_size=5),
           st.integers(min_value=1, max_value=200))
    @settings(max_examples=40)
    def test_agrees_with_streaming_table(self, counts, m):
        """The vectorized success check equals the ingest-path check for the
        same drawn counters."""
        n = sum(counts)
        rng = np.random.default_rng(1234)
        z = rng.multinomial(m, np.array(counts) / n)
        table = CategoryTable(n=n)
        for i, zi in enumerate(z):
            for _ in range(zi):
                table.ingest(i.to_bytes(2, "little"))
        if table.m == 0:
            return
        streaming = {i.to_bytes(2, "little"): c
                     for i, c in zip([i for i, zi in enumerate(z) if zi], table.quantized_counts())}
        streaming_ok = streaming == {
            i.to_bytes(2, "little"): k for i, k in enumerate(counts)
        }
        vector_ok = bool(np.all(np.ceil(n * z / m - 0.5).astype(int) == np.array(counts)))
        assert streaming_ok == vector_ok


class TestPayloadKey:
    def test_supported_types(self):
        assert payload_key(b"xy") == b"xy"
        assert payload_key(np.array([1.0])) == np.array([1.0]).tobytes()
        assert payload_key(1.0) == np.float64(1.0).tobytes()
        assert payload_key(7) == (7).to_bytes(16, "little", signed=True)

    def test_unsupported_type(self):
        with pytest.raises(TypeError):
            payload_key(object())
