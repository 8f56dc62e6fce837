"""End-to-end checks of the proven guarantees on generated and random instances."""

import math
from fractions import Fraction

import pytest

from src.vector_packing import (
    AdviceTape,
    AGammaStrategy,
    AkStrategy,
    FirstFit,
    RestrictedAdvice,
    ScaledAdvice,
    ScaledParams,
    Variant,
    anyfit_lower_bound_instance,
    check_anyfit,
    competitive_bound,
    even_k_tightness,
    exact_opt,
    make_params,
    odd_k_adversary,
    oracle_restricted,
    oracle_scaled,
    random_cone_instance,
    run_online,
    solve_scaled_opt,
    validate_packing,
    write_tape,
)
from src.vector_packing.advice import BitString, encode_self_delimiting
from src.vector_packing.generators import make_rng, random_box_instance, random_long_vector_bin
from src.vector_packing.harness import BenchHarness
from src.vector_packing.restricted import bound_formula
from src.vector_packing.scaled import ScaledMode, overflow_bin_bound, repack_two_and_half


def run_a_gamma(sigma, params):
    tape = AdviceTape(write_tape(oracle_restricted(sigma, params)))
    return run_online(AGammaStrategy(params, tape), sigma)


def run_a_k(sigma, k=100):
    strategy = AkStrategy(ScaledParams(k), AdviceTape(write_tape(oracle_scaled(sigma, k))))
    return strategy, run_online(strategy, sigma)


class TestGridInstances:
    def test_even_grid_tightness(self):
        instance = even_k_tightness(20, 100, Fraction(1, 1000))
        assert validate_packing(instance.witness, instance.sigma)
        assert len(instance.witness) == 20

        counts = oracle_scaled(instance.sigma, 100).counts
        assert solve_scaled_opt(counts, 100).bins == 50

        _, report = run_a_k(instance.sigma)
        assert 50 <= report.bins_used <= 51

    def test_odd_grid_ratio_three(self):
        instance = odd_k_adversary(10, 99, Fraction(1, 1000))
        counts = oracle_scaled(instance.sigma, 99, ScaledMode.DIAGNOSTIC).counts
        scaled_opt = solve_scaled_opt(counts, 99).bins

        assert len(instance.witness) == 10
        assert Fraction(scaled_opt, len(instance.witness)) == 3


class TestAnyFitLowerBound:
    def test_first_fit_ratio(self):
        N = 60
        instance = anyfit_lower_bound_instance(N)
        report = run_online(FirstFit(), instance.sigma)

        assert report.bins_used == 30 + 10 + 30 + 60
        assert Fraction(report.bins_used, len(instance.witness)) == Fraction(13, 6)

        prefix_bins = {step.bin_index for step in report.trace[:N]}
        assert not any(step.bin_index in prefix_bins for step in report.trace[N:])
        assert check_anyfit(report.trace)


@pytest.mark.slow
class TestRestrictedGuarantees:
    @staticmethod
    def instances(t, count, seed):
        rng = make_rng(seed)
        for index in range(count):
            n = int(rng.integers(1, 15))
            yield random_cone_instance(n, t, seed=seed * 1000 + index).sigma

    @pytest.mark.parametrize("t", [Fraction(1), Fraction(1, 2), Fraction(7, 15)])
    def test_variant_a(self, t):
        params = make_params(t, Fraction(1, 2), Variant.A)
        assert params.k == 16
        bound = competitive_bound(params)
        for sigma in self.instances(t, 67, seed=1):
            report = run_a_gamma(sigma, params)
            opt = exact_opt(sigma).opt
            assert validate_packing(report.packing, sigma)
            assert report.bins_used <= bound * opt + 1

    @pytest.mark.parametrize("t", [Fraction(1, 2), Fraction(1, 3)])
    def test_variant_a_prime(self, t):
        params = make_params(t, Fraction(1, 2), Variant.A_PRIME)
        bound = competitive_bound(params)
        for sigma in self.instances(t, 100, seed=2):
            report = run_a_gamma(sigma, params)
            opt = exact_opt(sigma).opt
            assert validate_packing(report.packing, sigma)
            assert report.bins_used <= bound * opt + 1


@pytest.mark.slow
class TestGridGuarantees:
    def test_repacking_on_random_bins(self):
        for k, count in ((100, 500), (200, 200)):
            for seed in range(count):
                assert repack_two_and_half(random_long_vector_bin(k, seed), k) is not None

    @pytest.mark.parametrize("seed", range(30))
    def test_grid_strategy_bins(self, seed):
        sigma = random_box_instance(10, seed, denominator=20).sigma
        strategy, report = run_a_k(sigma)
        opt = exact_opt(sigma).opt

        assert validate_packing(report.packing, sigma)
        if report.kind_counts.get("overflow"):
            assert report.bins_used <= overflow_bin_bound(opt, 100) + 1
        else:
            assert report.bins_used == strategy.solution.bins


class TestAdviceEncoding:
    def test_random_payloads(self):
        rng = make_rng(2024)
        for _ in range(1000):
            k = int(rng.integers(1, 6))
            n = int(rng.integers(0, 50))
            counts = [0] * (3 * k)
            for _ in range(n // 2):
                counts[int(rng.integers(0, 3 * k))] += 1
            payload = RestrictedAdvice(tuple(counts[:k]), tuple(counts[k : 2 * k]), tuple(counts[2 * k :]), n=n)

            tape = AdviceTape(write_tape(payload))
            read = RestrictedAdvice.read(tape, k)
            assert (read.large, read.medium, read.small) == (payload.large, payload.medium, payload.small)

            blob = payload.to_bits()
            encoded = encode_self_delimiting(blob)
            assert len(encoded) == len(blob) + 2 * max(1, len(blob).bit_length()) + 1
            if len(blob):
                assert len(encoded) <= len(blob) + 2 * math.ceil(math.log2(len(blob) + 1)) + 1

    def test_scaled_payload(self):
        payload = ScaledAdvice(k=100, counts={(1, 50): 6, (51, 1): 6}, n=24)
        read = ScaledAdvice.read(AdviceTape(write_tape(payload)), 100)
        assert read.counts == payload.counts

    def test_empty_string(self):
        assert len(encode_self_delimiting(BitString(""))) == 3


class TestCurveValues:
    def test_break_even(self):
        assert bound_formula(Variant.A, Fraction(7, 15), 0) == Fraction(5, 2)
        assert competitive_bound(make_params(Fraction(7, 15), Fraction(1, 10**9), Variant.A)) > Fraction(5, 2)

    def test_a_prime_at_its_widest_angle(self):
        assert float(bound_formula(Variant.A_PRIME, Fraction(2679492, 10**7), 0)) == pytest.approx(2.6043, abs=1e-4)

    def test_curve_row_on_diagonal(self):
        rows = BenchHarness().cmd_curve([Fraction(1)]).set_index("t")
        assert rows.loc["1.000000", "c_combined"] == "2.000000"


@pytest.mark.slow
class TestOracleAgreement:
    def test_scaled_optimum(self, scaled_oracle):
        rng = make_rng(99)
        for _ in range(60):
            boxes = {(int(rng.integers(1, 101)), int(rng.integers(1, 101))) for _ in range(int(rng.integers(1, 5)))}
            budget = 12
            counts = {}
            for box in sorted(boxes):
                counts[box] = int(rng.integers(1, max(2, budget // len(boxes) + 1)))
            assert solve_scaled_opt(counts, 100).bins == scaled_oracle(counts, 100)

    def test_exact_optimum(self, opt_oracle):
        for seed in range(40):
            n = 1 + seed % 8
            sigma = random_box_instance(n, seed, denominator=8).sigma
            assert exact_opt(sigma).opt == opt_oracle(sigma)
