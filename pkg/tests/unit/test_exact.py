"""Unit tests for the exact offline optimum."""

from fractions import Fraction

import pytest

from src.vector_packing import (
    BudgetExhaustedError,
    FirstFit,
    Packing,
    Vec2,
    anyfit_lower_bound_instance,
    even_k_tightness,
    exact_opt,
    opt_load_lower_bound,
    run_online,
    validate_packing,
    verify_witness,
)
from src.vector_packing.exact import first_fit_decreasing
from src.vector_packing.generators import make_rng, random_box_instance


def V(x, y) -> Vec2:
    return Vec2(Fraction(x), Fraction(y))


class TestExactOpt:
    @pytest.mark.parametrize("sigma, expected", [
        ([V("1/2", "1/2"), V("1/2", "1/2")], 1),
        ([V(1, 0), V(1, 0), V(0, 1)], 2),
        ([], 0),
        ([V(1, 1)], 1),
    ])
    def test_known_optima(self, sigma, expected):
        result = exact_opt(sigma)
        assert result.opt == expected
        assert result.exact
        assert verify_witness(result.opt, result.witness, sigma)

    def test_even_grid_instance_fits_in_s_bins(self):
        instance = even_k_tightness(2)
        assert exact_opt(instance.sigma).opt == 2

    def test_search_beats_load_bound(self):
        sigma = [V("34/100", 0)] * 5
        result = exact_opt(sigma)
        assert result.lower == 2
        assert result.opt == 3
        assert len(result.witness) == 3

    @pytest.mark.parametrize("seed", range(12))
    def test_matches_brute_force(self, seed, opt_oracle):
        n = 3 + seed % 5
        sigma = random_box_instance(n, seed, denominator=10).sigma
        result = exact_opt(sigma)

        assert result.opt == opt_oracle(sigma)
        assert validate_packing(result.witness, sigma)
        assert opt_load_lower_bound(sigma) <= result.opt <= run_online(FirstFit(), sigma).bins_used

    def test_permutation_invariant(self):
        sigma = random_box_instance(9, 3, denominator=12).sigma
        expected = exact_opt(sigma).opt
        rng = make_rng(11)
        for _ in range(5):
            shuffled = [sigma[index] for index in rng.permutation(len(sigma))]
            assert exact_opt(shuffled).opt == expected

    def test_anyfit_instance_resolves_without_search(self):
        instance = anyfit_lower_bound_instance(12)
        result = exact_opt(instance.sigma)
        assert result.opt == 12
        assert result.nodes == 0


class TestBudget:
    def test_exhausted_budget_reports_interval(self):
        sigma = [V("34/100", 0)] * 5
        with pytest.raises(BudgetExhaustedError) as info:
            exact_opt(sigma, node_budget=1)

        result = info.value.result
        assert not result.exact
        assert (result.lower, result.opt) == (2, 3)
        assert validate_packing(result.witness, sigma)
        assert "[2, 3]" in str(info.value)

    def test_budget_from_environment(self, monkeypatch):
        monkeypatch.setenv("VECPACK_NODE_BUDGET", "1")
        with pytest.raises(BudgetExhaustedError):
            exact_opt([V("34/100", 0)] * 5)


class TestFirstFitDecreasing:
    def test_sorts_by_l1(self):
        sigma = [V("1/20", "1/20"), V("9/10", "9/10"), V("1/20", "1/20")]
        packing = first_fit_decreasing(sigma)
        assert len(packing) == 1
        assert packing.bins[0].contents[0] == V("9/10", "9/10")


class TestVerifyWitness:
    def test_generator_witness(self):
        instance = anyfit_lower_bound_instance(6)
        assert verify_witness(6, instance.witness, instance.sigma)

    def test_wrong_claim(self):
        instance = anyfit_lower_bound_instance(6)
        assert not verify_witness(5, instance.witness, instance.sigma)

    def test_duplicated_vector(self):
        sigma = [V("1/2", 0), V(0, "1/2")]
        witness = Packing.from_groups([[V("1/2", 0), V("1/2", 0)]])
        assert not verify_witness(1, witness, sigma)

    def test_empty(self):
        assert verify_witness(0, Packing(), [])
