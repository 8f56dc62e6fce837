"""Unit tests for vectors, bins, cone membership and packing validation."""

from fractions import Fraction

import pytest

from src.vector_packing import (
    Bin,
    BinKind,
    ConeParams,
    Packing,
    ReservedSlot,
    Vec2,
    fits,
    in_cone,
    l1_norm,
    linf_norm,
    load,
    opt_load_lower_bound,
    validate_packing,
)
from src.vector_packing.core import as_rational, format_rational, parse_rational


def V(x, y) -> Vec2:
    return Vec2(Fraction(x), Fraction(y))


def bin_of(*vectors: Vec2) -> Bin:
    b = Bin()
    for v in vectors:
        b.add(v)
    return b


class TestRationals:
    @pytest.mark.parametrize("text, expected", [
        ("1/2", Fraction(1, 2)),
        ("3", Fraction(3)),
        ("0.2679492", Fraction(2679492, 10000000)),
        (" 7/15 ", Fraction(7, 15)),
    ])
    def test_parse_rational(self, text, expected):
        assert parse_rational(text) == expected

    def test_parse_rejects_garbage(self):
        with pytest.raises(ValueError, match="Invalid rational"):
            parse_rational("one half")

    def test_parse_format_round_trip(self):
        for value in (Fraction(0), Fraction(5), Fraction(-3, 7), Fraction(123456789, 1000)):
            assert parse_rational(format_rational(value)) == value

    def test_as_rational_rejects_floats(self):
        with pytest.raises(TypeError):
            as_rational(0.5)
        with pytest.raises(TypeError):
            as_rational(True)


class TestVec2:
    def test_coordinates_are_fractions(self):
        v = Vec2(1, "1/3")
        assert v.x == Fraction(1) and v.y == Fraction(1, 3)
        assert isinstance(v.y, Fraction)

    @pytest.mark.parametrize("x, y", [("-1/10", 0), (0, "11/10"), (2, 2)])
    def test_outside_unit_square_rejected(self, x, y):
        with pytest.raises(ValueError, match="outside"):
            V(x, y)

    @pytest.mark.parametrize("v, l1, linf", [
        (V("3/10", "4/10"), Fraction(7, 10), Fraction(4, 10)),
        (V(0, 0), Fraction(0), Fraction(0)),
        (V(1, 1), Fraction(2), Fraction(1)),
        (V("1/2", "1/2"), Fraction(1), Fraction(1, 2)),
        (V(0, 1), Fraction(1), Fraction(1)),
    ])
    def test_norms(self, v, l1, linf):
        assert l1_norm(v) == v.l1 == l1
        assert linf_norm(v) == v.linf == linf
        assert l1_norm(v) == linf_norm(v) + min(v.x, v.y)
        assert l1_norm(v) <= 2 * linf_norm(v)


class TestFits:
    def test_boundary_counts_as_fitting(self):
        assert fits(bin_of(V("1/2", "1/2")), V("1/2", "1/2"))

    def test_overflowing_coordinate(self):
        assert not fits(bin_of(V("1/2", "1/2")), V("6/10", "1/10"))

    def test_empty_bin_takes_anything(self):
        for v in (V(1, 1), V(0, 0), V("1/3", 1)):
            assert Bin().fits(v)

    def test_monotone_in_bin_sums(self):
        v = V("1/2", "1/4")
        small, large = bin_of(V("6/10", 0)), bin_of(V("6/10", 0), V(0, "1/2"))
        assert not fits(small, v)
        assert not fits(large, v)


class TestLoad:
    def test_sequence_load(self):
        assert load([V("1/2", "1/2"), V("1/4", "1/4")]) == Fraction(3, 2)
        assert load([]) == 0
        assert load([V(1, 1)]) == 2

    def test_load_over_bins(self):
        bins = [bin_of(V("1/2", "1/2")), bin_of(V(1, 0), V(0, "1/4"))]
        assert load(bins) == Fraction(9, 4)

    @pytest.mark.parametrize("sigma, expected", [
        ([V(1, 1), V(1, 1)], 2),
        ([V("1/2", "1/2")], 1),
        ([V("1/2", "1/2")] * 3, 2),
        ([], 0),
    ])
    def test_opt_load_lower_bound(self, sigma, expected):
        assert opt_load_lower_bound(sigma) == expected


class TestCone:
    def test_slope_range(self):
        with pytest.raises(ValueError):
            ConeParams(Fraction(0))
        with pytest.raises(ValueError):
            ConeParams(Fraction(3, 2))
        assert ConeParams(Fraction(1, 2)).d == Fraction(3, 2)

    def test_gamma_is_zero_on_the_diagonal(self):
        assert ConeParams(Fraction(1)).gamma == pytest.approx(0)

    @pytest.mark.parametrize("t, v, expected", [
        (Fraction(1), V("3/10", "3/10"), True),
        (Fraction(1), V("3/10", "31/100"), False),
        (Fraction(7, 15), V("15/100", "7/100"), True),
        (Fraction(7, 15), V("15/100", "69/1000"), False),
        (Fraction(1, 2), V(0, 0), True),
    ])
    def test_in_cone(self, t, v, expected):
        assert in_cone(v, ConeParams(t)) is expected


class TestBinBookkeeping:
    @pytest.fixture
    def critical_bin(self):
        b = bin_of(V("1/10", "1/10"))
        b.slots.append(ReservedSlot(BinKind.SCALED, (50, 1), Fraction(51, 100), corner=V("1/2", "1/100")))
        b.slots.append(ReservedSlot(BinKind.SCALED, (1, 40), Fraction(41, 100), corner=V("1/100", "2/5")))
        return b

    def test_virtual_load_includes_unused_slots(self, critical_bin):
        assert critical_bin.load == Fraction(1, 5)
        assert critical_bin.virtual_load == Fraction(1, 5) + Fraction(92, 100)
        assert critical_bin.virtual_load >= critical_bin.load

    def test_used_slot_stops_counting(self, critical_bin):
        slot = critical_bin.unused_slot(BinKind.SCALED, (50, 1))
        slot.used = True
        assert critical_bin.reserved_load == Fraction(41, 100)
        assert critical_bin.unused_slot(BinKind.SCALED, (50, 1)) is None

    def test_reserved_sum_adds_corners(self, critical_bin):
        assert critical_bin.reserved_sum() == (Fraction(61, 100), Fraction(51, 100))

    def test_reserved_sum_needs_corners(self):
        b = Bin()
        b.slots.append(ReservedSlot(BinKind.MEDIUM, 3, Fraction(15, 16)))
        with pytest.raises(ValueError, match="no corner"):
            b.reserved_sum()

    def test_slot_reservation_must_be_positive(self):
        with pytest.raises(ValueError):
            ReservedSlot(BinKind.LARGE, 1, Fraction(0))


class TestValidatePacking:
    def test_valid_partition(self):
        sigma = [V(1, 0), V(1, 0), V(0, 1)]
        packing = Packing.from_groups([[V(1, 0), V(0, 1)], [V(1, 0)]])
        assert validate_packing(packing, sigma).ok
        assert len(packing) >= opt_load_lower_bound(sigma)

    def test_empty(self):
        assert validate_packing(Packing(), [])

    def test_overfull_bin(self):
        sigma = [V(1, 1), V("1/2", 0)]
        result = validate_packing(Packing.from_groups([sigma]), sigma)
        assert not result
        assert [violation.kind for violation in result.violations] == ["overfull"]

    def test_missing_and_duplicate(self):
        sigma = [V("1/2", 0), V(0, "1/2")]
        packing = Packing.from_groups([[V("1/2", 0)], [V("1/2", 0)]])
        kinds = {violation.kind for violation in validate_packing(packing, sigma).violations}
        assert kinds == {"missing", "duplicate"}
