"""Local algebra construction: hand-checked structure oracles."""

from fractions import Fraction

import pytest

from redhom.algebra import (
    Algebra,
    AlgebraError,
    algebra_from_presentation,
    build_algebra,
    parse_polynomial,
)
from redhom.linalg import GF2, GF3, QQ, Matrix


def square_zero_two_vars():
    return build_algebra(GF2, ["x", "y"], [], 2)


def truncated_line(power=3):
    return build_algebra(GF2, ["x"], [], power)


class TestParser:
    def test_basic_terms(self):
        p = parse_polynomial("x^2 - y^2", ["x", "y"], GF3)
        assert p == {(2, 0): 1, (0, 2): 2}

    def test_products_and_coefficients(self):
        p = parse_polynomial("2*x*y + x", ["x", "y"], GF3)
        assert p == {(1, 1): 2, (1, 0): 1}

    def test_rational_coefficients(self):
        p = parse_polynomial("x/2", ["x"], QQ)
        assert p == {(1,): Fraction(1, 2)}

    def test_coefficient_reduction_mod_p(self):
        assert parse_polynomial("3*x", ["x"], GF3) == {}
        assert parse_polynomial("4*x", ["x"], GF3) == {(1,): 1}

    def test_unknown_symbol_rejected(self):
        with pytest.raises(AlgebraError):
            parse_polynomial("x + z", ["x", "y"], GF2)

    def test_bad_denominator_rejected(self):
        with pytest.raises(AlgebraError):
            parse_polynomial("x/3", ["x"], GF3)


class TestSquareZeroPlane:
    """k[x,y] with every degree-2 monomial killed by truncation."""

    def test_basis(self):
        a = square_zero_two_vars()
        assert a.dim == 3
        assert a.basis_labels() == ["1", "x", "y"]
        assert a.hilbert_function() == [1, 2]

    def test_multiplication_vanishes_in_degree_two(self):
        a = square_zero_two_vars()
        for u in range(2):
            for v in range(2):
                assert (a.varmat[u] @ a.varmat[v]).is_zero()

    def test_socle_is_whole_maximal_ideal(self):
        a = square_zero_two_vars()
        assert a.socle_dim == 2
        assert not a.is_gorenstein
        assert a.embedding_dim == 2

    def test_explicit_relations_agree_with_truncation(self):
        b = build_algebra(GF2, ["x", "y"], ["x^2", "x*y", "y^2"], 3)
        a = square_zero_two_vars()
        assert b.basis_mons == a.basis_mons
        assert all(p == q for p, q in zip(b.varmat, a.varmat))


class TestTruncatedLine:
    def test_structure(self):
        a = truncated_line(3)
        assert a.basis_labels() == ["1", "x", "x^2"]
        assert a.socle_dim == 1
        assert a.is_gorenstein
        assert a.embedding_dim == 1

    def test_regular_representation(self):
        a = truncated_line(3)
        x = a.varmat[0]
        assert (x @ x) == a.regmat[2]
        assert (x @ x @ x).is_zero()


class TestMixedRelations:
    def test_monomial_relations_gf3(self):
        # x^2 and x*y killed, y^2 survives
        a = build_algebra(GF3, ["x", "y"], ["x^2", "x*y"], 3)
        assert a.dim == 4
        assert a.basis_labels() == ["1", "x", "y", "y^2"]
        assert a.hilbert_function() == [1, 2, 1]
        assert a.socle_dim == 2
        assert a.embedding_dim == 2
        y = a.varmat[1]
        assert (y @ y) == a.regmat[3]

    def test_linear_relation_identifies_variables(self):
        a = build_algebra(GF3, ["x", "y"], ["x - y"], 2)
        assert a.dim == 2
        assert a.basis_labels() == ["1", "y"]
        assert a.var_class[0] == a.var_class[1]

    def test_binomial_relation_gorenstein(self):
        # x^2 = y^2, xy = 0: basis 1, x, y, x^2 with socle x^2 only
        a = build_algebra(GF3, ["x", "y"], ["x^2 - y^2", "x*y"], 3)
        assert a.dim == 4
        assert a.socle_dim == 1
        assert a.is_gorenstein
        y = a.varmat[1]
        x = a.varmat[0]
        assert (y @ y) == (x @ x)

    def test_rational_field(self):
        # ideal holds x^2 - x^3 and x*(x^2 - x^3) = x^3 mod m^4, hence x^2
        a = build_algebra(QQ, ["x"], ["x^2 - x^3"], 4)
        assert a.basis_labels() == ["1", "x"]

    def test_constant_term_rejected(self):
        with pytest.raises(AlgebraError):
            build_algebra(GF2, ["x"], ["1 + x"], 3)

    def test_duplicate_names_rejected(self):
        with pytest.raises(AlgebraError):
            build_algebra(GF2, ["x", "x"], [], 2)


class TestElements:
    def test_element_from_string(self):
        a = build_algebra(GF3, ["x", "y"], ["x^2", "x*y"], 3)
        v = a.element_from_string("x + 2*y^2")
        assert [v.entry(i, 0) for i in range(4)] == [0, 1, 0, 2]
        assert a.element_str(v) == "x + 2*y^2"

    def test_reduction_in_element_parse(self):
        a = build_algebra(GF3, ["x", "y"], ["x - y"], 2)
        v = a.element_from_string("x")
        assert a.element_str(v) == "y"

    def test_multiply(self):
        a = truncated_line(4)
        x = a.element_from_string("x")
        x2 = a.multiply(x, x)
        assert a.element_str(x2) == "x^2"
        x4 = a.multiply(x2, x2)
        assert x4.is_zero()


class TestSerialization:
    def test_presentation_roundtrip(self):
        a = build_algebra(GF3, ["x", "y"], ["x^2 - y^2", "x*y"], 3)
        b = algebra_from_presentation(a.presentation())
        assert b.basis_mons == a.basis_mons
        assert b.field == a.field
        assert all(p == q for p, q in zip(b.regmat, a.regmat))

    def test_summary_keys(self):
        s = square_zero_two_vars().summary()
        assert s["dimension"] == 3
        assert s["gorenstein"] is False
        assert s["socle_dimension"] == 2


class TestFreeHelpers:
    def test_free_varmat_block_structure(self):
        a = truncated_line(3)
        vms = a.free_varmat(2)
        assert vms[0].rows == 6
        x = a.varmat[0]
        assert vms[0].take_rows(range(3)).take_cols(range(3)) == x
        assert vms[0].take_rows(range(3, 6)).take_cols(range(3, 6)) == x
        assert vms[0].take_rows(range(3)).take_cols(range(3, 6)).is_zero()

    def test_action_stack_identity_slot(self):
        a = square_zero_two_vars()
        st = a.free_action_stack(2)
        assert st.shape == (3, 6, 6)
        assert (st[0] == Matrix.identity(GF2, 6).a).all()
