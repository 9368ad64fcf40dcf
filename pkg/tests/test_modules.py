"""Tests for chain-level module models and truncated de Rham complexes."""

import pytest

from tate_derham.dmodule import ConnectionModule, CyclicModule, cyclic_to_connection
from tate_derham.errors import WindowTooSmall
from tate_derham.modules import (
    ConnectionModel,
    PushforwardModel,
    StructureSheafModel,
    TruncatedComplex,
    act_operator,
    cells,
    describe_cell,
    dr_differential,
    forms,
    linear_map_matrix,
    monomials,
    wedge_sign,
)

PRECISION = 8


class TestCombinatorics:
    """Test monomials, forms and signs"""

    def test_monomials(self):
        """Test exponent vectors of bounded degree"""
        assert monomials(1, 2) == [(0,), (1,), (2,)]
        assert len(monomials(2, 2)) == 6
        assert monomials(0, 3) == [()]

    def test_forms(self):
        """Test sorted index tuples"""
        assert forms(3, 2) == [(1, 2), (1, 3), (2, 3)]
        assert forms(2, 0) == [()]

    def test_wedge_sign(self):
        """Test the sign of dx_j ^ dx_I"""
        assert wedge_sign(1, (2,)) == 1
        assert wedge_sign(2, (1,)) == -1
        assert wedge_sign(3, (1, 2)) == 1
        assert wedge_sign(1, (1,)) == 0

    def test_describe_cell(self):
        """Test human-readable cell labels"""
        assert describe_cell(((0, (1,), (2,)), (1, 2))) == "e0*x1*d2^2 dx1^dx2"
        assert describe_cell(((1, (0, 0), ()), ())) == "e1"


class TestModels:
    """Test the actions of d_j and x_j"""

    def test_structure_sheaf(self):
        """Test d and x on monomials"""
        model = StructureSheafModel(2, PRECISION)

        assert model.d(1, (0, (2, 1), ())) == {(0, (1, 1), ()): model.constant(2)}
        assert model.d(1, (0, (0, 1), ())) == {}
        assert model.x(2, (0, (0, 1), ())) == {(0, (0, 2), ()): model.constant(1)}

    def test_connection(self, tate):
        """Test d/dx + A on x^j e_s"""
        model = ConnectionModel(ConnectionModule.scalar(tate("-t^-1")), PRECISION)
        image = model.d(1, (0, (3,), ()))

        assert image[(0, (2,), ())] == model.constant(3)
        assert image[(0, (3,), ())].valuation == -1

    def test_connection_labels(self, weyl):
        """Test that labels run over generators fastest"""
        model = ConnectionModel(cyclic_to_connection(CyclicModule(weyl("d1^2 + x1"))), PRECISION)

        assert model.labels(1, 0) == [(0, (0,), ()), (1, (0,), ()), (0, (1,), ()), (1, (1,), ())]
        assert model.growth == 1

    def test_pushforward_transversal(self):
        """Test that d_n raises the tail and x_n lowers it"""
        model = PushforwardModel(StructureSheafModel(1, PRECISION), 2)

        assert model.d(2, (0, (1,), (1,))) == {(0, (1,), (2,)): model.constant(1)}
        assert model.x(2, (0, (1,), (2,))) == {(0, (1,), (1,)): model.constant(-2)}
        assert model.x(2, (0, (1,), (0,))) == {}

    def test_pushforward_base(self):
        """Test that base derivations act on the base label"""
        model = PushforwardModel(StructureSheafModel(1, PRECISION), 2)

        assert model.d(1, (0, (2,), (1,))) == {(0, (1,), (1,)): model.constant(2)}
        assert len(model.labels(1, 1)) == 4

    def test_pushforward_dimension(self):
        """Test that the ambient dimension must exceed the base"""
        with pytest.raises(ValueError):
            PushforwardModel(StructureSheafModel(2, PRECISION), 2)

    def test_act_operator(self, weyl):
        """Test the action of x d on x^3"""
        model = StructureSheafModel(1, PRECISION)
        image = act_operator(model, weyl("x1*d1"), {(0, (3,), ()): model.constant(1)})

        assert image == {(0, (3,), ()): model.constant(3)}

    def test_act_operator_dimension(self, weyl):
        """Test that operators and models must share the variables"""
        model = StructureSheafModel(1, PRECISION)

        with pytest.raises(ValueError):
            act_operator(model, weyl("d1", 2), {(0, (1,), ()): model.constant(1)})


class TestComplexes:
    """Test truncated de Rham complexes"""

    def test_differential(self):
        """Test delta(x1 x2) = x2 dx1 + x1 dx2"""
        model = StructureSheafModel(2, PRECISION)
        image = dr_differential(model, {((0, (1, 1), ()), ()): model.constant(1)})

        assert image == {
            ((0, (0, 1), ()), (1,)): model.constant(1),
            ((0, (1, 0), ()), (2,)): model.constant(1),
        }

    def test_build(self):
        """Test the sizes of a truncated complex on the 2-polydisc"""
        complex_ = TruncatedComplex.build(StructureSheafModel(2, PRECISION), 2, 0, PRECISION)

        assert [len(b) for b in complex_.bases] == [6, 12, 6]
        assert [(m.rows, m.cols) for m in complex_.differentials] == [(12, 6), (6, 12)]

    def test_build_pushforward(self, tate):
        """Test that tails grow with the degree"""
        model = PushforwardModel(ConnectionModel(ConnectionModule.scalar(tate("-t")), PRECISION), 2)
        complex_ = TruncatedComplex.build(model, 2, 1, PRECISION)

        assert [len(b) for b in complex_.bases] == [6, 18, 12]

    def test_negative_window(self):
        """Test that negative windows are refused"""
        with pytest.raises(WindowTooSmall):
            TruncatedComplex.build(StructureSheafModel(1, PRECISION), -1, 0, PRECISION)

    def test_image_outside_targets(self):
        """Test that a map leaving its target window is refused"""
        model = StructureSheafModel(1, PRECISION)
        sources = cells(model, 0, 2, 0)
        targets = cells(model, 1, 0, 0)

        with pytest.raises(WindowTooSmall):
            linear_map_matrix(lambda cell: dr_differential(model, {cell: model.constant(1)}), sources, targets, 8)
