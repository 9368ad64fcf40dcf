"""Tests for the Spencer complex and its comparison with de Rham complexes."""

import pytest

from tate_derham.dmodule import ConnectionModule
from tate_derham.errors import WindowTooSmall
from tate_derham.modules import ConnectionModel, StructureSheafModel
from tate_derham.spencer import (
    build_spencer,
    compositions_vanish,
    hom_spencer_equals_dr,
    resolution_check_truncated,
)

PRECISION = 8


class TestSpencerComplex:
    """Test the Spencer complex of the Weyl algebra"""

    @pytest.mark.parametrize("n,ranks", [(1, [1, 1]), (2, [1, 2, 1]), (3, [1, 3, 3, 1])])
    def test_ranks(self, n, ranks):
        """Test binomial ranks"""
        assert build_spencer(n, PRECISION).ranks == ranks

    def test_entries(self, weyl):
        """Test the signs of the differential out of theta_1 ^ theta_2"""
        sp = build_spencer(2, PRECISION)

        assert sp.entry(1, (), (1,)).equals(weyl("d1", 2))
        assert sp.entry(2, (2,), (1, 2)).equals(weyl("d1", 2))
        assert sp.entry(2, (1,), (1, 2)).equals(weyl("-d2", 2))

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_compositions_vanish(self, n):
        """Test d d = 0"""
        assert compositions_vanish(build_spencer(n, PRECISION))

    def test_dimension_bound(self):
        """Test that complexes are built for at most three variables"""
        with pytest.raises(ValueError):
            build_spencer(4)


class TestHomComparison:
    """Test Hom(Sp, M) against the de Rham complex of M"""

    @pytest.mark.parametrize("n", [1, 2])
    def test_structure_sheaf(self, n):
        """Test Hom(Sp, O) = DR(O)"""
        report = hom_spencer_equals_dr(StructureSheafModel(n, PRECISION), 4)

        assert report.equal
        assert report.compositions_zero
        assert report.offending == []

    def test_connection(self, tate):
        """Test Hom(Sp, M) = DR(M) for d/dx - t^-1"""
        model = ConnectionModel(ConnectionModule.scalar(tate("-t^-1")), PRECISION)

        assert hom_spencer_equals_dr(model, 4).equal

    def test_dimension_bound(self):
        """Test that the comparison is carried out for at most two variables"""
        with pytest.raises(ValueError):
            hom_spencer_equals_dr(StructureSheafModel(3, PRECISION), 2)


class TestResolution:
    """Test exactness of Sp -> O -> 0"""

    @pytest.mark.parametrize("n,window", [(1, 1), (1, 4), (2, 2), (2, 3)])
    def test_exact(self, n, window):
        """Test that every homology group vanishes"""
        report = resolution_check_truncated(n, window, PRECISION)

        assert report.exact
        assert report.augmentation_surjective
        assert not any(report.homology)

    def test_dims(self):
        """Test the truncated dimensions on the disc"""
        report = resolution_check_truncated(1, 1, PRECISION)

        assert report.dims == [2, 4, 2]
        assert report.ranks == [2, 2]

    def test_window_too_small(self):
        """Test that the top term must fit in the window"""
        with pytest.raises(WindowTooSmall):
            resolution_check_truncated(2, 1, PRECISION)

    def test_dimension_bound(self):
        """Test that the resolution is checked for at most two variables"""
        with pytest.raises(ValueError):
            resolution_check_truncated(3, 3, PRECISION)
