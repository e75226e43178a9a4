import pytest
from hypothesis import given, strategies as st

from hyperarr.algebra import Ring
from hyperarr.ideals import Ideal

from conftest import arrangements, example, polys

R3 = Ring(("x", "y", "z"))
X, Y, Z = R3.gens()


def test_quotient_examples():
    assert Ideal([X**2]).quotient(X) == Ideal([X])
    assert Ideal([X**2, X * Y]).quotient_ideal(Ideal([X, Y])) == Ideal([X])
    assert Ideal([X * Y]).quotient_ideal(Ideal([X, Y])) == Ideal([X * Y])
    J = Ideal([X**2 - Y * Z, X * Y])
    assert J.quotient(R3.one()) == J
    with pytest.raises(ValueError):
        J.quotient(R3.zero())


def test_saturation_examples():
    m = Ideal([X, Y])
    assert Ideal([X**2, X * Y]).saturation(m) == Ideal([X])
    assert Ideal([X, Y]).saturation(m).is_unit()


def test_intersection():
    assert Ideal([X]).intersection(Ideal([Y])) == Ideal([X * Y])
    assert Ideal([X**2, Y]).intersection(Ideal([X, Y**2])) == Ideal([X**2, X * Y, Y**2])


def test_krull_dim():
    assert Ideal([X, Y]).krull_dim() == 1
    assert Ideal([R3.one()]).krull_dim() == -1
    assert Ideal([X * Y]).krull_dim() == 2
    J = example("ex34").jacobian_ideal()
    _, betti = J.resolution()
    assert J.krull_dim() == 2
    # depth = l - projdim = 1 < dim: not Cohen-Macaulay, as expected for a non-free arrangement
    assert 4 - betti.projdim == 1


@pytest.mark.parametrize("name", ["boolean4", "braid4", "braid3"])
def test_dimension_matches_depth_for_free(name):
    A = example(name)
    J = A.jacobian_ideal()
    _, betti = J.resolution()
    assert J.krull_dim() == A.nvars - betti.projdim == A.nvars - 2


def test_saturation_detects_nonfree_rank3_flat():
    A = example("ex34")
    X_ = A.flat([1, 2, 3, 4])
    B, _ = A.essentialize(X_)
    J = B.jacobian_ideal()
    m = Ideal(B.ring.gens(), B.ring)
    assert J.saturation(m) != J
    # a free rank-3 localization is saturated
    F = example("boolean4")
    B2, _ = F.essentialize(F.flat([0, 1, 2]))
    J2 = B2.jacobian_ideal()
    assert J2.saturation(Ideal(B2.ring.gens(), B2.ring)) == J2


hom = polys(R3, max_terms=3, homogeneous_degree=2)


@given(st.lists(hom, min_size=1, max_size=3), polys(R3, max_terms=2, homogeneous_degree=1))
def test_quotient_property(gens, f):
    gens = [g for g in gens if g]
    if not gens or not f:
        return
    I = Ideal(gens)
    Q = I.quotient(f)
    assert Q.contains_ideal(I)
    for g in Q.groebner():
        assert I.contains(g * f)


@given(st.lists(hom, min_size=1, max_size=3))
def test_saturation_properties(gens):
    gens = [g for g in gens if g]
    if not gens:
        return
    I = Ideal(gens)
    m = Ideal([X, Y, Z])
    S = I.saturation(m)
    assert S.contains_ideal(I)
    assert S.saturation(m) == S
