import pytest
from hypothesis import given, strategies as st

from hyperarr.algebra import FreeModule, HomMatrix, Ring
from hyperarr.resolution import (
    BettiTable,
    GradedResolution,
    format_resolution,
    free_resolution,
    minimalize,
    projdim_and_depth,
    syzygy_module,
)

from conftest import arrangements, example

R2 = Ring(("x", "y"))
A_, B_ = R2.gens()


def test_koszul():
    res = free_resolution([A_, B_])
    assert res.minimal and res.is_complex() and res.is_homogeneous()
    assert res.shifts() == [[0], [1, 1], [2]]
    assert str(res) == "0 -> S(-2) -> S(-1)^2 -> S"
    assert projdim_and_depth(res.betti(), 2) == (2, 0)
    again, betti = minimalize(res)
    assert again.shifts() == res.shifts() and betti == res.betti()


def test_syzygies_of_xy():
    F0 = FreeModule.graded(R2, [0])
    F1 = FreeModule.graded(R2, [1, 1])
    M = HomMatrix.from_rows(F1, F0, [[A_, B_]])
    K = syzygy_module(M)
    assert K.source.shifts == (2,) or list(K.source.shifts) == [2]
    (col,) = K.columns
    c = list(col.components())
    assert c == [-B_, A_] or c == [B_, -A_]


def test_syzygies_of_single_polynomial():
    F0 = FreeModule.graded(R2, [0])
    F1 = FreeModule.graded(R2, [2])
    K = syzygy_module(HomMatrix.from_rows(F1, F0, [[A_ * B_]]))
    assert K.source.rank == 0


def test_identity_summand_cancelled():
    # S <- S(-1)^2 + S(-2) <- S(-2)^2 with a padded unit entry
    R = R2
    zero = R.zero()
    F0 = FreeModule.graded(R, [0])
    F1 = FreeModule.graded(R, [1, 1, 2])
    F2 = FreeModule.graded(R, [2, 2])
    d1 = HomMatrix.from_rows(F1, F0, [[A_, B_, zero]])
    d2 = HomMatrix.from_rows(F2, F1, [[-B_, zero], [A_, zero], [zero, R.one()]])
    res = GradedResolution([F0, F1, F2], [d1, d2])
    assert res.has_unit_entries()
    out, betti = minimalize(res)
    assert out.shifts() == [[0], [1, 1], [2]]
    assert betti.totals == (1, 2, 1)
    assert out.is_complex()


@pytest.mark.parametrize(
    "name, expected",
    [
        ("ex34", "0 -> S(-7) -> S(-5)+S(-6)^3 -> S(-4)^4 -> S"),
        ("ex36", "0 -> S(-13) -> S(-8)+S(-11)^3 -> S(-7)^4 -> S"),
        ("boolean4", "0 -> S(-4)^3 -> S(-3)^4 -> S"),
    ],
)
def test_jacobian_resolutions(name, expected):
    res, betti = example(name).jacobian_ideal().resolution()
    assert str(res) == expected
    assert res.is_complex() and res.is_homogeneous()
    assert not res.has_unit_entries()
    for i in range(1, res.length):
        assert res.is_exact_at(i)


def test_boolean_betti_and_depth():
    _, betti = example("boolean4").jacobian_ideal().resolution()
    assert betti.totals == (1, 4, 3)
    assert projdim_and_depth(betti, 4) == (2, 2)
    _, b34 = example("ex34").jacobian_ideal().resolution()
    assert projdim_and_depth(b34, 4) == (3, 1)


def test_betti_json_roundtrip():
    b = BettiTable.from_shifts([[0], [4, 4, 4, 4], [5, 6, 6, 6], [7]])
    assert BettiTable.from_json(b.to_json()) == b
    assert b.totals == (1, 4, 4, 1)
    assert format_resolution([[0], [4] * 4, [5, 6, 6, 6], [7]]) == "0 -> S(-7) -> S(-5)+S(-6)^3 -> S(-4)^4 -> S"


def test_inhomogeneous_input_rejected():
    with pytest.raises(ValueError):
        free_resolution([A_ + B_ * B_])


@given(arrangements(l=3, min_n=2, max_n=6))
def test_resolution_invariants(A):
    from hyperarr.classify import _raw_resolution

    raw = _raw_resolution(A)
    assert raw.is_complex() and raw.is_homogeneous()
    res, betti = minimalize(raw)
    assert res.is_complex() and not res.has_unit_entries()
    # minimalize never grows the totals and is idempotent
    raw_totals = [m.rank for m in raw.modules]
    assert all(b <= r for b, r in zip(betti.totals, raw_totals))
    res2, betti2 = minimalize(res)
    assert betti2 == betti
    # alternating sum of total Betti numbers vanishes for J != 0
    assert sum((-1) ** i * b for i, b in enumerate(betti.totals)) == 0
    assert betti.projdim <= A.nvars
