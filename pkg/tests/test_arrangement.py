import json

import pytest
from hypothesis import given, strategies as st

from hyperarr.algebra import Ring
from hyperarr.arrangement import (
    Arrangement,
    ArrangementError,
    Flat,
    LinearForm,
    brute_force_flats,
    cone,
    from_json,
    from_text,
    load,
    to_json,
    to_text,
)
from hyperarr.ideals import Ideal
from hyperarr.linalg import matmul, rank

from conftest import arrangements, example


def test_linear_form_normalization():
    assert LinearForm.from_vector([-2, 4, 0]).coeffs == (1, -2, 0)
    assert LinearForm.from_vector(["1/2", "1/3"]).coeffs == (3, 2)
    with pytest.raises(ArrangementError):
        LinearForm.from_vector([0, 0])


def test_parse():
    A = Arrangement.parse(["x", "y", "z", "t"])
    assert len(A) == 4 and A.names == ("x", "y", "z", "t")
    with pytest.raises(ArrangementError, match="duplicate"):
        Arrangement.parse(["x", "2*x"], ("x", "y"))
    with pytest.raises(ArrangementError, match="cone"):
        Arrangement.parse(["x - y - 1"], ("x", "y"))
    with pytest.raises(ArrangementError):
        Arrangement.parse(["x - x"], ("x", "y"))
    with pytest.raises(ArrangementError):
        Arrangement.parse(["x*y"], ("x", "y"))
    assert Arrangement.parse([[1, 0], [1, -1]], 2).render_forms() == ["x", "x - y"]


def test_defining_polynomial():
    A = Arrangement.parse(["x", "y"])
    x, y = A.ring.gens()
    assert A.defining_polynomial() == x * y
    B = example("ex34")
    x, y, z, t = B.ring.gens()
    assert B.defining_polynomial() == x * (x - y) * (x - t) * (y - z) * (z - t)
    assert B.defining_polynomial().degree() == 5
    empty = Arrangement((), ("x", "y"))
    assert empty.defining_polynomial() == empty.ring.one()


def test_jacobian_ideal():
    A = Arrangement.parse(["x", "y"])
    x, y = A.ring.gens()
    assert A.jacobian_ideal() == Ideal([x, y])
    single = Arrangement.parse(["x"], ("x", "y"))
    assert single.jacobian_ideal().is_unit()


def test_lattice_examples():
    B = Arrangement.boolean(3)
    assert B.lattice.counts() == [1, 3, 3, 1]
    braid = Arrangement.braid(3)
    assert braid.rank == 2 and not braid.is_essential()
    assert braid.flats(2) == [Flat((0, 1, 2), 2)]
    assert B.rank == 3 and B.is_essential()
    ex35 = example("ex35")
    assert ex35.rank == 4 and ex35.is_essential()
    assert set(example("ex34").flats()) == brute_force_flats(example("ex34"))


def test_lattice_covers():
    A = example("ex34")
    L = A.lattice
    for X, Y in L.covers:
        assert Y.rank == X.rank + 1
        assert set(X.indices) < set(Y.indices)
    assert L.center() == A.center()


def test_localization():
    A = example("ex34")
    assert A.localization(A.center()) == A
    X = A.flat([1, 2, 3])
    assert X.indices == (1, 2, 3, 4)
    assert A.localization(X).render_forms() == ["x - y", "x - t", "y - z", "z - t"]
    assert A.localization(A.flat([2])).render_forms() == ["x - t"]
    with pytest.raises(ArrangementError):
        A.localization(Flat((2, 3, 4), 3))


def test_restriction():
    B = Arrangement.boolean(3)
    R = B.restriction(0)
    assert R.nvars == 2 and len(R) == 2
    braid = Arrangement.braid(3)
    assert len(braid.restriction(0)) == 1
    sec5 = example("sec5")
    # hyperplanes of A^H correspond to the rank-2 flats through H
    for h in range(len(sec5)):
        assert len(sec5.restriction(h)) == sum(h in X.indices for X in sec5.flats(2))


def test_deletion_and_addition():
    A = Arrangement.parse(["x", "y"])
    assert A.deletion(1).render_forms() == ["x"]
    sec5 = example("sec5")
    assert sec5.deletion(5).same_set(example("sec5_a1"))
    for h in range(len(sec5)):
        back = sec5.deletion(h).addition(sec5.forms[h].coeffs)
        assert back.same_set(sec5)
    with pytest.raises(ArrangementError):
        A.deletion(2)


def test_cone():
    C = cone(["x", "x - 1"])
    assert C.names == ("x", "z")
    assert C.render_forms() == ["x", "x - z", "z"]
    C2 = cone(["x", "y"], ("x", "y"))
    assert C2.render_forms() == ["x", "y", "z"]
    C3 = cone(["x", "y", "x + y - 1"])
    assert len(C3) == 4 and C3.nvars == 3
    with pytest.raises(ArrangementError):
        cone([[0, 0, 1]], 2)


def test_essentialize():
    B = Arrangement.boolean(3)
    E, M = B.essentialize(B.flat([0, 1]))
    assert E.render_forms() == ["x", "y"]
    assert M == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    A = example("ex34")
    X = A.flat([1, 2, 3])
    E, M = A.essentialize(X)
    assert E.nvars == 3 and len(E) == 4 and E.is_essential()
    # pulling the new forms back through M gives back the original forms up to scale
    for new, old in zip(E.forms, [A.forms[i] for i in X.indices]):
        pulled = [sum(new.coeffs[k] * M[k][j] for k in range(3)) for j in range(4)]
        assert LinearForm.from_vector(pulled) == old


def test_flat_prime_ideal():
    B = Arrangement.boolean(3)
    x, y, z = B.ring.gens()
    assert B.flat_prime_ideal(B.flat([0, 1])) == Ideal([x, y])
    A = example("ex34")
    x, y, z, t = A.ring.gens()
    assert A.flat_prime_ideal(A.flat([1, 2, 3])) == Ideal([y - z, x - t, z - t])
    ex35 = example("ex35")
    x, y, z, t = ex35.ring.gens()
    for gens in ([y + z, x + z, t], [y - z, x - z, t], [y - t, x - t, z]):
        I = Ideal(gens)
        hits = [X for X in ex35.flats(3) if ex35.flat_prime_ideal(X) == I]
        assert len(hits) == 1


def test_file_formats(tmp_path):
    A = example("ex34")
    assert from_json(json.loads(json.dumps(to_json(A)))) == A
    assert from_text(to_text(A)) == A
    p = tmp_path / "a.txt"
    p.write_text("# comment\nvars: x, y, z\nx\ny  # trailing\nx + y + z\n")
    assert load(p).render_forms() == ["x", "y", "x + y + z"]
    with pytest.raises(ArrangementError):
        from_json({"forms": [[1, 0]], "variables": ["x", "y"], "version": 99})


@given(arrangements(l=3, max_n=7))
def test_lattice_matches_brute_force(A):
    assert set(A.flats()) == brute_force_flats(A)
    for X in A.flats():
        assert len(X) >= X.rank
        assert A.closure(X.indices) == X
    assert len(A.flats(A.rank)) == 1


@given(arrangements(l=4, max_n=6))
def test_lattice_matches_brute_force_l4(A):
    assert set(A.flats()) == brute_force_flats(A)


@given(arrangements(l=3, min_n=2, max_n=7))
def test_localization_properties(A):
    for X in A.flats():
        AX = A.localization(X)
        assert (AX == A) == (X == A.center())
        # (A_X)_Y = A_Y for flats Y below X
        for Y in AX.flats():
            orig = tuple(X.indices[i] for i in Y.indices)
            assert AX.localization(Y).forms == A.localization(A.flat(orig)).forms


@given(arrangements(l=3, min_n=3, max_n=7).filter(lambda A: A.is_essential()), st.data())
def test_restriction_rank(A, data):
    h = data.draw(st.integers(0, len(A) - 1))
    R = A.restriction(h)
    assert R.rank == A.rank - 1


@given(arrangements(l=3, min_n=1, max_n=6))
def test_cone_adds_one_hyperplane(A):
    C = cone([list(f.coeffs) + [1] for f in A.forms], A.names)
    assert len(C) == len(A) + 1 and C.nvars == A.nvars + 1


@given(arrangements(l=4, min_n=2, max_n=6), st.data())
def test_flat_prime_ideal_independent_of_choice(A, data):
    X = data.draw(st.sampled_from(A.flats()))
    if X.rank == 0:
        return
    I = A.flat_prime_ideal(X)
    forms = [A.forms[i] for i in X.indices]
    perm = data.draw(st.permutations(range(len(forms))))
    chosen = []
    for i in perm:
        if rank([forms[j].coeffs for j in chosen + [i]]) == len(chosen) + 1:
            chosen.append(i)
    assert Ideal([forms[i].poly(A.ring) for i in chosen], A.ring) == I


@given(arrangements(l=3, min_n=1, max_n=6), st.data())
def test_restriction_size_independent_of_basis(A, data):
    # restrict after a random change of coordinates: |A^H| does not move
    import sympy

    M = data.draw(st.lists(st.lists(st.integers(-2, 2), min_size=3, max_size=3), min_size=3, max_size=3)
                  .filter(lambda m: sympy.Matrix(m).det() != 0))
    h = data.draw(st.integers(0, len(A) - 1))
    B = A.transformed(M)
    assert len(B.restriction(h)) == len(A.restriction(h))
    assert len(A.restriction(h)) == sum(h in X.indices for X in A.flats(2))
