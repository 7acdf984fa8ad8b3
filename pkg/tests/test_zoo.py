import pytest

from mfrf import linalg, zoo
from mfrf.elo import apply_matrix
from mfrf.classify import schmidt_number, slocc_equivalent
from mfrf.exactnum import ONE, ZERO, as_exact, root_of_unity
from mfrf.state import from_terms


def ket(dims, *labels):
    return from_terms(dims, [(tuple(int(c) for c in s), ONE) for s in labels])


def test_ghz_examples():
    assert zoo.ghz(3, 2) == ket((2, 2, 2), "000", "111")
    assert zoo.ghz(3, 3) == ket((3, 3, 3), "000", "111", "222")
    g = zoo.ghz(2, 2)
    assert g == ket((2, 2), "00", "11") and schmidt_number(g, [1]) == 2


def test_w_examples():
    assert zoo.w(3) == ket((2, 2, 2), "100", "010", "001")
    assert zoo.w(4) == ket((2,) * 4, "1000", "0100", "0010", "0001")
    for n in range(3, 7):
        assert linalg.rank(zoo.w(n).unfold(1)) == 2
    with pytest.raises(ValueError):
        zoo.w(2)


def test_lme_examples():
    s = zoo.lme_elementary(3, as_exact(-1))
    assert s[(1, 1, 1)] == as_exact(-1) and s[(0, 1, 1)] == ONE
    assert zoo.lme_elementary(5, ONE).site_ranks() == (1,) * 5
    v = slocc_equivalent(zoo.lme_elementary(4, root_of_unity(4, 1)), zoo.ghz(4))
    assert v.equivalent
    with pytest.raises(ValueError):
        zoo.lme_elementary(3, ZERO)


def test_named_states_match_printed_matrices():
    assert zoo.hypergraph_named("MU") == ket((2,) * 4, "0000", "1100", "1111")
    assert zoo.hypergraph_named("V4") == ket((2,) * 4, "0000", "0001", "0010", "1111")
    assert zoo.hypergraph_named("V1") == ket((2,) * 4, "0000", "0001", "1100", "1111")
    v18 = zoo.hypergraph_named("V18").unfold(1)
    m = as_exact(-1)
    # printed as 4x4 with rows (i1 i2), columns (i3 i4)
    rows = zoo.hypergraph_named("V18").cut_matrix([1, 2])
    assert rows[3] == [m, m, m, ONE] and all(x == ONE for r in rows[:3] for x in r)
    assert len(v18) == 2
    w = root_of_unity(3, 1)
    h3 = zoo.hypergraph_named("H3_QUTRIT").unfold(1)
    assert h3[1][4] == w and h3[1][5] == w * w and h3[2][7] == w
    i = root_of_unity(4, 1)
    h4 = zoo.hypergraph_named("H4_QUQUART").unfold(1)
    assert h4[1][5:8] == [i, i * i, i ** 3]
    assert h4[3][12:16] == [ONE, i, i * i, i ** 3]
    with pytest.raises(KeyError):
        zoo.hypergraph_named("V2")


def test_hankel_examples():
    s = zoo.hankel_state(3, 2, [1, 1, 0, 0])
    assert s == ket((2, 2, 2), "000", "100", "010", "001")
    c0, c1 = as_exact(2), as_exact(3)
    q = zoo.hankel_state(3, 3, [c0, c1, 1, 0, 0, 0, 0])
    assert q[(0, 0, 0)] == c0 and q[(1, 0, 0)] == c1 and q[(1, 1, 0)] == ONE and q[(1, 1, 1)] == ZERO
    geo = zoo.hankel_state(3, 2, [as_exact(5) ** k for k in range(4)])
    assert linalg.rank(geo.unfold(1)) == 1
    with pytest.raises(zoo.LengthMismatch):
        zoo.hankel_state(3, 2, [1, 2])


def test_hankel_is_site_symmetric():
    s = zoo.hankel_state(3, 3, [1, 2, 3, 4, 5, 6, 7])
    from itertools import permutations, product

    for idx in product(range(3), repeat=3):
        for p in permutations(idx):
            assert s[idx] == s[p]


@pytest.mark.parametrize("d", [2, 3, 4])
def test_fourier_unitary(d):
    f = zoo.fourier_matrix(d)
    fh = [[f[j][i].conjugate() for j in range(d)] for i in range(d)]
    assert linalg.is_identity(linalg.matmul(f, fh))


def test_fourier_columns():
    f2 = zoo.fourier_matrix(2)
    h = f2[0][0]
    assert h * h == as_exact("1/2") and f2[1][1] == -h
    f3 = zoo.fourier_matrix(3)
    w = root_of_unity(3, 1)
    col = [f3[m][1] for m in range(3)]
    assert col[1] == w * col[0] and col[2] == w * w * col[0]
    assert col[0] * col[0] == as_exact("1/3")
    f4 = zoo.fourier_matrix(4)
    assert [f4[m][2] for m in range(4)] == [as_exact("1/2"), as_exact("-1/2"), as_exact("1/2"), as_exact("-1/2")]


def test_fourier_unrepresentable():
    with pytest.raises(zoo.UnrepresentableScale):
        zoo.fourier_matrix(257)


def test_inverse_fourier_maps_qutrit_hypergraph_to_standard_basis():
    s, _ = apply_matrix(zoo.hypergraph_named("H3_QUTRIT"), 1, linalg.inverse(zoo.fourier_matrix(3)))
    expected = ket((3, 3, 3), "000", "001", "002", "010", "020", "111", "122", "212", "221")
    assert s.equal_up_to_global_scale(expected)
