import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rs_snc.gf import GF, Matrix, solve_determined, vandermonde

F16 = GF(16)
F256 = GF(256)


def test_rejects_bad_field_sizes():
    for q in (0, 1, 3, 12, 512, 1024):
        with pytest.raises(ValueError):
            GF(q)


def test_every_supported_size_builds():
    for m in range(1, 9):
        f = GF(1 << m)
        assert f.q == 1 << m


def test_add_is_self_inverse():
    for x in range(256):
        assert F256.add(x, x) == 0


def test_multiplicative_identity():
    for x in range(256):
        assert F256.mul(1, x) == x


def test_inverses_exhaustive_gf16():
    for x in range(1, 16):
        assert F16.mul(F16.inv(x), x) == 1


def test_inverses_exhaustive_gf256():
    for x in range(1, 256):
        assert F256.mul(F256.inv(x), x) == 1


def test_field_axioms_exhaustive_gf16():
    for a in range(16):
        for b in range(16):
            assert F16.mul(a, b) == F16.mul(b, a)
            for c in range(16):
                assert F16.mul(F16.mul(a, b), c) == F16.mul(a, F16.mul(b, c))
                assert F16.mul(a, F16.add(b, c)) == F16.add(
                    F16.mul(a, b), F16.mul(a, c)
                )


@given(st.integers(0, 255), st.integers(0, 255), st.integers(0, 255))
def test_field_axioms_sampled_gf256(a, b, c):
    assert F256.mul(a, b) == F256.mul(b, a)
    assert F256.mul(F256.mul(a, b), c) == F256.mul(a, F256.mul(b, c))
    assert F256.mul(a, F256.add(b, c)) == F256.add(F256.mul(a, b), F256.mul(a, c))


def test_field_axioms_exhaustive_gf256_via_tables():
    # all 2^24 triples at once through table algebra
    import numpy as np

    x = np.arange(256)
    table = np.array(
        [[F256.mul(a, b) for b in range(256)] for a in range(256)], dtype=np.int16
    )
    assert (table == table.T).all()
    lhs = table[table[:, :, None], x[None, None, :]]
    rhs = table[x[:, None, None], table[None, :, :]]
    assert (lhs == rhs).all()
    bxc = np.bitwise_xor.outer(x, x)
    dist_lhs = table[x[:, None, None], bxc[None, :, :]]
    dist_rhs = table[:, :, None] ^ table[:, None, :]
    assert (dist_lhs == dist_rhs).all()


@given(st.integers(0, 255), st.integers(1, 255))
def test_div_is_mul_by_inverse(a, b):
    assert F256.div(a, b) == F256.mul(a, F256.inv(b))


def test_division_by_zero_raises():
    with pytest.raises(ZeroDivisionError):
        F16.inv(0)
    with pytest.raises(ZeroDivisionError):
        F16.div(3, 0)


def test_pow_matches_repeated_multiplication():
    for a in range(16):
        acc = 1
        for e in range(8):
            assert F16.pow(a, e) == acc
            acc = F16.mul(acc, a)


def test_vandermonde_single_point():
    assert vandermonde(F16, [1], 1).data == [[1]]


def test_vandermonde_alpha_powers():
    v = vandermonde(F16, [2, 4], 2)
    assert v.data == [[1, 1], [2, 4]]
    det = F16.add(
        F16.mul(v.data[0][0], v.data[1][1]), F16.mul(v.data[0][1], v.data[1][0])
    )
    assert det != 0


def test_vandermonde_rejects_bad_points():
    with pytest.raises(ValueError):
        vandermonde(F16, [0, 2], 2)
    with pytest.raises(ValueError):
        vandermonde(F16, [3, 3], 2)
    with pytest.raises(ValueError):
        vandermonde(F16, [2], 0)
    with pytest.raises(ValueError):
        vandermonde(F16, [77], 2)


def test_vandermonde_square_selections_full_rank():
    # every k columns of a k-row Vandermonde over distinct nonzero points
    for k in range(1, 5):
        for pts in itertools.combinations(range(1, 16), k):
            assert vandermonde(F16, list(pts), k).rank() == k


def test_solve_identity():
    ident = Matrix.identity(F16, 4)
    assert ident.solve([5, 0, 9, 1]) == [5, 0, 9, 1]


def test_solve_zero_matrix_is_singular():
    assert Matrix.zeros(F16, 3, 3).solve([1, 2, 3]) is None
    assert Matrix.zeros(F16, 1, 1).solve([1]) is None


def test_solve_shape_checks():
    with pytest.raises(ValueError):
        Matrix.zeros(F16, 2, 3).solve([1, 2])
    with pytest.raises(ValueError):
        Matrix.identity(F16, 3).solve([1, 2])


def _mat_vec(m: Matrix, x: list[int]) -> list[int]:
    f = m.field
    out = []
    for row in m.data:
        acc = 0
        for a, b in zip(row, x):
            acc ^= f.mul(a, b)
        out.append(acc)
    return out


@settings(max_examples=60)
@given(st.lists(st.integers(0, 15), min_size=9, max_size=9), st.lists(st.integers(0, 15), min_size=3, max_size=3))
def test_solve_round_trip(entries, b):
    m = Matrix(F16, [entries[0:3], entries[3:6], entries[6:9]])
    x = m.solve(b)
    if x is None:
        assert m.rank() < 3
    else:
        assert _mat_vec(m, x) == b


def test_matmul_against_identity_and_shapes():
    m = Matrix(F16, [[1, 2], [3, 4], [5, 6]])
    assert (Matrix.identity(F16, 3) @ m).data == m.data
    assert (m @ Matrix.identity(F16, 2)).data == m.data
    with pytest.raises(ValueError):
        m @ m


def test_row_vector_product_matches_transpose_solve_view():
    m = Matrix(F16, [[1, 2, 3], [4, 5, 6]])
    v = m.mul_row_vector([7, 9])
    expect = _mat_vec(m.transpose(), [7, 9])
    assert v == expect


def test_solve_determined_reports_pinned_variables_only():
    f = F16
    # x0 fully pinned by two equations, x1 free
    rows = [[1, 0], [2, 0]]
    got = solve_determined(f, rows, [5, 10])
    assert got == {0: 5}
    # inconsistent rows yield nothing
    assert solve_determined(f, [[1, 0], [1, 0]], [1, 2]) == {}
