import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcmc.pauli import (
    BasisState,
    PauliError,
    PauliString,
    PauliSum,
    apply_to_basis,
    multiply,
    multiply_all,
    to_matrix,
)


@st.composite
def pauli_strings(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    x = draw(st.integers(0, 2**n - 1))
    z = draw(st.integers(0, 2**n - 1))
    ph = draw(st.integers(0, 3))
    return PauliString(n, x, z, ph)


@st.composite
def pauli_pairs(draw, max_n=6):
    n = draw(st.integers(1, max_n))
    ps = []
    for _ in range(2):
        x = draw(st.integers(0, 2**n - 1))
        z = draw(st.integers(0, 2**n - 1))
        ph = draw(st.integers(0, 3))
        ps.append(PauliString(n, x, z, ph))
    return ps


class TestMultiply:
    def test_involution(self):
        x = PauliString.from_label("X")
        assert multiply(x, x) == PauliString.identity(1)

    def test_x_times_z_is_minus_i_y(self):
        x = PauliString.from_label("X")
        z = PauliString.from_label("Z")
        r = multiply(x, z)
        assert r.label() == "-iY"
        assert r.phase_exp == 3

    def test_two_qubit_product(self):
        # oracle: 4x4 dense matrix product
        p = PauliString.from_label("XZ")
        q = PauliString.from_label("YY")
        r = multiply(p, q)
        assert r.label() == "ZX"
        assert r.phase_exp == 0
        np.testing.assert_array_equal(to_matrix(r), to_matrix(p) @ to_matrix(q))

    def test_dimension_mismatch(self):
        with pytest.raises(PauliError):
            multiply(PauliString.from_label("X"), PauliString.from_label("XX"))

    @given(pauli_pairs())
    @settings(max_examples=300)
    def test_matrix_roundtrip(self, pair):
        p, q = pair
        lhs = to_matrix(multiply(p, q))
        rhs = to_matrix(p) @ to_matrix(q)
        np.testing.assert_array_equal(lhs, rhs)

    @given(pauli_strings())
    def test_self_product_is_identity_up_to_sign(self, p):
        r = multiply(p, p)
        assert r.x == 0 and r.z == 0
        assert r.phase_exp in (0, 2)

    def test_multiply_all(self):
        ps = [PauliString.from_label(s) for s in ("XI", "ZZ", "IY")]
        expected = multiply(multiply(ps[0], ps[1]), ps[2])
        assert multiply_all(ps) == expected


class TestApplyToBasis:
    def test_z_on_zero(self):
        ph, s = apply_to_basis(PauliString.from_label("Z"), BasisState.from_string("0"))
        assert ph == 1 and s.to_string() == "0"

    def test_x_on_zero(self):
        ph, s = apply_to_basis(PauliString.from_label("X"), BasisState.from_string("0"))
        assert ph == 1 and s.to_string() == "1"

    def test_y_on_one(self):
        # oracle: Y @ |1> = -i |0>
        ph, s = apply_to_basis(PauliString.from_label("Y"), BasisState.from_string("1"))
        assert ph == -1j and s.to_string() == "0"

    @given(pauli_strings(), st.data())
    @settings(max_examples=1000)
    def test_agrees_with_matrix(self, p, data):
        bits = data.draw(st.integers(0, 2**p.n - 1))
        s = BasisState(p.n, bits)
        ph, s2 = apply_to_basis(p, s)
        assert abs(ph) == 1.0
        expected = to_matrix(p) @ s.to_vector()
        np.testing.assert_allclose(ph * s2.to_vector(), expected, atol=0)

    @given(pauli_strings(), st.data())
    def test_twice_returns_original_up_to_sign(self, p, data):
        bits = data.draw(st.integers(0, 2**p.n - 1))
        s0 = BasisState(p.n, bits)
        ph1, s1 = apply_to_basis(p, s0)
        ph2, s2 = apply_to_basis(p, s1)
        assert s2 == s0
        assert ph1 * ph2 in (1, -1) or abs(abs(ph1 * ph2) - 1) == 0


class TestXString:
    def test_z_is_all_zero(self):
        assert PauliString.from_label("Z").x_string() == (0,)

    def test_xx(self):
        assert PauliString.from_label("XX").x_string() == (1, 1)

    def test_mixed(self):
        p = PauliString.from_label("YXYI")
        assert p.x_string() == (1, 1, 1, 0)
        # cross-check against the matrix support pattern: X-component flips bits
        m = to_matrix(p)
        flip = int("".join(map(str, p.x_string())), 2)
        col = np.flatnonzero(m[:, 0])
        assert list(col) == [flip]


class TestToMatrix:
    def test_identity(self):
        np.testing.assert_array_equal(
            to_matrix(PauliString.identity(1)), np.eye(2, dtype=complex)
        )

    def test_y(self):
        np.testing.assert_array_equal(
            to_matrix(PauliString.from_label("Y")),
            np.array([[0, -1j], [1j, 0]]),
        )

    def test_xz_kron(self):
        p = PauliString.from_label("XZ")
        x = np.array([[0, 1], [1, 0]], dtype=complex)
        z = np.array([[1, 0], [0, -1]], dtype=complex)
        np.testing.assert_array_equal(to_matrix(p), np.kron(x, z))

    def test_size_cap(self):
        with pytest.raises(PauliError):
            to_matrix(PauliString.identity(13))


class TestLabels:
    @given(pauli_strings())
    def test_roundtrip(self, p):
        assert PauliString.from_label(p.label()) == p

    def test_prefixes(self):
        assert PauliString.from_label("-iY").phase_exp == 3
        assert PauliString.from_label("+iX").phase_exp == 1
        assert PauliString.from_label("-Z").phase_exp == 2
        assert PauliString.from_label("XIZY").phase_exp == 0

    def test_single(self):
        assert PauliString.single(4, 3, "Z").label() == "IIZI"

    def test_bad_literals(self):
        for bad in ("", "Q", "iX", "+-X"):
            with pytest.raises(PauliError):
                PauliString.from_label(bad)


class TestPauliSum:
    def test_canonicalizes_keys(self):
        s = PauliSum(1)
        s.add(2.0, PauliString.from_label("-iY"))
        (p, c), = list(s)
        assert p.phase_exp == 0
        assert c == -2j

    def test_combines_like_terms(self):
        s = PauliSum(1)
        s.add(1.0, PauliString.from_label("X"))
        s.add(-1.0, PauliString.from_label("X"))
        assert len(s.prune()) == 0

    def test_matmul_matches_dense(self):
        rng = np.random.default_rng(7)
        a = PauliSum(2)
        b = PauliSum(2)
        for _ in range(4):
            a.add(complex(rng.normal(), rng.normal()),
                  PauliString(2, int(rng.integers(4)), int(rng.integers(4))))
            b.add(complex(rng.normal(), rng.normal()),
                  PauliString(2, int(rng.integers(4)), int(rng.integers(4))))
        np.testing.assert_allclose(
            (a @ b).to_matrix(), a.to_matrix() @ b.to_matrix(), atol=1e-12
        )

    def test_adjoint(self):
        s = PauliSum(1)
        s.add(1 + 2j, PauliString.from_label("X"))
        np.testing.assert_allclose(
            s.adjoint().to_matrix(), s.to_matrix().conj().T, atol=0
        )

    def test_hermitian_flag(self):
        s = PauliSum(1)
        s.add(1.5, PauliString.from_label("Z"))
        assert s.is_hermitian()
        s.add(1j, PauliString.from_label("X"))
        assert not s.is_hermitian()


class TestBasisState:
    def test_string_roundtrip(self):
        s = BasisState.from_string("0110")
        assert s.to_string() == "0110"
        assert s.bit(1) == 0 and s.bit(2) == 1

    def test_index_qubit1_most_significant(self):
        assert BasisState.from_string("10").index() == 2
        assert BasisState.from_string("01").index() == 1

    def test_vector(self):
        v = BasisState.from_string("01").to_vector()
        np.testing.assert_array_equal(v, [0, 1, 0, 0])
