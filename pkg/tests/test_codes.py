"""Tests for double circulant construction, self-duality and the shadow."""

import pytest

from dcsd.core.codebook import decode_octal
from dcsd.core.codes import (
    CirculantSpec,
    CodeKind,
    LinearCode,
    Parity,
    build_bordered,
    build_pure,
    circulant_self_orthogonality,
    doubly_even_subcode,
    extend,
    intersection_dimension,
    is_self_dual,
    parity_class,
    shadow,
    subcode_orthogonal_to,
)
from dcsd.core.errors import ContractViolation, DegenerateExtension, InvalidSpec
from dcsd.core.gf2 import BitVector


def test_pure_and_bordered_lengths(golay, hamming):
    assert (hamming.length, hamming.dimension) == (8, 4)
    assert (golay.length, golay.dimension) == (24, 12)
    assert hamming.structural_sets == ((0, 1, 2, 3), (4, 5, 6, 7))


def test_bordered_needs_odd_half_size():
    with pytest.raises(InvalidSpec):
        CirculantSpec(CodeKind.BORDERED, BitVector.from_string("1100"))


def test_known_codes_are_self_dual(golay, hamming, b12, i2_4):
    for code in (golay, hamming, b12, i2_4):
        assert is_self_dual(code)


def test_parity_classes(golay, hamming, b12, i2_4):
    assert parity_class(golay) is Parity.DOUBLY_EVEN
    assert parity_class(hamming) is Parity.DOUBLY_EVEN
    assert parity_class(b12) is Parity.SINGLY_EVEN
    assert parity_class(i2_4) is Parity.SINGLY_EVEN


def test_parity_class_rejects_codes_that_are_not_self_dual():
    code = CirculantSpec(CodeKind.PURE, BitVector.from_string("1100")).build()
    assert not is_self_dual(code)
    with pytest.raises(ContractViolation):
        parity_class(code)


def test_polynomial_test_agrees_with_the_gram_matrix():
    """circulant_self_orthogonality decides exactly what G G^T = 0 decides."""
    for n in range(1, 10):
        for value in range(1 << n):
            r = BitVector(n, value)
            expected = is_self_dual(CirculantSpec(CodeKind.PURE, r).build())
            assert circulant_self_orthogonality(CodeKind.PURE, r) == expected
            if n % 2:
                expected = is_self_dual(CirculantSpec(CodeKind.BORDERED, r).build())
                assert circulant_self_orthogonality(CodeKind.BORDERED, r) == expected


def test_published_rows_build_self_dual_codes():
    pure = CirculantSpec(CodeKind.PURE, decode_octal("5532465545470000", 48)).build()
    assert pure.length == 96 and is_self_dual(pure)
    assert parity_class(pure) is Parity.SINGLY_EVEN

    bordered = CirculantSpec(CodeKind.BORDERED, decode_octal("045722771307000", 45)).build()
    assert bordered.length == 92 and is_self_dual(bordered)
    assert parity_class(bordered) is Parity.SINGLY_EVEN


def test_dual_of_a_self_dual_code_is_itself(hamming, b12):
    assert hamming.dual() == hamming
    assert b12.dual() == b12


def test_permuted_code_membership(hamming):
    perm = (1, 0, 2, 3, 4, 5, 6, 7)
    image = hamming.permuted(perm)
    for c in hamming.codewords():
        moved = BitVector.from_bits(c[perm.index(i)] for i in range(8))
        assert image.contains(moved)


def test_doubly_even_subcode_has_codimension_one(b12):
    code_0 = doubly_even_subcode(b12)
    assert code_0.dimension == b12.dimension - 1
    assert all(c.weight % 4 == 0 for c in code_0.codewords())


def test_shadow_representatives_satisfy_the_shadow_condition(b12, i2_4):
    """u is in the shadow iff u.g = wt(g)/2 mod 2 for every generator row g."""
    for code in (b12, i2_4):
        profile = shadow(code)
        for rep in profile.coset_reps:
            assert not code.contains(rep)
            for g in code.construction:
                assert rep.dot(g) == (g.weight // 2) % 2


def test_shadow_of_doubly_even_code_is_rejected(hamming):
    with pytest.raises(ContractViolation):
        shadow(hamming)


def test_subcode_and_extension(hamming):
    x = BitVector.from_string("11000000")
    code_0 = subcode_orthogonal_to(hamming, x)
    assert code_0.dimension == 3
    assert all(c.dot(x) == 0 for c in code_0.codewords())
    joined = extend(code_0, x)
    assert joined.dimension == 4
    assert intersection_dimension(joined, hamming) == 3


def test_extending_by_a_codeword_is_degenerate(hamming):
    with pytest.raises(DegenerateExtension):
        extend(hamming, hamming.generator.row(0))


def test_linear_code_equality_ignores_construction_rows():
    a = LinearCode.from_vectors([BitVector.from_string("1100"), BitVector.from_string("0011")])
    b = LinearCode.from_vectors([BitVector.from_string("1111"), BitVector.from_string("0011")])
    assert a == b


def test_builders_follow_the_construction():
    pure = build_pure(CirculantSpec(CodeKind.PURE, BitVector.from_string("1110")))
    first = next(iter(pure.construction))
    assert str(first) == "10001110"

    bordered = build_bordered(CirculantSpec(CodeKind.BORDERED, BitVector.from_string("11011100010")))
    rows = list(bordered.construction)
    assert str(rows[0]) == "1" + "0" * 11 + "0" + "1" * 11
    assert str(rows[1])[12:] == "1" + "11011100010"

    with pytest.raises(InvalidSpec):
        build_bordered(CirculantSpec(CodeKind.PURE, BitVector.from_string("1110")))
