"""Character computation, Gelfand transforms, radicals, quotients."""

import numpy as np
import pytest

import shilov as sh
from conftest import PRESET_CHARACTER_COUNTS, PRESET_NAMES, conjugated_algebra


def _values_multiset(chars):
    return sorted(
        tuple((round(z.real, 6), round(z.imag, 6)) for z in c.values) for c in chars
    )


def test_dual_numbers_single_character():
    E = sh.preset_algebra("dual_numbers")
    chars = sh.characters(E)
    # hand derivation: chi(eps)^2 = chi(eps^2) = 0 forces chi(eps) = 0
    assert len(chars) == 1
    assert np.allclose(chars[0].values, [1.0, 0.0], atol=1e-9)


def test_cyclic_two_characters():
    E = sh.preset_algebra("cyclic_group_2")
    chars = sh.characters(E)
    # chi(g)^2 = chi(1) = 1, so chi(g) = +-1
    assert _values_multiset(chars) == [
        ((1.0, 0.0), (-1.0, 0.0)),
        ((1.0, 0.0), (1.0, 0.0)),
    ]


def test_cyclic_three_roots_of_unity():
    E = sh.preset_algebra("cyclic_group_3")
    chars = sh.characters(E)
    assert len(chars) == 3
    roots = sorted(np.angle(c.values[1]) for c in chars)
    expected = sorted(np.angle(np.exp(2j * np.pi * np.arange(3) / 3)))
    assert np.allclose(roots, expected, atol=1e-8)


def test_character_counts_match_presets(preset):
    chars = sh.characters(preset)
    assert len(chars) == PRESET_CHARACTER_COUNTS[preset.label]


def test_gelfand_transform_values():
    E = sh.preset_algebra("dual_numbers")
    chars = sh.characters(E)
    assert np.allclose(sh.gelfand_transform(E, E.element([3, 5]), chars), [3.0])
    assert np.allclose(sh.gelfand_transform(E, E.one(), chars), [1.0])

    Z2 = sh.preset_algebra("cyclic_group_2")
    values = sh.gelfand_transform(Z2, Z2.element([1, 1]), sh.characters(Z2))
    assert sorted(np.abs(values)) == pytest.approx([0.0, 2.0], abs=1e-9)


def test_gelfand_norm():
    E = sh.preset_algebra("dual_numbers")
    chars = sh.characters(E)
    assert sh.gelfand_norm(E, E.one(), chars) == pytest.approx(1.0)
    assert sh.gelfand_norm(E, E.basis_element(1), chars) == pytest.approx(0.0, abs=1e-12)
    Z2 = sh.preset_algebra("cyclic_group_2")
    assert sh.gelfand_norm(Z2, Z2.element([1, 1])) == pytest.approx(2.0)


def test_gelfand_norm_below_norm_random(preset):
    rng = np.random.default_rng(2)
    chars = sh.characters(preset)
    for _ in range(50):
        a = preset.element(
            rng.standard_normal(preset.dim) + 1j * rng.standard_normal(preset.dim)
        )
        assert sh.gelfand_norm(preset, a, chars) <= sh.norm(preset, a) + 1e-9


def test_semisimple_quotient_shapes():
    P2 = sh.preset_algebra("pointwise_2")
    quotient, proj = sh.semisimple_quotient(P2)
    assert quotient.dim == 2
    assert np.linalg.matrix_rank(proj) == 2

    E = sh.preset_algebra("dual_numbers")
    quotient, proj = sh.semisimple_quotient(E)
    assert quotient.dim == 1
    assert np.allclose(proj @ np.array([2.0, 5.0]), [2.0])  # a + b eps -> a

    T = sh.preset_algebra("truncated_poly_3")
    quotient, proj = sh.semisimple_quotient(T)
    assert quotient.dim == 1
    assert np.allclose(proj @ np.array([4.0, 1.0, 2.0]), [4.0])  # p -> p(0)


def test_quotient_projection_is_homomorphism(preset):
    rng = np.random.default_rng(9)
    chars = sh.characters(preset)
    quotient, proj = sh.semisimple_quotient(preset, chars)
    for _ in range(25):
        a = preset.element(
            rng.standard_normal(preset.dim) + 1j * rng.standard_normal(preset.dim)
        )
        b = preset.element(
            rng.standard_normal(preset.dim) + 1j * rng.standard_normal(preset.dim)
        )
        left = proj @ (a * b).coords
        right = (proj @ a.coords) * (proj @ b.coords)  # pointwise in the quotient
        assert np.max(np.abs(left - right)) < 1e-8
    # kernel of the projection is the radical
    for r in sh.radical(preset, chars):
        assert np.max(np.abs(proj @ r.coords)) < 1e-8


def test_verify_character_examples():
    E = sh.preset_algebra("dual_numbers")
    good = sh.Character([1.0, 0.0], E)
    assert sh.verify_character(E, good).passed

    bad = sh.Character([1.0, 1.0], E)
    report = sh.verify_character(E, bad)
    assert not report.check("multiplicative").passed

    zero = sh.Character([0.0, 0.0], E)
    assert not sh.verify_character(E, zero).check("unital").passed


def test_rank_identity_presets_and_random(preset):
    rng = np.random.default_rng(31)
    chars = sh.characters(preset)
    rad = sh.radical(preset, chars)
    assert len(chars) + len(rad) == preset.dim
    for trial in range(3):
        twisted = conjugated_algebra(rng, preset)
        assert sh.validate_algebra(twisted).passed
        tchars = sh.characters(twisted)
        trad = sh.radical(twisted, tchars)
        assert len(tchars) == len(chars)
        assert len(tchars) + len(trad) == preset.dim


def test_homomorphism_property(preset):
    rng = np.random.default_rng(13)
    chars = sh.characters(preset)
    for _ in range(30):
        a = preset.element(
            rng.standard_normal(preset.dim) + 1j * rng.standard_normal(preset.dim)
        )
        b = preset.element(
            rng.standard_normal(preset.dim) + 1j * rng.standard_normal(preset.dim)
        )
        lhs = sh.gelfand_transform(preset, a * b, chars)
        rhs = sh.gelfand_transform(preset, a, chars) * sh.gelfand_transform(
            preset, b, chars
        )
        assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_characters_kill_radical(preset):
    chars = sh.characters(preset)
    for r in sh.radical(preset, chars):
        for chi in chars:
            assert abs(chi(r)) < 1e-8


def test_seed_independence(preset):
    reference = _values_multiset(sh.characters(preset, seed=0))
    for seed in range(1, 6):
        again = _values_multiset(sh.characters(preset, seed=seed))
        assert len(again) == len(reference)
        for a, b in zip(again, reference):
            assert np.max(np.abs(np.asarray(a) - np.asarray(b))) < 1e-6


def test_invalid_algebra_rejected():
    c = np.zeros((2, 2, 2), dtype=complex)
    c[0, 0, 0] = 1.0
    c[0, 1, 1] = 1.0
    c[1, 0, 1] = 0.5
    E = sh.AlgebraSpec(2, c, [1, 0], [1, 1], "broken")
    with pytest.raises(ValueError):
        sh.characters(E)
