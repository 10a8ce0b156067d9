"""Tests for enumerator families: prediction, fitting and extremal bounds."""

import random

import pytest

from dcsd.core.codes import Parity
from dcsd.core.enumerators import (
    EnumeratorFamily,
    EnumeratorParams,
    PARAMETER_NAMES,
    counting_plan,
    displayed_weights,
    extremal_d,
    family_for,
    fit,
    is_admissible,
    predict,
    predict_shadow,
)
from dcsd.core.errors import (
    AmbiguousEnumerator,
    ContractViolation,
    InconsistentProfile,
    UnsupportedCoefficient,
    UnsupportedLength,
)


def _predicted(params):
    code_weights, shadow_weights = displayed_weights(params.family)
    code = {w: predict(params, w) for w in code_weights}
    shadow = {w: predict_shadow(params, w) for w in shadow_weights}
    return code, shadow


def test_token_round_trip():
    params = EnumeratorParams(EnumeratorFamily.LEN90, (-12555, 0, 0, 0, 0))
    assert params.to_token() == "len90:-12555,0,0,0,0"
    assert EnumeratorParams.from_token(params.to_token()) == params
    assert params["a"] == -12555


def test_bad_tokens_are_contract_violations():
    for token in ("len90:1,2", "len93:1", "len92:4,0,0", "len96_doubly_even:x"):
        with pytest.raises(ContractViolation):
            EnumeratorParams.from_token(token)


def test_len90_series_values():
    params = EnumeratorParams(EnumeratorFamily.LEN90, (-12555, 0, 0, 0, 0))
    assert predict(params, 14) == 1485
    assert predict(params, 16) == 13635
    assert predict_shadow(params, 17) == 100440
    assert predict_shadow(params, 1) == 0
    assert is_admissible(params)


def test_fit_recovers_admissible_parameters():
    """Predicting every displayed coefficient and fitting them back is the identity."""
    rng = random.Random(2024)
    checked = 0
    for family in EnumeratorFamily:
        if family is EnumeratorFamily.LEN92:
            continue
        tries = 0
        while tries < 40:
            tries += 1
            if family is EnumeratorFamily.LEN96_DOUBLY_EVEN:
                values = (rng.randint(0, 20000),)
            elif family is EnumeratorFamily.LEN90:
                values = (rng.randint(-14040, 0), rng.randint(0, 200), 0, 0, 0)
            else:
                values = (rng.randint(5814, 20000), 0, 0, 0)
            params = EnumeratorParams(family, values)
            if not is_admissible(params):
                continue
            code, shadow = _predicted(params)
            assert fit(family, code, shadow) == params
            checked += 1
    assert checked > 0


def test_len92_form_three_fit():
    params = fit(EnumeratorFamily.LEN92, {16: 12060, 18: 106560})
    assert params.to_token() == "len92:3,0,1842"


def test_len92_forms_one_and_two_need_a20():
    counts = {16: 4692, 18: 174800 + 256}
    with pytest.raises(AmbiguousEnumerator) as excinfo:
        fit(EnumeratorFamily.LEN92, counts)
    assert {p["form"] for p in excinfo.value.candidates} == {1, 2}

    params = fit(EnumeratorFamily.LEN92, {**counts, 20: 2425488 - 2048})
    assert params.values == (1, 1, 0)


def test_len92_non_integral_beta_is_inconsistent():
    with pytest.raises(InconsistentProfile):
        fit(EnumeratorFamily.LEN92, {16: 4693, 18: 121296})


def test_extra_counts_must_agree_with_the_fit():
    params = EnumeratorParams(EnumeratorFamily.LEN96_DOUBLY_EVEN, (5,))
    code, _ = _predicted(params)
    code[20] += 1
    with pytest.raises(InconsistentProfile):
        fit(EnumeratorFamily.LEN96_DOUBLY_EVEN, code)


def test_out_of_range_doubly_even_parameter_is_rejected():
    with pytest.raises(InconsistentProfile):
        fit(EnumeratorFamily.LEN96_DOUBLY_EVEN, {16: 300000})


def test_missing_counts_are_reported():
    with pytest.raises(ContractViolation):
        fit(EnumeratorFamily.LEN90, {14: 1485}, {1: 0, 5: 0})


def test_unsupported_coefficients():
    len92 = EnumeratorParams(EnumeratorFamily.LEN92, (3, 0, 0))
    with pytest.raises(UnsupportedCoefficient):
        predict(len92, 22)
    with pytest.raises(UnsupportedCoefficient):
        predict_shadow(len92, 1)


def test_extremal_values():
    assert extremal_d(24, Parity.DOUBLY_EVEN) == 8
    assert extremal_d(96, Parity.DOUBLY_EVEN) == 20
    assert extremal_d(90, Parity.SINGLY_EVEN) == 16
    assert extremal_d(96, Parity.SINGLY_EVEN) == 18
    with pytest.raises(UnsupportedLength):
        extremal_d(58, Parity.SINGLY_EVEN)
    with pytest.raises(ContractViolation):
        extremal_d(91, Parity.SINGLY_EVEN)


def test_family_selection():
    assert family_for(90, Parity.SINGLY_EVEN, 14) is EnumeratorFamily.LEN90
    assert family_for(90, Parity.SINGLY_EVEN, 12) is None
    assert family_for(92, Parity.SINGLY_EVEN, 16) is EnumeratorFamily.LEN92
    assert family_for(96, Parity.SINGLY_EVEN, 16) is EnumeratorFamily.LEN96_SINGLY_EVEN
    assert family_for(96, Parity.DOUBLY_EVEN, 16) is EnumeratorFamily.LEN96_DOUBLY_EVEN
    assert family_for(24, Parity.DOUBLY_EVEN, 8) is None


def test_counting_plans_cover_the_fit_inputs():
    for family in EnumeratorFamily:
        plan = counting_plan(family, 16)
        code_weights, shadow_weights = displayed_weights(family)
        fitted_from = [w for w in code_weights if w <= 18]
        assert plan.code_radius >= min(fitted_from)
        if shadow_weights:
            assert plan.shadow_radius is not None
    assert counting_plan(None, 4).code_radius == 6


def test_parameter_names_are_complete():
    assert set(PARAMETER_NAMES) == set(EnumeratorFamily)
