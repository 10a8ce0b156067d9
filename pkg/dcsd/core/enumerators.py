"""
Weight enumerator families for self-dual codes of lengths 90, 92 and 96.

Handles:
- The published low-order coefficients of each family, kept as literal
  linear series in the family parameters
- Forward evaluation (predict, predict_shadow)
- Inverse fitting from exact code and shadow counts
- The extremal minimum weight table used as the search target
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from enum import Enum
from typing import Dict, List, Mapping, Optional, Tuple, Union

from dcsd.core.codes import Parity, ShadowProfile
from dcsd.core.errors import (
    AmbiguousEnumerator,
    ContractViolation,
    InconsistentProfile,
    UnsupportedCoefficient,
    UnsupportedLength,
)
from dcsd.core.weights import WeightProfile

logger = logging.getLogger(__name__)

# (constant, {parameter: coefficient})
Term = Tuple[int, Dict[str, int]]
Series = Dict[int, Term]
Counts = Union[WeightProfile, ShadowProfile, Mapping[int, int]]


class EnumeratorFamily(str, Enum):
    LEN90 = "len90"
    LEN92 = "len92"
    LEN96_SINGLY_EVEN = "len96_singly_even"
    LEN96_DOUBLY_EVEN = "len96_doubly_even"


PARAMETER_NAMES: Dict[EnumeratorFamily, Tuple[str, ...]] = {
    EnumeratorFamily.LEN90: ("a", "b", "c", "d", "e"),
    EnumeratorFamily.LEN92: ("form", "alpha", "beta"),
    EnumeratorFamily.LEN96_SINGLY_EVEN: ("a", "b", "c", "d"),
    EnumeratorFamily.LEN96_DOUBLY_EVEN: ("a",),
}

LEN96_DOUBLY_EVEN_MAX_A = 201066

_LEN90_CODE: Series = {
    0: (1, {}),
    14: (14040, {"a": 1}),
    16: (51300, {"a": 3, "b": 8}),
    18: (69920, {"a": -11, "b": -24, "c": 512}),
    20: (2355624, {"a": -41, "b": -80, "c": -4608, "d": 32768}),
    22: (30913560, {"a": 49, "b": 304, "c": 13824, "d": -491520, "e": -2097152}),
}
_LEN90_SHADOW: Series = {
    1: (0, {"e": 1}),
    5: (0, {"d": 1, "e": -22}),
    9: (0, {"c": -1, "d": -20, "e": 231}),
    13: (0, {"b": 1, "c": 18, "d": 190, "e": -1540}),
    17: (0, {"a": -8, "b": -16, "c": -153, "d": -1140, "e": 7315}),
}

_LEN92_CODE: Dict[int, Series] = {
    1: {
        0: (1, {}),
        16: (4692, {"beta": 4}),
        18: (174800, {"beta": -8, "alpha": 256}),
        20: (2425488, {"alpha": -2048, "beta": -52}),
    },
    2: {
        0: (1, {}),
        16: (4692, {"beta": 4}),
        18: (174800, {"beta": -8, "alpha": 256}),
        20: (2441872, {"alpha": -2048, "beta": -52}),
    },
    3: {
        0: (1, {}),
        16: (4692, {"beta": 4}),
        18: (121296, {"beta": -8}),
        20: (3213968, {"beta": -52}),
    },
}

_LEN96_SE_CODE: Series = {
    0: (1, {}),
    16: (-5814, {"a": 1}),
    18: (97280, {"b": 64}),
    20: (1694208, {"a": -16, "b": -384, "c": 4096}),
    22: (18969600, {"b": 192, "c": -49152, "d": -262144}),
    24: (184315200, {"a": 120, "b": 3328, "c": 237568, "d": 4718592}),
}
_LEN96_SE_SHADOW: Series = {
    4: (0, {"d": 1}),
    8: (0, {"c": 1, "d": -22}),
    12: (0, {"b": -1, "c": -20, "d": 231}),
    16: (0, {"a": 1, "b": 18, "c": 190, "d": -1540}),
    20: (3231744, {"a": -16, "b": -153, "c": -1140, "d": 7315}),
    24: (369664000, {"a": 120, "b": 816, "c": 4845, "d": -26334}),
}

_LEN96_DE_CODE: Series = {
    0: (1, {}),
    16: (0, {"a": 1}),
    20: (3217056, {"a": -16}),
    24: (369844880, {"a": 120}),
    28: (18642839520, {"a": -560}),
    32: (422069980215, {"a": 1820}),
}


@dataclass(frozen=True)
class EnumeratorParams:
    """Fitted parameters of one enumerator family."""

    family: EnumeratorFamily
    values: Tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "family", EnumeratorFamily(self.family))
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        names = PARAMETER_NAMES[self.family]
        if len(self.values) != len(names):
            raise ContractViolation(
                f"{self.family.value} takes parameters {names}, got {len(self.values)} values"
            )
        if self.family is EnumeratorFamily.LEN92 and self.values[0] not in (1, 2, 3):
            raise ContractViolation(f"len92 form must be 1, 2 or 3, got {self.values[0]}")

    @property
    def names(self) -> Tuple[str, ...]:
        return PARAMETER_NAMES[self.family]

    def as_dict(self) -> Dict[str, int]:
        return dict(zip(self.names, self.values))

    def __getitem__(self, name: str) -> int:
        try:
            return self.as_dict()[name]
        except KeyError:
            raise KeyError(f"{self.family.value} has no parameter {name!r}") from None

    def to_token(self) -> str:
        """Whitespace-free form used in record files: `len90:-12555,0,0,0,0`."""
        return f"{self.family.value}:{','.join(str(v) for v in self.values)}"

    @classmethod
    def from_token(cls, token: str) -> EnumeratorParams:
        family, _, rest = token.partition(":")
        try:
            values = tuple(int(v) for v in rest.split(",")) if rest else ()
            return cls(EnumeratorFamily(family), values)
        except ValueError as e:
            raise ContractViolation(f"bad enumerator token {token!r}: {e}") from None

    def __str__(self) -> str:
        inner = ", ".join(f"{k}={v}" for k, v in self.as_dict().items())
        return f"{self.family.value}({inner})"


def _code_series(params: EnumeratorParams) -> Series:
    family = params.family
    if family is EnumeratorFamily.LEN90:
        return _LEN90_CODE
    if family is EnumeratorFamily.LEN92:
        return _LEN92_CODE[params["form"]]
    if family is EnumeratorFamily.LEN96_SINGLY_EVEN:
        return _LEN96_SE_CODE
    return _LEN96_DE_CODE


def _shadow_series(family: EnumeratorFamily) -> Optional[Series]:
    if family is EnumeratorFamily.LEN90:
        return _LEN90_SHADOW
    if family is EnumeratorFamily.LEN96_SINGLY_EVEN:
        return _LEN96_SE_SHADOW
    return None


def _evaluate(term: Term, params: EnumeratorParams) -> int:
    constant, coefficients = term
    values = params.as_dict()
    return constant + sum(c * values[name] for name, c in coefficients.items())


def predict(params: EnumeratorParams, w: int) -> int:
    """Coefficient of y^w in the family's code series."""
    series = _code_series(params)
    if w not in series:
        raise UnsupportedCoefficient(
            f"{params.family.value} displays code weights {sorted(series)}, not {w}"
        )
    return _evaluate(series[w], params)


def predict_shadow(params: EnumeratorParams, w: int) -> int:
    """Coefficient of y^w in the family's shadow series."""
    series = _shadow_series(params.family)
    if series is None:
        raise UnsupportedCoefficient(f"{params.family.value} has no displayed shadow series")
    if w not in series:
        raise UnsupportedCoefficient(
            f"{params.family.value} displays shadow weights {sorted(series)}, not {w}"
        )
    return _evaluate(series[w], params)


def displayed_weights(family: EnumeratorFamily) -> Tuple[List[int], List[int]]:
    """(code weights, shadow weights) the family's series display, zero excluded."""
    if family is EnumeratorFamily.LEN92:
        code = sorted(_LEN92_CODE[1])
    else:
        code = sorted(_code_series(EnumeratorParams(family, (0,) * len(PARAMETER_NAMES[family]))))
    shadow = _shadow_series(family)
    return [w for w in code if w], sorted(shadow) if shadow else []


def is_admissible(params: EnumeratorParams) -> bool:
    """Nonnegativity of every displayed coefficient, plus the len96 doubly even range."""
    if params.family is EnumeratorFamily.LEN96_DOUBLY_EVEN:
        if not 0 <= params["a"] <= LEN96_DOUBLY_EVEN_MAX_A:
            return False
    code_weights, shadow_weights = displayed_weights(params.family)
    if any(predict(params, w) < 0 for w in code_weights):
        return False
    return all(predict_shadow(params, w) >= 0 for w in shadow_weights)


def _as_counts(counts: Optional[Counts]) -> Dict[int, int]:
    """Exact counts only: profiles contribute every weight inside their radius."""
    if counts is None:
        return {}
    if isinstance(counts, WeightProfile):
        return counts.exact_counts()
    if isinstance(counts, ShadowProfile):
        if counts.radius is None:
            return {}
        return {w: counts.counts.get(w, 0) for w in range(counts.radius + 1)}
    return {int(w): int(c) for w, c in counts.items()}


def _require(counts: Dict[int, int], w: int, what: str) -> int:
    if w not in counts:
        raise ContractViolation(f"fit needs the {what} count at weight {w}")
    return counts[w]


def mismatches(
    params: EnumeratorParams,
    code_counts: Optional[Counts] = None,
    shadow_counts: Optional[Counts] = None,
) -> List[Tuple[str, int, int, int]]:
    """Displayed coefficients that disagree with the supplied exact counts.

    Each entry is (series, weight, predicted, observed) with series "code" or "shadow".
    """
    found = []
    code = _as_counts(code_counts)
    for w in displayed_weights(params.family)[0]:
        if w in code and code[w] != predict(params, w):
            found.append(("code", w, predict(params, w), code[w]))
    shadow = _as_counts(shadow_counts)
    for w in displayed_weights(params.family)[1]:
        if w in shadow and shadow[w] != predict_shadow(params, w):
            found.append(("shadow", w, predict_shadow(params, w), shadow[w]))
    return found


def _exact_div(numerator: int, denominator: int, what: str) -> int:
    q, r = divmod(numerator, denominator)
    if r:
        raise InconsistentProfile(f"{what} = {numerator}/{denominator} is not an integer")
    return q


def _fit_len90(code: Dict[int, int], shadow: Dict[int, int]) -> EnumeratorParams:
    e = _require(shadow, 1, "shadow")
    d = _require(shadow, 5, "shadow") + 22 * e
    c = -_require(shadow, 9, "shadow") - 20 * d + 231 * e
    b = _require(shadow, 13, "shadow") - 18 * c - 190 * d + 1540 * e
    a = _require(code, 14, "code") - 14040
    return EnumeratorParams(EnumeratorFamily.LEN90, (a, b, c, d, e))


def _fit_len96_singly_even(code: Dict[int, int], shadow: Dict[int, int]) -> EnumeratorParams:
    d = _require(shadow, 4, "shadow")
    c = _require(shadow, 8, "shadow") + 22 * d
    b = -_require(shadow, 12, "shadow") - 20 * c + 231 * d
    a = _require(code, 16, "code") + 5814
    if 16 in shadow:
        from_shadow = shadow[16] - 18 * b - 190 * c + 1540 * d
        if from_shadow != a:
            raise InconsistentProfile(
                f"a from A_16 is {a} but a from S_16 is {from_shadow}"
            )
    return EnumeratorParams(EnumeratorFamily.LEN96_SINGLY_EVEN, (a, b, c, d))


def _fit_len92(code: Dict[int, int]) -> EnumeratorParams:
    beta = _exact_div(_require(code, 16, "code") - 4692, 4, "beta")
    a18 = _require(code, 18, "code")
    candidates: List[EnumeratorParams] = []
    form_three = a18 == 121296 - 8 * beta
    if form_three:
        candidates.append(EnumeratorParams(EnumeratorFamily.LEN92, (3, 0, beta)))
    alpha_num = a18 - 174800 + 8 * beta
    if alpha_num % 256 == 0 and (not form_three or 20 in code):
        alpha = alpha_num // 256
        candidates += [
            EnumeratorParams(EnumeratorFamily.LEN92, (1, alpha, beta)),
            EnumeratorParams(EnumeratorFamily.LEN92, (2, alpha, beta)),
        ]
    if 20 in code:
        candidates = [p for p in candidates if predict(p, 20) == code[20]]
    if not candidates:
        raise InconsistentProfile(
            f"no len92 form fits A_16={code[16]}, A_18={a18}"
            + (f", A_20={code[20]}" if 20 in code else "")
        )
    if len(candidates) > 1:
        raise AmbiguousEnumerator(
            "forms 1 and 2 both fit; supply A_20 to separate them", candidates
        )
    return candidates[0]


def fit(
    family: Union[EnumeratorFamily, str],
    code_counts: Counts,
    shadow_counts: Optional[Counts] = None,
) -> EnumeratorParams:
    """
    Solve the family's series for its parameters.

    Every further displayed coefficient present in the counts is checked
    against the fitted parameters; any disagreement, a non-integral solution
    or a negative predicted coefficient raises InconsistentProfile.
    """
    family = EnumeratorFamily(family)
    code = _as_counts(code_counts)
    shadow = _as_counts(shadow_counts)

    if family is EnumeratorFamily.LEN90:
        params = _fit_len90(code, shadow)
    elif family is EnumeratorFamily.LEN92:
        params = _fit_len92(code)
    elif family is EnumeratorFamily.LEN96_SINGLY_EVEN:
        params = _fit_len96_singly_even(code, shadow)
    else:
        params = EnumeratorParams(family, (_require(code, 16, "code"),))

    bad = mismatches(params, code, shadow)
    if bad:
        series, w, predicted, observed = bad[0]
        raise InconsistentProfile(
            f"{params}: predicted {series} count {predicted} at weight {w}, observed {observed}"
        )
    if not is_admissible(params):
        raise InconsistentProfile(f"{params} predicts a negative coefficient or is out of range")
    logger.debug("fitted %s", params)
    return params


_SINGLY_EVEN_EXTREMAL = {90: 16, 92: 16, 94: 18, 96: 18}


def extremal_d(length: int, parity: Union[Parity, str]) -> int:
    """Largest minimum weight a self-dual code of this length and parity can reach."""
    parity = Parity(parity)
    if length % 2 or not 2 <= length <= 100:
        raise ContractViolation(f"extremal table covers even lengths 2..100, got {length}")
    if parity is Parity.DOUBLY_EVEN:
        return 4 * (length // 24) + 4
    if length not in _SINGLY_EVEN_EXTREMAL:
        raise UnsupportedLength(f"no singly even extremal value recorded for length {length}")
    return _SINGLY_EVEN_EXTREMAL[length]


FAMILY_MINIMUM_D: Dict[EnumeratorFamily, int] = {
    EnumeratorFamily.LEN90: 14,
    EnumeratorFamily.LEN92: 16,
    EnumeratorFamily.LEN96_SINGLY_EVEN: 16,
    EnumeratorFamily.LEN96_DOUBLY_EVEN: 16,
}


def family_for(
    length: int, parity: Union[Parity, str], d: Optional[int] = None
) -> Optional[EnumeratorFamily]:
    """The enumerator family covering codes of this length, parity and minimum weight."""
    parity = Parity(parity)
    family = None
    if length == 90 and parity is Parity.SINGLY_EVEN:
        family = EnumeratorFamily.LEN90
    elif length == 92 and parity is Parity.SINGLY_EVEN:
        family = EnumeratorFamily.LEN92
    elif length == 96:
        if parity is Parity.SINGLY_EVEN:
            family = EnumeratorFamily.LEN96_SINGLY_EVEN
        else:
            family = EnumeratorFamily.LEN96_DOUBLY_EVEN
    if family is not None and d is not None and d < FAMILY_MINIMUM_D[family]:
        return None
    return family


@dataclass(frozen=True)
class CountingPlan:
    """Radii the weight engine must reach before a family can be fitted."""

    code_radius: int
    shadow_radius: Optional[int]


def counting_plan(family: Optional[EnumeratorFamily], d: int) -> CountingPlan:
    if family is EnumeratorFamily.LEN90:
        return CountingPlan(code_radius=max(16, d + 2), shadow_radius=13)
    if family is EnumeratorFamily.LEN92:
        return CountingPlan(code_radius=18, shadow_radius=None)
    if family is EnumeratorFamily.LEN96_SINGLY_EVEN:
        return CountingPlan(code_radius=max(16, d + 2), shadow_radius=16)
    if family is EnumeratorFamily.LEN96_DOUBLY_EVEN:
        return CountingPlan(code_radius=max(16, d), shadow_radius=None)
    return CountingPlan(code_radius=d + 2, shadow_radius=None)
