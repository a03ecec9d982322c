"""Comparison builtins: numeric coercion rules and string fallback."""

import pytest

from medreason.errors import BuiltinError
from medreason.rules import evaluate_builtin


@pytest.mark.parametrize(
    "name, a, b, expected",
    [
        ("swrlb:greaterThan", 3, 2, True),
        ("swrlb:greaterThan", 2, 3, False),
        ("swrlb:greaterThan", 2, 2, False),
        ("swrlb:lessThan", 2, 3, True),
        ("swrlb:lessThan", 3, 2, False),
        ("swrlb:greaterThanOrEqual", 2, 2, True),
        ("swrlb:greaterThanOrEqual", 1.9, 2, False),
        ("swrlb:lessThanOrEqual", 2, 2, True),
        ("swrlb:lessThanOrEqual", 2.1, 2, False),
        ("swrlb:equal", 1, 1.0, True),
        ("swrlb:equal", 1, 2, False),
        ("swrlb:notEqual", 1, 2, True),
        ("swrlb:notEqual", 1, 1.0, False),
    ],
)
def test_numeric_comparisons(name, a, b, expected):
    assert evaluate_builtin(name, [a, b]) is expected


def test_numeric_strings_compare_numerically():
    # lexicographic order would put "9" after "10"
    assert evaluate_builtin("swrlb:greaterThan", ["10", "9"])
    assert evaluate_builtin("swrlb:equal", ["10", 10])
    assert evaluate_builtin("swrlb:greaterThanOrEqual", [38.2, "38"])


def test_booleans_order_as_zero_and_one():
    assert evaluate_builtin("swrlb:greaterThan", [True, False])
    assert evaluate_builtin("swrlb:equal", [True, 1])
    assert evaluate_builtin("swrlb:lessThan", [False, 0.5])


def test_plain_strings_compare_lexicographically():
    assert evaluate_builtin("swrlb:greaterThan", ["b", "a"])
    assert evaluate_builtin("swrlb:equal", ["dry cough", "dry cough"])
    assert evaluate_builtin("swrlb:notEqual", ["dry cough", "wet cough"])


def test_mixed_kinds_fall_back_to_text():
    # one side is not numeric, so both render as text before comparing
    assert evaluate_builtin("swrlb:notEqual", [2, "two"])
    assert evaluate_builtin("swrlb:equal", [True, "true"])


def test_prefix_is_optional_at_evaluation_time():
    assert evaluate_builtin("greaterThan", [3, 2])


def test_unknown_builtin():
    with pytest.raises(BuiltinError, match="unknown builtin"):
        evaluate_builtin("swrlb:pow", [2, 3])


def test_wrong_arity_at_evaluation_time():
    with pytest.raises(BuiltinError, match="expects 2 arguments, got 3"):
        evaluate_builtin("swrlb:equal", [1, 2, 3])
