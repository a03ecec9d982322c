"""Rule-language parser: grammar, literals, ids, and rejection messages."""

import pytest
from hypothesis import given, strategies as st

from medreason.errors import BuiltinError, RuleSafetyError, RuleSyntaxError
from medreason.rules import (
    Atom,
    Rule,
    Var,
    bundled_core_rules_text,
    bundled_rules_text,
    format_value,
    parse_rules,
)


def parse_one(text):
    rules = parse_rules(text)
    assert len(rules) == 1
    return rules[0]


class TestGrammar:
    def test_minimal_rule(self):
        rule = parse_one("Patient(?p) ^ hasFever(?p, true) -> hasFlu(?p, true)")
        assert rule.id == "rule_0001"
        assert rule.body == (
            Atom("Patient", (Var("p"),)),
            Atom("hasFever", (Var("p"), True)),
        )
        assert rule.head == (Atom("hasFlu", (Var("p"), True)),)

    def test_unicode_conjunction(self):
        a = parse_one("Patient(?p) ^ hasRash(?p, true) -> x(?p, true)")
        b = parse_one("Patient(?p) ∧ hasRash(?p, true) -> x(?p, true)")
        assert a.body == b.body and a.head == b.head

    def test_conjunctive_head(self):
        rule = parse_one("a(?p, true) -> b(?p, true) ^ c(?p, false)")
        assert [atom.predicate for atom in rule.head] == ["b", "c"]

    def test_term_kinds(self):
        rule = parse_one('a(?p, 38.2) ^ b(?p, -3) ^ c(?p, "wheeze") ^ d(?p, false) -> e(?p, true)')
        values = [atom.terms[1] for atom in rule.body]
        assert values == [38.2, -3, "wheeze", False]
        assert isinstance(values[0], float) and isinstance(values[1], int)

    def test_blank_lines_and_comments_skipped(self):
        rules = parse_rules("# header\n\na(?p, true) -> b(?p, true)  # trailing note\n")
        assert len(rules) == 1

    def test_semicolon_separates_rules(self):
        rules = parse_rules("a(?p, true) -> b(?p, true); c(?p, true) -> d(?p, true);")
        assert [r.id for r in rules] == ["rule_0001", "rule_0002"]
        assert rules[1].head[0].predicate == "d"

    def test_ids_are_positional_per_call(self):
        first = parse_rules("a(?p, true) -> b(?p, true)")
        second = parse_rules("a(?p, true) -> b(?p, true)")
        assert first[0].id == second[0].id == "rule_0001"


class TestTypedLiterals:
    @pytest.mark.parametrize(
        "literal, expected",
        [
            ('"32"', 32),
            ('"38.2"', 38.2),
            ('"true"', True),
            ('"false"', False),
            ('"wheeze"', "wheeze"),
        ],
    )
    def test_coercion(self, literal, expected):
        rule = parse_one(f"a(?p, {literal}^^rdf:PlainLiteral) -> b(?p, true)")
        value = rule.body[0].terms[1]
        assert value == expected and type(value) is type(expected)

    def test_untyped_string_stays_text(self):
        rule = parse_one('a(?p, "32") -> b(?p, true)')
        assert rule.body[0].terms[1] == "32"
        assert isinstance(rule.body[0].terms[1], str)


class TestIdDirective:
    def test_directive_names_next_rule(self):
        rules = parse_rules(
            "a(?p, true) -> b(?p, true)\n"
            "# @id: referral_fever\n"
            "b(?p, true) -> c(?p, true)\n"
            "c(?p, true) -> d(?p, true)\n"
        )
        assert [r.id for r in rules] == ["rule_0001", "referral_fever", "rule_0003"]

    def test_plain_comment_is_not_a_directive(self):
        rules = parse_rules("# id: nope\na(?p, true) -> b(?p, true)")
        assert rules[0].id == "rule_0001"


class TestRejections:
    def test_bare_name_term(self):
        with pytest.raises(RuleSyntaxError, match="bare name 'flu' is not a term"):
            parse_rules("a(?p, flu) -> b(?p, true)")

    def test_unexpected_character_position(self):
        with pytest.raises(RuleSyntaxError) as exc:
            parse_rules("a(?p, true) -> b(?p, true)\na(?p, true) @ b(?p, true)")
        assert exc.value.line == 2
        assert exc.value.column == 13
        assert "line 2, column 13" in str(exc.value)

    def test_missing_arrow(self):
        with pytest.raises(RuleSyntaxError, match="expected ARROW"):
            parse_rules("a(?p, true) b(?p, true)")

    def test_trailing_input(self):
        with pytest.raises(RuleSyntaxError, match="unexpected trailing input"):
            parse_rules("a(?p, true) -> b(?p, true) c(?p, true)")

    def test_ternary_atom(self):
        with pytest.raises(RuleSyntaxError, match="at most 2 terms"):
            parse_rules("a(?p, 1, 2) -> b(?p, true)")

    def test_unknown_builtin(self):
        with pytest.raises(BuiltinError, match="unknown builtin 'swrlb:frobnicate'"):
            parse_rules("a(?p, ?v) ^ swrlb:frobnicate(?v, 3) -> b(?p, true)")

    def test_builtin_arity(self):
        with pytest.raises(BuiltinError, match="expects 2 arguments, got 1"):
            parse_rules("a(?p, ?v) ^ swrlb:greaterThan(?v) -> b(?p, true)")

    def test_builtin_in_head(self):
        with pytest.raises(RuleSyntaxError, match="not allowed in rule head"):
            parse_rules("a(?p, ?v) -> swrlb:greaterThan(?v, 3)")

    def test_unbound_head_variable(self):
        with pytest.raises(RuleSafetyError, match=r"head variable \?q"):
            parse_rules("a(?p, true) -> b(?q, true)")

    def test_unbound_builtin_argument(self):
        with pytest.raises(RuleSafetyError, match=r"builtin argument \?v"):
            parse_rules("a(?p, true) ^ swrlb:greaterThan(?v, 3) -> b(?p, true)")

    def test_builtin_does_not_bind(self):
        # a variable seen only by a builtin is not bound for the head either
        with pytest.raises(RuleSafetyError):
            parse_rules("a(?p, true) ^ swrlb:equal(?v, 3) -> b(?p, ?v)")


class TestRendering:
    def test_var_and_atom_repr(self):
        assert repr(Var("p")) == "?p"
        assert str(Atom("hasFever", (Var("p"), 38.2))) == "hasFever(?p, 38.2)"

    def test_format_value(self):
        assert format_value(True) == "true"
        assert format_value(False) == "false"
        assert format_value(7) == "7"
        assert format_value(2.5) == "2.5"
        assert format_value("dry cough") == '"dry cough"'

    def test_rule_str_reparses(self):
        rule = parse_one(
            'Patient(?p) ^ hasFever(?p, 38.2) ^ swrlb:lessThan(2, 3) -> hasFlu(?p, true)'
        )
        again = parse_one(str(rule))
        assert again.body == rule.body and again.head == rule.head


_names = st.from_regex(r"[a-z][a-z0-9_]{0,8}", fullmatch=True)
_values = st.one_of(
    st.booleans(),
    st.integers(-999, 999),
    st.integers(0, 9999).map(lambda n: n / 10),
    st.from_regex(r"[a-zA-Z][a-zA-Z ]{0,10}", fullmatch=True),
)


@st.composite
def _rules(draw):
    # single-variable rules: trivially safe, covers every term kind
    body = [Atom(draw(_names), (Var("x"), draw(_values)))
            for _ in range(draw(st.integers(1, 3)))]
    if draw(st.booleans()):
        body.append(Atom(draw(_names).capitalize(), (Var("x"),)))
    head = tuple(Atom(draw(_names), (Var("x"), draw(_values)))
                 for _ in range(draw(st.integers(1, 2))))
    return Rule("rule_0001", tuple(body), head)


@given(_rules())
def test_round_trip_through_text(rule):
    parsed = parse_one(str(rule))
    assert parsed.body == rule.body
    assert parsed.head == rule.head


class TestBundledCorpus:
    def test_core_rule_count_and_ids(self):
        rules = parse_rules(bundled_core_rules_text())
        assert [r.id for r in rules] == [f"rule_{i:04d}" for i in range(1, 10)]

    def test_core_duplicate_pair(self):
        # rows two and four of the published table are the same implication
        rules = parse_rules(bundled_core_rules_text())
        assert rules[1].body == rules[3].body
        assert rules[1].head == rules[3].head

    def test_full_corpus_count(self):
        assert len(parse_rules(bundled_rules_text())) == 289
