"""Tokenization and stemming underpin every matcher, so the table is pinned."""

import pytest

from medreason.text import canonical_name, default_stopwords, preprocess_text, stem, token_set


@pytest.mark.parametrize("token,expected", [
    ("bleeding", "bleed"),
    ("movement", "move"),
    ("abnormal", "abnorm"),
    ("change", "chang"),
    ("prolonged", "prolong"),
    ("unexplained", "unexplain"),
    ("symptoms", "symptom"),
    ("classes", "class"),       # sses -> ss
    ("berries", "berri"),       # ies -> i
    ("swellings", "swell"),     # ings dropped
    ("numbness", "numb"),       # ness dropped
    ("finally", "fin"),         # ally dropped
    ("weekly", "week"),         # ly dropped
    ("boxes", "box"),           # es dropped
    ("nausea", "nausea"),       # no rule applies
])
def test_stem_table(token, expected):
    assert stem(token) == expected


def test_stem_minimum_length_guard():
    # A matched rule whose stem would fall under three chars leaves the
    # token alone rather than trying later rules.
    assert stem("oral") == "oral"
    assert stem("as") == "as"
    assert stem("sings") == "sings"


def test_stem_ss_guard_shields_loss():
    assert stem("loss") == "loss"
    assert stem("weightloss") == "weightloss"


def test_stem_first_match_wins():
    # "dressed" hits the ed-rule before anything shorter could apply.
    assert stem("dressed") == "dress"


def test_preprocess_lowercases_splits_and_stems():
    assert preprocess_text("Abnormal  BLEEDING!!") == ["abnorm", "bleed"]


def test_preprocess_drops_stopwords():
    assert preprocess_text("change in the bowel movement") == ["chang", "bowel", "move"]


def test_preprocess_empty_and_stopword_only():
    assert preprocess_text("") == []
    assert preprocess_text("of the and") == []


def test_token_set_is_a_frozenset():
    tokens = token_set("bleeding and severe bleeding")
    assert isinstance(tokens, frozenset)
    assert tokens == frozenset({"bleed", "sever"})


def test_canonical_name_examples():
    assert canonical_name("Change in Bowel Movement") == "change_bowel_movement"
    assert canonical_name("abnormal bleeding") == "abnormal_bleeding"
    assert canonical_name("") == ""
    assert canonical_name("of the") == ""


def test_canonical_name_keeps_tokens_unstemmed():
    assert canonical_name("prolonged symptoms") == "prolonged_symptoms"


def test_default_stopwords_contains_basics():
    words = default_stopwords()
    assert {"the", "in", "of", "and"} <= words
    assert "fever" not in words
