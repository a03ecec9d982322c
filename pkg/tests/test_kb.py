"""Vocabulary, incidence matrix, and combination-expansion behavior."""

import numpy as np
import pytest

from medreason.errors import CorpusError, MatrixFormatError
from medreason.kb import (
    DiseaseMatrix,
    SymptomVocabulary,
    dedup_symptoms,
    expand_combinations,
    load_corpus,
    load_disease_matrix,
    matrix_from_corpus,
    serialize_matrix,
)

from conftest import TOY_CSV


# -- vocabulary ---------------------------------------------------------------

def test_vocabulary_rejects_duplicates_and_empties():
    with pytest.raises(CorpusError):
        SymptomVocabulary(("fever", "fever"))
    with pytest.raises(CorpusError):
        SymptomVocabulary(("fever", ""))


def test_vocabulary_lookup_and_vector():
    vocab = SymptomVocabulary(("fever", "cough", "rash"))
    assert len(vocab) == 3
    assert "cough" in vocab
    assert "headache" not in vocab
    assert vocab.index("rash") == 2
    assert vocab.vector(["rash", "fever"]).tolist() == [1, 0, 1]


def test_vocabulary_hash_tracks_content():
    a = SymptomVocabulary(("fever", "cough"))
    b = SymptomVocabulary(("fever", "cough"))
    c = SymptomVocabulary(("fever", "rash"))
    assert a.hash == b.hash
    assert a.hash != c.hash


def test_dedup_merges_word_order_variants():
    vocab = dedup_symptoms(["stomach pain", "pain stomach", "fever"])
    assert vocab.symptoms == ("stomach_pain", "fever")
    assert vocab.synonym_log == {"pain_stomach": "stomach_pain"}


def test_dedup_threshold_boundary_is_strict():
    # Jaccard exactly 0.75 (3 shared of 4 total stems) must NOT merge.
    vocab = dedup_symptoms(["alpha beta gamma", "alpha beta gamma delta"])
    assert len(vocab.symptoms) == 2
    # 4 shared of 5 total (0.8) crosses the threshold and merges.
    vocab = dedup_symptoms(["alpha beta gamma delta", "alpha beta gamma delta epsilon"])
    assert vocab.symptoms == ("alpha_beta_gamma_delta",)


def test_dedup_requires_some_usable_name():
    with pytest.raises(CorpusError):
        dedup_symptoms(["of the", "and"])


# -- matrix parsing -----------------------------------------------------------

def test_load_matrix_round_trip(toy_matrix):
    assert serialize_matrix(toy_matrix) == TOY_CSV
    again = load_disease_matrix(serialize_matrix(toy_matrix))
    assert again.diseases == toy_matrix.diseases
    assert (again.incidence == toy_matrix.incidence).all()


def test_load_matrix_empty_and_headerless():
    with pytest.raises(MatrixFormatError):
        load_disease_matrix("")
    with pytest.raises(MatrixFormatError):
        load_disease_matrix("disease\nFlu\n")


def test_load_matrix_names_bad_cell_one_based():
    bad = "disease,fever,cough\nFlu,1,2\n"
    with pytest.raises(MatrixFormatError) as err:
        load_disease_matrix(bad)
    assert err.value.row == 1
    assert err.value.column == 2
    assert "'2'" in str(err.value)


def test_load_matrix_rejects_ragged_row():
    bad = "disease,fever,cough\nFlu,1\n"
    with pytest.raises(MatrixFormatError) as err:
        load_disease_matrix(bad)
    assert err.value.row == 1


def test_load_matrix_rejects_duplicate_disease():
    bad = "disease,fever\nFlu,1\nFlu,1\n"
    with pytest.raises(MatrixFormatError):
        load_disease_matrix(bad)


def test_load_matrix_rejects_symptomless_disease():
    bad = "disease,fever,cough\nFlu,0,0\n"
    with pytest.raises(MatrixFormatError):
        load_disease_matrix(bad)


def test_strict_mode_requires_canonical_headers():
    bad = "disease,Stomach Pain\nFlu,1\n"
    with pytest.raises(MatrixFormatError):
        load_disease_matrix(bad, strict=True)
    ok = load_disease_matrix(bad, strict=False)
    assert ok.vocabulary.symptoms == ("Stomach Pain",)


def test_strict_mode_rejects_near_duplicate_headers():
    bad = ("disease,alpha_beta_gamma_delta,alpha_beta_gamma_delta_epsilon\n"
           "Flu,1,0\nCold,0,1\n")
    with pytest.raises(MatrixFormatError):
        load_disease_matrix(bad, strict=True)
    assert load_disease_matrix(bad, strict=False).shape == (2, 2)


def test_matrix_rejects_non_binary_array():
    vocab = SymptomVocabulary(("fever",))
    with pytest.raises(MatrixFormatError):
        DiseaseMatrix(("Flu",), vocab, np.array([[2]], dtype=np.uint8))


def test_matrix_symptom_set_and_row(toy_matrix):
    assert toy_matrix.symptom_set("Flu") == {"fever", "cough"}
    assert toy_matrix.row("Measles").tolist() == [1, 0, 1, 0]
    assert toy_matrix.disease_index("Food_Poisoning") == 2


def test_matrix_incidence_is_read_only(toy_matrix):
    with pytest.raises(ValueError):
        toy_matrix.incidence[0, 0] = 0


# -- combination expansion ------------------------------------------------------

def test_expand_enumerates_pairs_and_triples(toy_matrix):
    ds = expand_combinations(toy_matrix)
    # Each toy disease has 2 symptoms: one pair, no triple.
    assert ds.labels == ("Flu", "Measles", "Food_Poisoning")
    assert ds.sizes == (2, 2, 2)
    assert (ds.features.sum(axis=1) == 2).all()
    for row, label in ds.samples():
        columns = {toy_matrix.vocabulary.symptoms[i] for i in np.flatnonzero(row)}
        assert columns <= toy_matrix.symptom_set(label)


def test_expand_full_enumeration_below_cap():
    table = "disease,itch,burn,numb,sting\nX,1,1,1,1\n"
    ds = expand_combinations(load_disease_matrix(table))
    # C(4,2) + C(4,3) = 6 + 4
    assert len(ds.labels) == 10
    assert sorted(set(ds.sizes)) == [2, 3]


def test_expand_cap_samples_deterministically():
    table = "disease,itch,burn,numb,sting\nX,1,1,1,1\n"
    matrix = load_disease_matrix(table)
    ds1 = expand_combinations(matrix, per_disease_cap=3, seed=11)
    ds2 = expand_combinations(matrix, per_disease_cap=3, seed=11)
    ds3 = expand_combinations(matrix, per_disease_cap=3, seed=12)
    assert len(ds1.labels) == 3
    assert (ds1.features == ds2.features).all()
    assert not (ds1.features == ds3.features).all()


def test_expand_validates_arguments(toy_matrix):
    with pytest.raises(ValueError):
        expand_combinations(toy_matrix, per_disease_cap=0)
    with pytest.raises(ValueError):
        expand_combinations(toy_matrix, sizes=(4,))
    with pytest.raises(ValueError):
        expand_combinations(toy_matrix, sizes=())


def test_expand_single_symptom_disease_falls_back():
    table = "disease,itch,burn\nX,1,0\nY,1,1\n"
    ds = expand_combinations(load_disease_matrix(table))
    assert ("X", 1) in zip(ds.labels, ds.sizes)


def test_expanded_subset(toy_matrix):
    ds = expand_combinations(toy_matrix)
    sub = ds.subset([2, 0])
    assert sub.labels == ("Food_Poisoning", "Flu")
    assert (sub.features[1] == ds.features[0]).all()


# -- corpus -------------------------------------------------------------------

def test_load_corpus_parses_and_skips_comments():
    text = "# comment\nFlu\tfever\nFlu\tdry cough\n\nMeasles\tskin rash\n"
    assert load_corpus(text) == [
        ("Flu", "fever"), ("Flu", "dry cough"), ("Measles", "skin rash")]


def test_load_corpus_errors():
    with pytest.raises(CorpusError):
        load_corpus("Flu fever\n")
    with pytest.raises(CorpusError):
        load_corpus("Flu\t\n")
    with pytest.raises(CorpusError):
        load_corpus("# nothing here\n")


def test_matrix_from_corpus_merges_synonyms_into_one_column():
    pairs = [("Flu", "stomach pain"), ("Cold", "pain stomach"), ("Cold", "fever")]
    matrix = matrix_from_corpus(pairs)
    assert matrix.vocabulary.symptoms == ("stomach_pain", "fever")
    assert matrix.symptom_set("Flu") == {"stomach_pain"}
    assert matrix.symptom_set("Cold") == {"stomach_pain", "fever"}


# -- bundled artifacts ----------------------------------------------------------

def test_bundled_matrix_shape_and_row_sizes(matrix):
    assert matrix.shape == (265, 590)
    sizes = matrix.incidence.sum(axis=1)
    assert int(sizes.min()) == 6
    assert int(sizes.max()) == 7


def test_bundled_matrix_leads_with_the_screening_trio(matrix):
    assert matrix.diseases[:3] == (
        "Liver_Cancer", "Inflammatory_Bowel_Disease", "Peptic_Ulcer_Disease")


def test_bundled_matrix_survives_strict_reload(matrix):
    again = load_disease_matrix(serialize_matrix(matrix), strict=True)
    assert again.vocabulary.symptoms == matrix.vocabulary.symptoms


def test_bundled_expansion_row_count(expanded):
    assert len(expanded.labels) == 5565
