import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from semstyle.termpipe.frames import (FILTERED, FrameLexicon, LexiconError, count_frames,
                                      default_frame_lexicon, map_verb_to_frame)
from semstyle.termpipe.pipeline import (TermConfig, extract_terms, merge_collocations,
                                        preprocess_sentence)
from semstyle.termpipe.terms import FrameTerm, Token, WordTerm, parse_term
from semstyle.text import normalize, tokenize

from conftest import read_term_fixtures

FIXTURES = read_term_fixtures()


def test_fixture_set_is_large_enough():
    assert len(FIXTURES) >= 50


@pytest.mark.parametrize("sentence,expected", FIXTURES, ids=[s[:30] for s, _ in FIXTURES])
def test_term_fixture(sentence, expected):
    assert extract_terms(sentence).render() == expected


def test_rock_noun_vs_verb():
    noun = [t for t in preprocess_sentence("the rock") if t.lemma == "rock"][0]
    verb = [t for t in preprocess_sentence("they rock") if t.lemma == "rock"][0]
    assert (noun.pos, verb.pos) == ("NOUN", "VERB")


def test_riding_lemma_and_tags():
    toks = preprocess_sentence("A man riding a horse.")
    got = {t.surface: (t.lemma, t.pos) for t in toks}
    assert got["man"] == ("man", "NOUN")
    assert got["riding"] == ("ride", "VERB")
    assert got["horse"] == ("horse", "NOUN")


def test_empty_inputs():
    assert preprocess_sentence("") == []
    assert len(extract_terms("")) == 0
    assert extract_terms("it is the").render() == []


def _toks(*words):
    return [Token(w, w, "NOUN" if w != "red" else "ADJ") for w in words]


def test_collocations():
    assert [t.surface for t in merge_collocations(_toks("hot", "dog"))] == ["hot_dog"]
    merged = merge_collocations(_toks("fire", "hydrant", "red"))
    assert [t.surface for t in merged] == ["fire_hydrant", "red"]
    assert merged[0].pos == "NOUN"
    plain = _toks("a", "cat")
    assert merge_collocations(plain) == plain


def test_longest_collocation_wins():
    out = merge_collocations(_toks("a", "b", "c"), [("a", "b"), ("a", "b", "c")])
    assert [t.surface for t in out] == ["a_b_c"]


@pytest.mark.parametrize("lemma,frame", [
    ("sit", "Placing"), ("park", "Placing"), ("lay", "Placing"),
    ("walk", "Self_motion"), ("swim", "Self_motion"), ("hold", "Containing"),
])
def test_table_mappings(lemma, frame):
    assert map_verb_to_frame(lemma, default_frame_lexicon()) == FrameTerm(frame)


def test_rare_frame_is_filtered():
    assert map_verb_to_frame("believe", default_frame_lexicon()) is FILTERED


def test_hierarchy_fallback():
    lex = FrameLexicon({"scurry": "Rare_motion", "ponder": "Rare_thought"},
                       {"Rare_motion": "Motion", "Rare_thought": "Cogitation"},
                       {"Rare_motion": 3, "Motion": 500, "Rare_thought": 2, "Cogitation": 10})
    assert map_verb_to_frame("scurry", lex) == FrameTerm("Motion")
    assert map_verb_to_frame("ponder", lex) is FILTERED
    with pytest.raises(KeyError):
        map_verb_to_frame("unknown", lex)


def test_threshold_is_strict():
    lex = FrameLexicon({"go": "Motion"}, {}, {"Motion": 200})
    assert map_verb_to_frame("go", lex) is FILTERED
    assert map_verb_to_frame("go", lex.with_counts({"Motion": 201})) == FrameTerm("Motion")


def test_cyclic_hierarchy_rejected():
    with pytest.raises(LexiconError):
        FrameLexicon({}, {"A": "B", "B": "A"}, {})


def test_lexicon_text_round_trip(tmp_path):
    lex = default_frame_lexicon()
    lex.save(tmp_path / "f.lex")
    again = FrameLexicon.load(tmp_path / "f.lex")
    assert again.lemma_to_frame == lex.lemma_to_frame
    assert again.in_vocab == lex.in_vocab
    with pytest.raises(LexiconError):
        FrameLexicon.loads("[lemmas]\nsit\n")


def test_count_frames():
    lex = default_frame_lexicon()
    assert count_frames(["sit", "park", "walk", "zzz"], lex) == {"Placing": 2, "Self_motion": 1}


def test_unknown_verb_kept_as_word_term():
    lex = FrameLexicon({}, {}, {})
    terms = extract_terms("The dog bounded through the fresh grass.", lex)
    assert WordTerm("bound", "VERB") in terms.terms


def test_modes():
    s = "The dog bounded through the fresh grass."
    assert extract_terms(s, cfg=TermConfig(mode="lempos")).render() == \
        ["dog_NOUN", "bound_VERB", "grass_NOUN"]
    assert extract_terms(s, cfg=TermConfig(mode="words")).render() == ["dog", "bounded", "grass"]
    with pytest.raises(ValueError):
        TermConfig(mode="bogus")


def test_parse_term_inverts_render():
    for t in (WordTerm("dog", "NOUN"), FrameTerm("Self_motion"), WordTerm("hot_dog", "NOUN")):
        assert parse_term(t.render()) == t


def test_tokenize_and_normalize():
    assert tokenize("Don't stop!") == ["Do", "n't", "stop", "!"]
    assert normalize("I saw 3 dogs; then 12.5 cats...") == \
        ["i", "saw", "<num>", "dogs", "then", "<num>", "cats", "."]


FORBIDDEN = {"DET", "ADP", "PRON", "ADJ", "ADV", "CONJ", "PUNCT"}
WORDS = st.sampled_from("a the dog cat is sitting on red quickly and she grass ran bench "
                        "under big it walked . , plays hot dog".split())


@settings(max_examples=150, deadline=None)
@given(st.lists(WORDS, max_size=12))
def test_term_invariants(words):
    text = " ".join(words)
    a, b = extract_terms(text), extract_terms(text)
    assert a == b
    assert list(a.positions) == sorted(set(a.positions))
    assert len(a) <= max(a.source_len, len(words))
    lex = default_frame_lexicon()
    for t in a:
        if isinstance(t, WordTerm):
            assert t.pos not in FORBIDDEN
        else:
            assert t.frame in lex.in_vocab
