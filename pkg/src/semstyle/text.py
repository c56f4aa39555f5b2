"""Tokenization and sentence normalization shared by the corpus and term pipelines."""

import re

NUM_TOKEN = "<num>"

# clitics are split off the way most English tokenizers do ("don't" -> "do", "n't")
_CLITIC_RE = re.compile(r"(?i)^(.+?)(n't|'s|'re|'m|'ll|'d|'ve)$")
_TOKEN_RE = re.compile(
    r"<num>"
    r"|(?i:n't)|'(?i:s|re|m|ll|d|ve)\b"
    r"|\d+(?:[.,:]\d+)*(?:st|nd|rd|th|s)?"
    r"|[A-Za-z]+(?:[-'][A-Za-z]+)*'?"
    r"|\.\.\.|[^\sA-Za-z\d]"
)
_NUMBER_RE = re.compile(r"^\d+(?:[.,:]\d+)*(?:st|nd|rd|th|s)?$")
_KEEP_PUNCT = {",", ".", "'"}


def tokenize(text):
    """Split raw text into word, number and punctuation tokens.

    Case is preserved; contractions are split into stem and clitic.
    """
    tokens = []
    for tok in _TOKEN_RE.findall(text):
        if tok.endswith("'") and len(tok) > 1:
            # trailing quote or plural possessive ("dogs'")
            tokens.extend([tok[:-1], "'"])
            continue
        m = _CLITIC_RE.match(tok)
        if m and m.group(1).isalpha():
            stem, clitic = m.group(1), m.group(2)
            if clitic.lower() == "n't" and stem.lower() == "ca":
                stem = stem[:-1] + "an"
            elif clitic.lower() == "n't" and stem.lower() == "wo":
                stem = stem[0] + "ill"
            tokens.extend([stem, clitic])
        else:
            tokens.append(tok)
    return tokens


def is_number(token):
    return token == NUM_TOKEN or bool(_NUMBER_RE.match(token))


def normalize(text):
    """Lowercase, tokenize, keep only comma/period/apostrophe punctuation, and
    replace numbers with ``<num>``. Returns the token list."""
    out = []
    for tok in tokenize(text.lower()):
        if is_number(tok):
            out.append(NUM_TOKEN)
        elif tok[0].isalpha() or (tok[0] == "'" and len(tok) > 1):
            out.append(tok)
        elif tok in _KEEP_PUNCT:
            out.append(tok)
        elif tok == "...":
            out.append(".")
    return out


def word_count(tokens):
    """Number of non-punctuation tokens."""
    return sum(1 for t in tokens if t[0].isalnum() or t == NUM_TOKEN or (t[0] == "'" and len(t) > 1))
