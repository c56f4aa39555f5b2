"""Word-form lexicon: maps every inflected form to its possible Penn tags and lemmas.

Built deterministically from the base lists in ``data/words.txt``; regular
inflections are generated here, irregular ones are listed in the data file.
"""

from functools import lru_cache
from importlib import resources

VOWELS = set("aeiou")


def _ends_sibilant(w):
    return w.endswith(("s", "x", "z", "ch", "sh"))


def third_person(base):
    if _ends_sibilant(base):
        return base + "es"
    if base.endswith("y") and len(base) > 1 and base[-2] not in VOWELS:
        return base[:-1] + "ies"
    if base.endswith("o") and len(base) > 1 and base[-2] not in VOWELS:
        return base + "es"
    return base + "s"


plural = third_person


def past_tense(base):
    if base.endswith("e"):
        return base + "d"
    if base.endswith("y") and len(base) > 1 and base[-2] not in VOWELS:
        return base[:-1] + "ied"
    return base + "ed"


def gerund(base):
    if base.endswith("ie"):
        return base[:-2] + "ying"
    if base.endswith("e") and not base.endswith(("ee", "ye", "oe")) and len(base) > 2:
        return base[:-1] + "ing"
    return base + "ing"


class Lexicon:
    """form -> {penn_tag: lemma}, plus the base lists used to build it."""

    def __init__(self):
        self.entries = {}
        self.nouns = set()
        self.verbs = set()
        self.adjectives = set()
        self.adverbs = set()
        self.names = set()
        # (kind, base) -> {tag: form}, used by the tagged-sentence generator
        self.forms = {}

    def add(self, form, tag, lemma):
        tags = self.entries.setdefault(form, {})
        tags.setdefault(tag, lemma)

    def tags(self, form):
        return self.entries.get(form.lower(), {})

    def lemma(self, form, tag):
        return self.entries.get(form.lower(), {}).get(tag)

    def __contains__(self, form):
        return form.lower() in self.entries

    @classmethod
    def from_lines(cls, lines):
        lex = cls()
        section = None
        for raw in lines:
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("[") and line.endswith("]"):
                section = line[1:-1]
                continue
            parts = line.split()
            if section == "noun":
                base = parts[0]
                lex.nouns.add(base)
                lex.add(base, "NN", base)
                pl = parts[1] if len(parts) > 1 else plural(base)
                lex.add(pl, "NNS", base)
                lex.forms[("noun", base)] = {"NN": base, "NNS": pl}
            elif section == "verb":
                base = parts[0]
                lex.verbs.add(base)
                past = parts[1] if len(parts) > 1 else past_tense(base)
                part = parts[2] if len(parts) > 2 else past
                ing = parts[3] if len(parts) > 3 else gerund(base)
                sg = parts[4] if len(parts) > 4 else third_person(base)
                forms = {"VB": base, "VBP": base, "VBD": past, "VBN": part, "VBG": ing, "VBZ": sg}
                for tag, form in forms.items():
                    lex.add(form, tag, base)
                lex.forms[("verb", base)] = forms
            elif section == "adj":
                base = parts[0]
                lex.adjectives.add(base)
                lex.add(base, "JJ", base)
                if len(parts) == 3:
                    lex.add(parts[1], "JJR", base)
                    lex.add(parts[2], "JJS", base)
            elif section == "adv":
                lex.adverbs.add(parts[0])
                lex.add(parts[0], "RB", parts[0])
            elif section == "name":
                lex.names.add(parts[0])
                lex.add(parts[0], "NNP", parts[0])
            elif section == "closed":
                form, tag = parts[0], parts[1]
                lex.add(form, tag, parts[2] if len(parts) > 2 else form)
            else:
                raise ValueError(f"line outside a known section: {raw!r}")
        return lex


@lru_cache(maxsize=None)
def default_lexicon():
    text = resources.files("semstyle.termpipe").joinpath("data/words.txt").read_text("utf-8")
    return Lexicon.from_lines(text.splitlines())
