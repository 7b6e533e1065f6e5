"""Text style transforms.

Four style rewriters (formal, casual, passive, active) built from contraction
handling, register word maps, and clause patterns for the copular/participial
caption shapes, plus dictionary-based EN->DE->EN back-translation. Everything
is deterministic; sentences no rule matches are returned unchanged rather
than risk breaking their meaning.
"""

from __future__ import annotations

import re
from importlib import resources

__all__ = ["RuleBasedTransformer", "STYLES"]

STYLES = ("formal", "casual", "passive", "active", "back_translate")

CONTRACTIONS = {
    "don't": "do not", "doesn't": "does not", "didn't": "did not",
    "can't": "cannot", "won't": "will not", "isn't": "is not",
    "aren't": "are not", "wasn't": "was not", "weren't": "were not",
    "it's": "it is", "that's": "that is", "there's": "there is",
    "he's": "he is", "she's": "she is", "they're": "they are",
    "we're": "we are", "you're": "you are", "i'm": "i am",
    "let's": "let us", "what's": "what is", "who's": "who is",
}

FORMAL_WORDS = {
    "kids": "children", "kid": "child", "guy": "gentleman", "guys": "gentlemen",
    "mom": "mother", "dad": "father", "a lot of": "many", "lots of": "many",
    "gets": "receives", "get": "receive", "buy": "purchase", "buys": "purchases",
    "big": "large", "show": "display", "shows": "displays",
}

CASUAL_WORDS = {
    "children": "kids", "child": "kid", "gentleman": "guy", "gentlemen": "guys",
    "mother": "mom", "father": "dad", "many": "a lot of",
    "receives": "gets", "receive": "get", "purchase": "buy",
    "purchases": "buys", "large": "big", "displays": "shows", "display": "shows",
    "contains": "is filled with",
}

# Participial caption clauses: "<NP> <participle phrase> <NP>."
_FILLED_WITH = re.compile(r"^(?P<subject>.+?)\s+(?:filled|loaded|stuffed|packed)"
                          r"\s+with\s+(?P<object>.+?)(?P<tail>[.!?]?)$")
_CONTAINS = re.compile(r"^(?P<subject>.+?)\s+contains?\s+(?P<object>.+?)(?P<tail>[.!?]?)$")


def _lower_article(phrase: str) -> str:
    return phrase[:1].lower() + phrase[1:] if phrase else phrase


def _capitalize(sentence: str) -> str:
    return sentence[:1].upper() + sentence[1:] if sentence else sentence


def _replace_words(text: str, table: dict) -> str:
    # Longest-first so multiword keys win over their substrings.
    for key in sorted(table, key=len, reverse=True):
        pattern = re.compile(rf"\b{re.escape(key)}\b", re.IGNORECASE)

        def sub(match):
            word = match.group(0)
            replacement = table[key]
            if word[:1].isupper():
                return replacement[:1].upper() + replacement[1:]
            return replacement

        text = pattern.sub(sub, text)
    return text


def _expand_contractions(text: str) -> str:
    for contraction, expansion in CONTRACTIONS.items():
        pattern = re.compile(rf"\b{re.escape(contraction)}\b", re.IGNORECASE)

        def sub(match):
            word = match.group(0)
            if word[:1].isupper():
                return expansion[:1].upper() + expansion[1:]
            return expansion

        text = pattern.sub(sub, text)
    return text


def _contract(text: str) -> str:
    for contraction, expansion in CONTRACTIONS.items():
        pattern = re.compile(rf"\b{re.escape(expansion)}\b", re.IGNORECASE)
        text = pattern.sub(lambda m, c=contraction: c if m.group(0)[:1].islower()
                           else c[:1].upper() + c[1:], text)
    return text


class RuleBasedTransformer:
    def __init__(self):
        self._en_de = {}
        self._de_en = {}
        path = resources.files("mmrobust_server.data").joinpath("dictionary_en_de.tsv")
        for line in path.read_text("utf-8").splitlines():
            if not line.strip():
                continue
            en, _, de = line.partition("\t")
            self._en_de[en] = de
            # first English word listed for a German word wins the return trip
            self._de_en.setdefault(de, en)

    # ------------------------------------------------------------- styles

    def _formal(self, text: str) -> str:
        out = _expand_contractions(text)
        match = _FILLED_WITH.match(out)
        if match:
            out = (f"{match.group('subject')} contains {match.group('object')}"
                   f"{match.group('tail')}")
        return _replace_words(out, FORMAL_WORDS)

    def _casual(self, text: str) -> str:
        out = _replace_words(text, CASUAL_WORDS)
        return _contract(out)

    def _passive(self, text: str) -> str:
        match = _FILLED_WITH.match(text) or _CONTAINS.match(text)
        if match:
            subject = _lower_article(match.group("subject"))
            tail = match.group("tail") or "."
            return _capitalize(f"Some {match.group('object')} are in {subject}{tail}")
        return text

    def _active(self, text: str) -> str:
        match = _FILLED_WITH.match(text) or _CONTAINS.match(text)
        if match:
            subject = _lower_article(match.group("subject"))
            tail = match.group("tail") or "."
            return _capitalize(f"There are {match.group('object')} in {subject}{tail}")
        return text

    def _back_translate(self, text: str) -> str:
        words = text.split()
        round_tripped = []
        for word in words:
            prefix = ""
            suffix = ""
            core = word
            while core and not core[0].isalnum():
                prefix += core[0]
                core = core[1:]
            while core and not core[-1].isalnum():
                suffix = core[-1] + suffix
                core = core[:-1]
            german = self._en_de.get(core.lower())
            english = self._de_en.get(german) if german else None
            if english:
                if core[:1].isupper():
                    english = english[:1].upper() + english[1:]
                round_tripped.append(prefix + english + suffix)
            else:
                round_tripped.append(word)
        return " ".join(round_tripped)

    def transform(self, text: str, style: str) -> str:
        if style not in STYLES:
            raise ValueError(f"unknown style: {style!r}")
        return {
            "formal": self._formal,
            "casual": self._casual,
            "passive": self._passive,
            "active": self._active,
            "back_translate": self._back_translate,
        }[style](text)
