"""The 16 text perturbations: character- and word-level locally, sentence-level
via the transform service.

Character modes target letters/digits inside word tokens, each independently
with probability ``char_rate(severity)``; if the probabilistic pass makes no
edit, one edit is forced. Word modes follow the EDA/AEDA operation-count
conventions. Sentence-level styles have a single severity and are transported
verbatim from the configured transform client.
"""

from __future__ import annotations

import json
import string
from dataclasses import dataclass
from importlib import resources

import numpy as np

from .core import CHARACTER_METHODS, SENTENCE_METHODS, WORD_METHODS
from .errors import EmptyInputError, NoEligibleWordError, UnknownMethodError

__all__ = [
    "char_rate",
    "word_rate",
    "word_op_count",
    "IdentityFallback",
    "load_keyboard_layout",
    "load_ocr_table",
    "load_lexicon",
    "load_stopwords",
    "perturb_characters",
    "perturb_words",
    "sentence_transform",
    "apply_text_perturbation",
]

PUNCTUATION_CHOICES = (".", ",", "!", "?", ";", ":")

_STRIP_CHARS = "".join(c for c in string.punctuation) + "‘’“”"


def char_rate(severity: int) -> float:
    """Per-character edit probability; 0.05 per severity step."""
    _check_severity(severity)
    return 0.05 * severity


def word_rate(severity: int) -> float:
    """Per-word probability for deletion / punctuation insertion."""
    _check_severity(severity)
    return 0.05 * severity


def word_op_count(severity: int, word_count: int) -> int:
    """Operation count for synonym replace / word insert / word swap."""
    _check_severity(severity)
    return max(1, round(0.05 * severity * word_count))


def _check_severity(severity: int):
    if severity not in (1, 2, 3, 4, 5):
        raise ValueError(f"severity must be in 1..5, got {severity}")


@dataclass(frozen=True)
class IdentityFallback:
    """Marker for samples that could not be perturbed (no eligible unit).

    The fidelity gate passes these through as accepted with score 1.0 so the
    sample is counted as flagged rather than looping on an identity generator.
    """

    text: str


def _load_json(name):
    with resources.files("mmrobust.data").joinpath(name).open("r", encoding="utf-8") as fh:
        return json.load(fh)


_CACHE = {}


def load_keyboard_layout() -> dict:
    if "keyboard" not in _CACHE:
        _CACHE["keyboard"] = _load_json("keyboard.json")
    return _CACHE["keyboard"]


def load_ocr_table() -> dict:
    if "ocr" not in _CACHE:
        _CACHE["ocr"] = _load_json("ocr.json")
    return _CACHE["ocr"]


def load_lexicon() -> dict:
    if "lexicon" not in _CACHE:
        lex = {}
        text = resources.files("mmrobust.data").joinpath("lexicon.tsv").read_text("utf-8")
        for line in text.splitlines():
            if not line.strip():
                continue
            lemma, _, syns = line.partition("\t")
            lex[lemma] = tuple(s for s in syns.split(",") if s)
        _CACHE["lexicon"] = lex
    return _CACHE["lexicon"]


def load_stopwords() -> frozenset:
    if "stopwords" not in _CACHE:
        text = resources.files("mmrobust.data").joinpath("stopwords.txt").read_text("utf-8")
        _CACHE["stopwords"] = frozenset(w for w in text.split() if w)
    return _CACHE["stopwords"]


# ------------------------------------------------------------- character level

def _eligible_positions(text: str) -> list:
    """Indices of letters/digits that sit inside word tokens."""
    return [i for i, ch in enumerate(text) if ch.isalnum()]


def _random_letter(rng) -> str:
    return string.ascii_lowercase[int(rng.integers(0, 26))]


def _match_case(replacement: str, original: str) -> str:
    if original.isupper():
        return replacement.upper()
    return replacement


def perturb_characters(text, mode, severity, seed, layout=None, ocr_table=None) -> str:
    """Apply one character-level perturbation mode with seeded randomness."""
    if not text:
        raise EmptyInputError("text must be nonempty")
    if mode not in ("keyboard", "ocr", "insert", "replace", "swap", "delete"):
        raise UnknownMethodError(f"unknown character mode: {mode!r}")
    _check_severity(severity)
    rng = np.random.default_rng(seed)
    layout = layout if layout is not None else load_keyboard_layout()
    ocr_table = ocr_table if ocr_table is not None else load_ocr_table()
    p = char_rate(severity)

    positions = _eligible_positions(text)
    if not positions:
        raise NoEligibleWordError("no letters or digits to perturb")

    def targets():
        hits = [i for i in positions if rng.random() < p]
        return hits

    def apply(hits):
        chars = list(text)
        out = []
        skip_next = False
        edits = 0
        hit_set = set(hits)
        for i, ch in enumerate(chars):
            if skip_next:
                skip_next = False
                continue
            if i not in hit_set:
                out.append(ch)
                continue
            if mode == "keyboard":
                neighbors = layout.get(ch)
                if not neighbors:
                    out.append(ch)
                    continue
                out.append(str(rng.choice(neighbors)))
                edits += 1
            elif mode == "ocr":
                confusions = ocr_table.get(ch)
                if not confusions:
                    out.append(ch)
                    continue
                out.append(str(rng.choice(confusions)))
                edits += 1
            elif mode == "insert":
                out.append(ch)
                out.append(_random_letter(rng))
                edits += 1
            elif mode == "replace":
                out.append(_match_case(_random_letter(rng), ch))
                edits += 1
            elif mode == "swap":
                if i + 1 < len(chars) and chars[i + 1].isalnum():
                    out.append(chars[i + 1])
                    out.append(ch)
                    skip_next = True
                    edits += 1
                else:
                    out.append(ch)
            elif mode == "delete":
                edits += 1
        return "".join(out), edits

    result, edits = apply(targets())
    if edits == 0:
        # Force one edit at a mode-valid position; if none exists the text
        # cannot be perturbed in this mode.
        if mode == "keyboard":
            valid = [i for i in positions if text[i] in layout]
        elif mode == "ocr":
            valid = [i for i in positions if text[i] in ocr_table]
        elif mode == "swap":
            valid = [i for i in positions if i + 1 < len(text) and text[i + 1].isalnum()]
        else:
            valid = positions
        if not valid:
            raise NoEligibleWordError(f"no character is editable in mode {mode!r}")
        forced = valid[int(rng.integers(0, len(valid)))]
        result, edits = apply([forced])
    return result


# ------------------------------------------------------------------ word level

def _split_affixes(token: str):
    """Split a whitespace token into (prefix punctuation, core, suffix punctuation)."""
    start, end = 0, len(token)
    while start < end and token[start] in _STRIP_CHARS:
        start += 1
    while end > start and token[end - 1] in _STRIP_CHARS:
        end -= 1
    return token[:start], token[start:end], token[end:]


def _style_like(replacement: str, original: str) -> str:
    if original.isupper() and len(original) > 1:
        return replacement.upper()
    if original[:1].isupper():
        return replacement[:1].upper() + replacement[1:]
    return replacement


def perturb_words(text, mode, severity, seed, lexicon=None, stopwords=None) -> str:
    """Apply one word-level perturbation mode with seeded randomness."""
    if not text or not text.strip():
        raise EmptyInputError("text must be nonempty")
    if mode not in ("synonym_replace", "insert", "swap", "delete", "punctuate"):
        raise UnknownMethodError(f"unknown word mode: {mode!r}")
    _check_severity(severity)
    rng = np.random.default_rng(seed)
    lexicon = lexicon if lexicon is not None else load_lexicon()
    stopwords = stopwords if stopwords is not None else load_stopwords()

    tokens = text.split()
    cores = [_split_affixes(t) for t in tokens]
    word_idx = [i for i, (_, core, _) in enumerate(cores) if core]
    if not word_idx:
        raise EmptyInputError("text has no word tokens")
    n_words = len(word_idx)

    def lexical_candidates():
        out = []
        for i in word_idx:
            core = cores[i][1]
            lemma = core.lower()
            if lemma in stopwords:
                continue
            if lemma in lexicon:
                out.append(i)
        return out

    if mode == "synonym_replace":
        candidates = lexical_candidates()
        if not candidates:
            raise NoEligibleWordError("no non-stop-word token has a lexicon entry")
        n = min(word_op_count(severity, n_words), len(candidates))
        chosen = rng.choice(len(candidates), size=n, replace=False)
        for j in chosen:
            i = candidates[int(j)]
            prefix, core, suffix = cores[i]
            syns = lexicon[core.lower()]
            replacement = _style_like(str(rng.choice(syns)), core)
            tokens[i] = prefix + replacement + suffix
        return " ".join(tokens)

    if mode == "insert":
        candidates = lexical_candidates()
        if not candidates:
            raise NoEligibleWordError("no non-stop-word token has a lexicon entry")
        n = word_op_count(severity, n_words)
        for _ in range(n):
            i = candidates[int(rng.integers(0, len(candidates)))]
            core = cores[i][1]
            synonym = str(rng.choice(lexicon[core.lower()]))
            gap = int(rng.integers(0, len(tokens) + 1))
            tokens.insert(gap, synonym)
        return " ".join(tokens)

    if mode == "swap":
        if n_words < 2:
            raise NoEligibleWordError("need at least two word tokens to swap")
        n = word_op_count(severity, n_words)
        for _ in range(n):
            a, b = rng.choice(n_words, size=2, replace=False)
            ia, ib = word_idx[int(a)], word_idx[int(b)]
            tokens[ia], tokens[ib] = tokens[ib], tokens[ia]
        return " ".join(tokens)

    if mode == "delete":
        p = word_rate(severity)
        keep = [i for i in range(len(tokens))
                if i not in word_idx or rng.random() >= p]
        if not any(i in keep for i in word_idx):
            keep.append(word_idx[int(rng.integers(0, n_words))])
            keep.sort()
        return " ".join(tokens[i] for i in keep)

    # punctuate: each gap between tokens independently receives one mark.
    p = word_rate(severity)
    out = []
    for i, tok in enumerate(tokens):
        if i > 0 and rng.random() < p:
            out.append(str(rng.choice(PUNCTUATION_CHOICES)))
        out.append(tok)
    return " ".join(out)


# ------------------------------------------------------------- sentence level

def sentence_transform(text, style, client) -> str:
    """Route a sentence-level rewrite through the transform service client."""
    if not text:
        raise EmptyInputError("text must be nonempty")
    if style not in SENTENCE_METHODS:
        raise UnknownMethodError(f"unknown sentence style: {style!r}")
    from .errors import ServiceUnavailableError

    if client is None:
        raise ServiceUnavailableError("sentence transforms need a transform client or stub")
    return client.transform(text, style)


# ---------------------------------------------------------------- dispatch

_CHAR_MODE = {
    "keyboard": "keyboard",
    "ocr": "ocr",
    "character_insert": "insert",
    "character_replace": "replace",
    "character_swap": "swap",
    "character_delete": "delete",
}

_WORD_MODE = {
    "synonym_replace": "synonym_replace",
    "word_insert": "insert",
    "word_swap": "swap",
    "word_delete": "delete",
    "insert_punctuation": "punctuate",
}


def apply_text_perturbation(text, spec, seed, transformer=None) -> str:
    """Dispatch one manifest entry onto a caption.

    ``transformer`` (a transform service client or stub) is required only for
    sentence-level methods.
    """
    if spec.modality != "text":
        raise ValueError(f"expected a text spec, got modality {spec.modality!r}")
    if spec.method in CHARACTER_METHODS:
        return perturb_characters(text, _CHAR_MODE[spec.method], spec.severity, seed)
    if spec.method in WORD_METHODS:
        return perturb_words(text, _WORD_MODE[spec.method], spec.severity, seed)
    if spec.method in SENTENCE_METHODS:
        return sentence_transform(text, spec.method, transformer)
    raise UnknownMethodError(f"unknown text method: {spec.method!r}")
