"""Scoring math: Recall@K, RSUM, accuracy, MMI, MOR, BLEU-n, ROUGE-L,
CIDEr-D, and SSIM.

All functions are pure and deterministic. MMI follows the relative-drop
convention (s_c - s_p) / s_c for higher-is-better scores; callers negate
scores for lower-is-better metrics.
"""

from __future__ import annotations

import math
from collections import Counter, defaultdict
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import DataError, DimensionMismatchError

__all__ = [
    "RetrievalRanking",
    "recall_at_k",
    "rsum",
    "mmi",
    "mor",
    "accuracy",
    "bleu_n",
    "rouge_l",
    "cider_d",
    "ssim",
]


@dataclass(frozen=True)
class RetrievalRanking:
    """Per-query ranked candidate ids (best first) plus ground-truth id sets."""

    rankings: tuple  # tuple of tuples of candidate ids
    ground_truth: tuple  # tuple of frozensets of relevant ids

    def __post_init__(self):
        if len(self.rankings) != len(self.ground_truth):
            raise DataError("rankings and ground truth must align")
        for ranked, gt in zip(self.rankings, self.ground_truth):
            if len(set(ranked)) != len(ranked):
                raise DataError("duplicate candidate id in a ranking")
            if not gt:
                raise DataError("every query needs at least one ground-truth id")
            if not set(gt) <= set(ranked):
                raise DataError("ground-truth id missing from candidates")

    @classmethod
    def build(cls, rankings, ground_truth) -> "RetrievalRanking":
        return cls(
            rankings=tuple(tuple(r) for r in rankings),
            ground_truth=tuple(frozenset(g) for g in ground_truth),
        )


def recall_at_k(ranking: RetrievalRanking, k: int) -> float:
    """Percentage of queries whose top-k contains any ground-truth id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not ranking.rankings:
        raise DataError("empty query set")
    hits = sum(
        1 for ranked, gt in zip(ranking.rankings, ranking.ground_truth)
        if gt & set(ranked[:k])
    )
    return 100.0 * hits / len(ranking.rankings)


def rsum(tr1, tr5, tr10, ir1, ir5, ir10) -> float:
    """Sum of the six retrieval recalls (text and image retrieval R@1/5/10)."""
    values = (tr1, tr5, tr10, ir1, ir5, ir10)
    for v in values:
        if not 0.0 <= v <= 100.0:
            raise ValueError(f"recall {v} outside [0, 100]")
    return float(sum(values))


def mmi(clean: float, perturbed: float) -> float:
    """MultiModal Impact score: relative drop (s_c - s_p) / s_c."""
    if clean == 0:
        raise DataError("MMI undefined for zero clean score")
    return (clean - perturbed) / clean


def mor(n_gt: int, n_p: int) -> float:
    """Missing Object Rate: 100 * (N_P - N_GT) / N_GT; lower means more missing."""
    if n_gt < 1:
        raise DataError("MOR needs a positive ground-truth detection count")
    return 100.0 * (n_p - n_gt) / n_gt


def accuracy(predictions, labels) -> float:
    predictions = list(predictions)
    labels = list(labels)
    if len(predictions) != len(labels):
        raise DataError("predictions and labels must have equal length")
    if not labels:
        raise DataError("accuracy needs at least one sample")
    matches = sum(1 for p, y in zip(predictions, labels) if p == y)
    return 100.0 * matches / len(labels)


# --------------------------------------------------------------- captioning

def _ngrams(tokens, n):
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu_n(hypothesis, references, n_max: int = 4) -> float:
    """BLEU with uniform weights and brevity penalty.

    A zero clipped match count is smoothed by substituting 1 / (2 * hyp_len)
    for the zero count, so disjoint hypotheses score near zero instead of
    exactly zero. Orders longer than the hypothesis are excluded from the
    (renormalized) uniform weights, so identity hypotheses score 1.0.
    """
    hypothesis = [t.lower() for t in hypothesis]
    references = [[t.lower() for t in r] for r in references]
    if not hypothesis:
        raise DataError("empty hypothesis")
    if not references:
        raise DataError("need at least one reference")
    hyp_len = len(hypothesis)
    ref_len = min((len(r) for r in references),
                  key=lambda L: (abs(L - hyp_len), L))
    log_terms = []
    for n in range(1, n_max + 1):
        hyp_counts = _ngrams(hypothesis, n)
        total = sum(hyp_counts.values())
        if total == 0:
            continue
        max_ref = Counter()
        for ref in references:
            for gram, count in _ngrams(ref, n).items():
                max_ref[gram] = max(max_ref[gram], count)
        clipped = sum(min(c, max_ref[g]) for g, c in hyp_counts.items())
        if clipped == 0:
            p_n = (1.0 / (2.0 * hyp_len)) / total
        else:
            p_n = clipped / total
        log_terms.append(math.log(p_n))
    log_sum = sum(log_terms) / len(log_terms)
    brevity = 1.0 if hyp_len > ref_len else math.exp(1.0 - ref_len / hyp_len)
    return brevity * math.exp(log_sum)


def _lcs_length(a, b) -> int:
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b, 1):
            cur.append(prev[j - 1] + 1 if x == y else max(prev[j], cur[-1]))
        prev = cur
    return prev[-1]


def rouge_l(hypothesis, references, beta: float = 1.2) -> float:
    """ROUGE-L: LCS-based F-measure over the best reference."""
    hypothesis = [t.lower() for t in hypothesis]
    references = [[t.lower() for t in r] for r in references]
    if not hypothesis:
        raise DataError("empty hypothesis")
    if not references:
        raise DataError("need at least one reference")
    best = 0.0
    for ref in references:
        lcs = _lcs_length(hypothesis, ref)
        if lcs == 0:
            continue
        precision = lcs / len(hypothesis)
        recall = lcs / len(ref)
        f = (1 + beta ** 2) * precision * recall / (recall + beta ** 2 * precision)
        best = max(best, f)
    return best


def cider_d(corpus, n_max: int = 4, sigma: float = 6.0) -> list:
    """CIDEr-D per corpus item.

    ``corpus`` is a sequence of (hypothesis_tokens, [reference_tokens, ...])
    pairs. IDF comes from the corpus's own references; candidate counts are
    clipped by reference counts and a Gaussian length penalty (sigma=6) is
    applied per n, with the conventional factor of 10.
    """
    corpus = [
        ([t.lower() for t in hyp], [[t.lower() for t in r] for r in refs])
        for hyp, refs in corpus
    ]
    if len(corpus) < 2:
        raise DataError("CIDEr IDF needs a corpus of at least 2 items")
    for hyp, refs in corpus:
        if not hyp:
            raise DataError("empty hypothesis")
        if not refs:
            raise DataError("need at least one reference per item")

    doc_freq = defaultdict(int)
    for _, refs in corpus:
        seen = set()
        for ref in refs:
            for n in range(1, n_max + 1):
                seen.update(_ngrams(ref, n).keys())
        for gram in seen:
            doc_freq[gram] += 1
    log_n = math.log(len(corpus))

    def tfidf(tokens):
        vecs, norms = [], []
        for n in range(1, n_max + 1):
            vec = {}
            for gram, count in _ngrams(tokens, n).items():
                idf = log_n - math.log(max(1.0, doc_freq[gram]))
                vec[gram] = count * idf
            vecs.append(vec)
            norms.append(math.sqrt(sum(v * v for v in vec.values())))
        return vecs, norms

    scores = []
    for hyp, refs in corpus:
        hyp_vecs, hyp_norms = tfidf(hyp)
        total = np.zeros(n_max)
        for ref in refs:
            ref_vecs, ref_norms = tfidf(ref)
            delta = len(hyp) - len(ref)
            penalty = math.exp(-(delta ** 2) / (2.0 * sigma ** 2))
            for n in range(n_max):
                dot = sum(
                    min(count, ref_vecs[n].get(gram, 0.0)) * ref_vecs[n].get(gram, 0.0)
                    for gram, count in hyp_vecs[n].items()
                )
                if hyp_norms[n] > 0 and ref_norms[n] > 0:
                    total[n] += penalty * dot / (hyp_norms[n] * ref_norms[n])
        scores.append(10.0 * float(np.mean(total)) / len(refs))
    return scores


# --------------------------------------------------------------------- SSIM

_SSIM_WINDOW = 11
_SSIM_SIGMA = 1.5
_SSIM_K1 = 0.01
_SSIM_K2 = 0.03
_SSIM_L = 255.0

_LUMA = np.array([0.299, 0.587, 0.114])


def _gaussian_window(size, sigma):
    half = size // 2
    coords = np.arange(-half, half + 1)
    g = np.exp(-(coords ** 2) / (2.0 * sigma ** 2))
    kernel = np.outer(g, g)
    return kernel / kernel.sum()


def _to_luma(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim == 3:
        return img.astype(np.float64) @ _LUMA
    return img.astype(np.float64)


def ssim(a: np.ndarray, b: np.ndarray) -> float:
    """Mean local structural similarity on the luma plane (8-bit range).

    11x11 Gaussian window (sigma 1.5), K1=0.01, K2=0.03, L=255; border windows
    are excluded (valid region only), matching the classic formulation.
    """
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"image shapes differ: {a.shape} vs {b.shape}")
    x = _to_luma(a)
    y = _to_luma(b)
    if min(x.shape) < _SSIM_WINDOW:
        raise DataError(f"images must be at least {_SSIM_WINDOW}px per side")
    window = _gaussian_window(_SSIM_WINDOW, _SSIM_SIGMA)

    def filt(img):
        return ndimage.convolve(img, window, mode="constant")

    half = _SSIM_WINDOW // 2
    crop = (slice(half, -half), slice(half, -half))
    mu_x = filt(x)[crop]
    mu_y = filt(y)[crop]
    xx = filt(x * x)[crop] - mu_x ** 2
    yy = filt(y * y)[crop] - mu_y ** 2
    xy = filt(x * y)[crop] - mu_x * mu_y
    c1 = (_SSIM_K1 * _SSIM_L) ** 2
    c2 = (_SSIM_K2 * _SSIM_L) ** 2
    numerator = (2 * mu_x * mu_y + c1) * (2 * xy + c2)
    denominator = (mu_x ** 2 + mu_y ** 2 + c1) * (xx + yy + c2)
    return float(np.mean(numerator / denominator))
