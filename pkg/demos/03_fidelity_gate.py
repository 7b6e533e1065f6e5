"""Watch the fidelity gate accept, retry, and drop.

Word-level edits keep high similarity and pass quickly; aggressive
character-level edits need retries and can exhaust the 100-attempt budget,
removing the sample from the benchmark.
"""

import numpy as np

from mmrobust import FidelityConfig, fidelity_gate, perturb_characters, perturb_words
from mmrobust.services import HashedBagOfWordsEmbedder

CAPTION = "A brown dog running across a grassy green field."


def gate(caption, make_candidate, alpha0):
    embedder = HashedBagOfWordsEmbedder()
    rng = np.random.default_rng(0)

    def generator():
        return make_candidate(int(rng.integers(0, 2 ** 63)))

    return fidelity_gate(caption, generator, embedder, FidelityConfig(alpha0=alpha0))


def main():
    print(f"clean: {CAPTION}\n")

    outcome = gate(CAPTION, lambda s: perturb_words(CAPTION, "synonym_replace", 1, s), 0.75)
    print(f"synonym_replace s1: {outcome.status} after {outcome.attempts} attempt(s), "
          f"score {outcome.score:.3f}")
    print(f"  -> {outcome.text}\n")

    outcome = gate(CAPTION, lambda s: perturb_characters(CAPTION, "keyboard", 2, s), 0.75)
    print(f"keyboard s2: {outcome.status} after {outcome.attempts} attempt(s), "
          f"score {outcome.score:.3f}")
    print(f"  -> {outcome.text}\n")

    outcome = gate(CAPTION, lambda s: perturb_characters(CAPTION, "keyboard", 5, s), 0.9)
    if outcome.accepted:
        print(f"keyboard s5 at alpha0=0.9: accepted after {outcome.attempts} attempts")
    else:
        print(f"keyboard s5 at alpha0=0.9: DROPPED after {outcome.attempts} attempts "
              "(sample leaves the benchmark)")


if __name__ == "__main__":
    main()
