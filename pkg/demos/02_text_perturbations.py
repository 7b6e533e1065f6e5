"""Apply all 16 text perturbations to one caption and print the results.

Character and word levels run locally with seeded randomness; sentence level
goes through the bundled fixture transformer (the same table the worked
examples use).
"""

from mmrobust import TEXT_METHODS, PerturbationSpec, apply_text_perturbation, derive_seed
from mmrobust.core import SENTENCE_METHODS, severity_levels
from mmrobust.services import STYLE_FIXTURE_TABLE, StubTransformer

CAPTION = "An orange metal bowl strainer filled with apples."


def main():
    transformer = StubTransformer(STYLE_FIXTURE_TABLE)
    print(f"clean: {CAPTION}\n")
    for method in TEXT_METHODS:
        levels = severity_levels("text", method)
        severity = 2 if len(levels) > 1 else 1
        spec = PerturbationSpec("text", method, severity)
        seed = derive_seed(7, "demo", spec)
        out = apply_text_perturbation(CAPTION, spec, seed, transformer=transformer)
        tag = f"s{severity}" if method not in SENTENCE_METHODS else "  "
        print(f"{method:20s} {tag}  {out}")


if __name__ == "__main__":
    main()
