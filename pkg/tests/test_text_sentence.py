import pytest

from mmrobust.core import PerturbationSpec
from mmrobust.errors import EmptyInputError, ServiceUnavailableError, UnknownMethodError
from mmrobust.services import STYLE_FIXTURE_TABLE, StubTransformer
from mmrobust.text_perturb import apply_text_perturbation, sentence_transform

SOURCE = "An orange metal bowl strainer filled with apples."


def test_identity_stub_echoes_input():
    assert sentence_transform(SOURCE, "formal", StubTransformer()) == SOURCE


def test_fixture_table_round_trips_the_worked_examples():
    stub = StubTransformer(STYLE_FIXTURE_TABLE)
    assert sentence_transform(SOURCE, "formal", stub) == \
        "An orange metal bowl strainer contains apples."
    assert sentence_transform(SOURCE, "back_translate", stub) == \
        "Apples are placed in an orange metal bowl strainer."


def test_requires_client():
    with pytest.raises(ServiceUnavailableError):
        sentence_transform(SOURCE, "casual", None)


def test_errors():
    with pytest.raises(EmptyInputError):
        sentence_transform("", "formal", StubTransformer())
    with pytest.raises(UnknownMethodError):
        sentence_transform(SOURCE, "poetic", StubTransformer())


def test_dispatch_routes_sentence_methods_to_transformer():
    stub = StubTransformer(STYLE_FIXTURE_TABLE)
    spec = PerturbationSpec("text", "passive", 1)
    out = apply_text_perturbation(SOURCE, spec, seed=0, transformer=stub)
    assert out == "Some apples are in an orange metal bowl strainer."


def test_dispatch_routes_char_and_word_methods_locally():
    out = apply_text_perturbation(SOURCE, PerturbationSpec("text", "keyboard", 1), 3)
    assert out != SOURCE and len(out) == len(SOURCE)
    out = apply_text_perturbation(SOURCE, PerturbationSpec("text", "word_swap", 1), 3)
    assert sorted(out.split()) == sorted(SOURCE.split())
