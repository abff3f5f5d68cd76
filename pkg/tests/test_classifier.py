from pathlib import Path

import numpy as np
import pytest
import torch

from emphi.classifier import (
    IntentClassifier,
    argmax_intent,
    classify,
    encode_text,
    evaluate_accuracy,
    load_classifier,
    predict_proba,
    read_recognition,
    recognition_records,
    recognize,
    recognize_many,
    save_classifier,
    train_classifier,
    write_recognition,
)
from emphi.common.exceptions import CorpusError, MissingArtifactError
from emphi.common.labels import Intent
from emphi.corpus.intents import IntentExample
from emphi.corpus.vocab import Vocabulary

from conftest import template, tiny_classifier_config


def test_accuracy_on_separable_corpus(
    trained_classifier: IntentClassifier, intent_corpus: list[IntentExample], synthetic_vocab: Vocabulary
):
    assert evaluate_accuracy(trained_classifier, intent_corpus, synthetic_vocab) >= 0.99


def test_distribution_is_normalised(trained_classifier: IntentClassifier, synthetic_vocab: Vocabulary):
    probs = classify(trained_classifier, encode_text(synthetic_vocab, "i am so sorry", 64))
    assert probs.shape == (9,)
    assert probs.dtype == np.float64
    assert np.all(probs >= 0)
    assert probs.sum() == pytest.approx(1.0, abs=1e-9)


def test_batch_matches_single(trained_classifier: IntentClassifier, synthetic_vocab: Vocabulary):
    texts = ["good luck friend", "what really happened", "okay"]
    sequences = [encode_text(synthetic_vocab, text, 64) for text in texts]
    batch = predict_proba(trained_classifier, sequences)
    for row, ids in zip(batch, sequences):
        np.testing.assert_allclose(row, classify(trained_classifier, ids), atol=1e-6)


def test_empty_sequence_is_rejected(trained_classifier: IntentClassifier):
    with pytest.raises(ValueError):
        classify(trained_classifier, [])


def test_out_of_range_id_is_rejected(trained_classifier: IntentClassifier, synthetic_vocab: Vocabulary):
    with pytest.raises(ValueError):
        classify(trained_classifier, [len(synthetic_vocab)])


def test_encode_text_never_returns_empty(synthetic_vocab: Vocabulary):
    assert encode_text(synthetic_vocab, "", 64) == [synthetic_vocab.unk_id]
    assert len(encode_text(synthetic_vocab, "hope luck wish best today", 3)) == 3


def test_argmax_ties_go_to_lower_id():
    assert argmax_intent([0.25, 0.25] + [0.5 / 7] * 7) == Intent.AGREEING


def test_empty_corpus_is_rejected(synthetic_vocab: Vocabulary):
    with pytest.raises(CorpusError):
        train_classifier([], synthetic_vocab, tiny_classifier_config(), seed=0)


def test_training_is_deterministic(intent_corpus: list[IntentExample], synthetic_vocab: Vocabulary):
    config = tiny_classifier_config(max_epochs=2)
    first, first_report = train_classifier(intent_corpus, synthetic_vocab, config, seed=5)
    second, second_report = train_classifier(intent_corpus, synthetic_vocab, config, seed=5)
    assert first_report.train_losses == second_report.train_losses
    for name, tensor in first.state_dict().items():
        assert torch.equal(tensor, second.state_dict()[name])


def test_epoch_callback_reports_each_epoch(intent_corpus: list[IntentExample], synthetic_vocab: Vocabulary):
    seen: list[int] = []
    _, report = train_classifier(
        intent_corpus,
        synthetic_vocab,
        tiny_classifier_config(max_epochs=2),
        seed=1,
        on_epoch=lambda epoch, loss, acc: seen.append(epoch),
    )
    assert seen == [1, 2]
    assert report.held_out_size == 36


def test_checkpoint_round_trip(
    tmp_path: Path, trained_classifier: IntentClassifier, synthetic_vocab: Vocabulary
):
    save_classifier(tmp_path, trained_classifier, tiny_classifier_config(), {"stage": "train-classifier"})
    loaded, manifest = load_classifier(tmp_path)
    assert manifest["stage"] == "train-classifier"
    assert not any(parameter.requires_grad for parameter in loaded.parameters())
    ids = encode_text(synthetic_vocab, "sorry to hear that", 64)
    np.testing.assert_allclose(classify(loaded, ids), classify(trained_classifier, ids), atol=1e-12)


def test_missing_checkpoint_names_its_producer(tmp_path: Path):
    with pytest.raises(MissingArtifactError, match="emphi train-classifier"):
        load_classifier(tmp_path)


def test_recognition_cache_round_trip(
    tmp_path: Path, trained_classifier: IntentClassifier, synthetic_vocab: Vocabulary
):
    sequences = [encode_text(synthetic_vocab, template(intent, 0), 64) for intent in Intent]
    write_recognition(tmp_path / "train.jsonl", recognition_records(trained_classifier, sequences))
    probs, intents = read_recognition(tmp_path / "train.jsonl")
    assert probs.shape == (9, 9)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-9)
    assert [Intent(i) for i in intents] == recognize_many(trained_classifier, sequences)


def test_missing_recognition_cache(tmp_path: Path):
    with pytest.raises(MissingArtifactError):
        read_recognition(tmp_path / "train.jsonl")


def test_recognize_reads_each_intent(trained_classifier: IntentClassifier, synthetic_vocab: Vocabulary):
    for intent in Intent:
        assert recognize(trained_classifier, encode_text(synthetic_vocab, template(intent, 0), 64)) == intent
