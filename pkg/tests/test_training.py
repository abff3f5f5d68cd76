from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest
import torch
import torch.nn.functional as F

from emphi.common.exceptions import CorpusError, DivergenceError, NonFiniteLossError
from emphi.common.labels import Intent
from emphi.common.artifacts import read_jsonl
from emphi.config import Ablations, ModelConfig, TrainingConfig
from emphi.corpus.dialogues import DialogueExample, Utterance
from emphi.corpus.vocab import Vocabulary
from emphi.keywords.extraction import KeywordTable
from emphi.model.generation import generate
from emphi.model.network import EmphiModel
from emphi.training import (
    DialogueDataset,
    EncodedExample,
    LossTensors,
    TrainingBatch,
    collate,
    combine,
    compute_losses,
    copy_rate_loss,
    encode_examples,
    evaluate_loss,
    gradient_check,
    make_loader,
    miniature_batch,
    miniature_model,
    prior_kl,
    train,
)
import emphi.training.trainer as trainer_module

from conftest import tiny_model_config


# ~ Batching ~ #


def _dialogue(response: str, emotion: str = "sad") -> DialogueExample:
    return DialogueExample(
        context=(Utterance.from_text("speaker", "i lost my job last week"),),
        response=Utterance.from_text("listener", response),
        emotion=emotion,
        conversation_id="hit:x_0",
    )


def test_encode_examples_marks_keywords_of_the_recognised_intent(
    synthetic_vocab: Vocabulary, keyword_table: KeywordTable
):
    examples = [_dialogue("so sorry , good luck")]
    probs = np.full((1, 9), 1 / 9)
    intents = np.array([Intent.SYMPATHIZING])
    (encoded,) = encode_examples(examples, synthetic_vocab, keyword_table, probs, intents)
    assert encoded.copy == (False, True, False, False, False)
    assert encoded.intent == Intent.SYMPATHIZING
    assert encoded.emotion == 27

    (union,) = encode_examples(examples, synthetic_vocab, keyword_table, probs, intents, mode="union")
    assert union.copy == (False, True, False, False, True)


def test_encode_examples_rejects_misaligned_cache(synthetic_vocab: Vocabulary, keyword_table: KeywordTable):
    with pytest.raises(CorpusError, match="train-classifier"):
        encode_examples([_dialogue("okay")], synthetic_vocab, keyword_table, np.zeros((2, 9)), np.zeros(2))


def test_encode_examples_truncates(synthetic_vocab: Vocabulary, keyword_table: KeywordTable):
    (encoded,) = encode_examples(
        [_dialogue("hope luck wish best friend")],
        synthetic_vocab,
        keyword_table,
        np.full((1, 9), 1 / 9),
        np.array([Intent.WISHING]),
        max_context_tokens=2,
        max_response_tokens=3,
    )
    assert len(encoded.context) == 2
    assert encoded.response == tuple(synthetic_vocab.encode(["hope", "luck", "wish"]))


def test_collate_builds_shifted_pairs():
    examples = [
        EncodedExample(
            context=(5, 6), response=(7, 8), emotion=1, recognition=(1 / 9,) * 9, intent=0, copy=(True, False)
        ),
        EncodedExample(
            context=(9,), response=(10,), emotion=2, recognition=(1 / 9,) * 9, intent=3, copy=(True,)
        ),
    ]
    batch = collate(examples)
    assert batch.response_inputs.tolist() == [[2, 7, 8], [2, 10, 0]]
    assert batch.response_targets.tolist() == [[7, 8, 3], [10, 3, 0]]
    assert batch.target_mask.tolist() == [[True, True, True], [True, True, False]]
    assert batch.copy_targets.tolist() == [[1.0, 0.0, 0.0], [1.0, 0.0, 0.0]]
    assert batch.context_ids.tolist() == [[5, 6], [9, 0]]
    assert batch.context_lengths.tolist() == [2, 1]
    assert len(batch) == 2


# ~ Loss terms ~ #


def test_total_is_the_weighted_sum_of_terms():
    model = miniature_model(seed=1)
    batch = miniature_batch(seed=1)
    for weights in [(1.0, 0.5, 0.5, 1.0), (0.3, 2.0, 0.0, 0.7)]:
        breakdown = compute_losses(model, batch, weights).breakdown()
        assert breakdown.recombine() == pytest.approx(breakdown.total, rel=1e-9)


def test_kl_is_zero_when_recognition_matches_the_prior():
    logits = torch.randn(4, 9, dtype=torch.float64)
    assert float(prior_kl(logits, torch.softmax(logits, dim=-1))) == pytest.approx(0.0, abs=1e-12)
    assert float(prior_kl(logits, torch.softmax(-logits, dim=-1))) > 0


def test_kl_ignores_zero_recognition_bins():
    logits = torch.zeros(1, 9, dtype=torch.float64)
    one_hot = F.one_hot(torch.tensor([2]), 9).double()
    assert float(prior_kl(logits, one_hot)) == pytest.approx(np.log(9), abs=1e-12)


def test_copy_loss_is_near_zero_at_the_truth():
    targets = torch.tensor([[1.0, 0.0, 1.0, 0.0]], dtype=torch.float64)
    mask = torch.ones(1, 4, dtype=torch.bool)
    value = float(copy_rate_loss(targets.clone(), targets, mask))
    assert 0 < value < 1.1e-7


def test_losses_ignore_padding():
    model = miniature_model(seed=2)
    batch = miniature_batch(seed=2)
    extra = 3

    def pad(tensor: torch.Tensor, value: float = 0) -> torch.Tensor:
        return F.pad(tensor, (0, extra), value=value)

    padded = TrainingBatch(
        context_ids=pad(batch.context_ids),
        context_lengths=batch.context_lengths,
        response_inputs=pad(batch.response_inputs),
        response_targets=pad(batch.response_targets),
        target_mask=pad(batch.target_mask.long()).bool(),
        emotions=batch.emotions,
        recognition=batch.recognition,
        intents=batch.intents,
        copy_targets=pad(batch.copy_targets),
    )
    weights = (1.0, 0.5, 0.5, 1.0)
    original = compute_losses(model, batch, weights).breakdown()
    widened = compute_losses(model, padded, weights).breakdown()
    for name in ("l1", "l2", "l3", "l4", "total"):
        assert getattr(widened, name) == pytest.approx(getattr(original, name), rel=1e-10)


def test_non_finite_term_is_named():
    ok = torch.tensor(1.0)
    with pytest.raises(NonFiniteLossError, match="L3") as info:
        combine(ok, ok, torch.tensor(float("nan")), ok, (1.0, 1.0, 1.0, 1.0))
    assert info.value.term == "L3"


# ~ Gradients ~ #


@pytest.mark.parametrize(
    "ablations",
    [Ablations(), Ablations(disable_gate=True), Ablations(disable_copy=True), Ablations(disable_intent=True)],
    ids=["full", "wo-gate", "wo-copy", "wo-intent"],
)
def test_gradients_match_finite_differences(ablations: Ablations):
    model = miniature_model(seed=0, ablations=ablations)
    assert gradient_check(model, miniature_batch(seed=0), samples=200) < 1e-4


def test_nll_only_leaves_prior_and_emotion_heads_untouched():
    model = miniature_model(seed=3)
    model.zero_grad()
    compute_losses(model, miniature_batch(seed=3), (1.0, 0.0, 0.0, 0.0)).total.backward()
    for head in (model.prior_head, model.emotion_head):
        for parameter in head.parameters():
            assert parameter.grad is None or torch.all(parameter.grad == 0)
    assert model.decoder.weight_ih_l0.grad is not None
    assert torch.any(model.decoder.weight_ih_l0.grad != 0)


def _prior_matched_batch(model: EmphiModel, seed: int) -> TrainingBatch:
    "Batch whose recognition rows equal the model's own prior."

    batch = miniature_batch(seed=seed)
    with torch.no_grad():
        encoded = model.encode_context(batch.context_ids, batch.context_lengths)
        prior = torch.softmax(model.prior_intent_logits(encoded.context), dim=-1)
    return replace(batch, recognition=prior)


def _gradient_norm(parameters) -> float:
    grads = [parameter.grad.flatten() for parameter in parameters if parameter.grad is not None]
    return float(torch.cat(grads).norm()) if grads else 0.0


def test_zero_loss_point_has_zero_gradient():
    model = miniature_model(seed=4).eval()
    batch = _prior_matched_batch(model, seed=4)
    model.zero_grad()
    losses = compute_losses(model, batch, (0.0, 1.0, 0.0, 0.0))
    losses.total.backward()
    assert float(losses.total) == pytest.approx(0.0, abs=1e-12)
    assert _gradient_norm(model.parameters()) < 1e-8


def test_matched_recognition_leaves_the_prior_head_still():
    model = miniature_model(seed=5).eval()
    matched = _prior_matched_batch(model, seed=5)
    model.zero_grad()
    compute_losses(model, matched, (0.0, 0.5, 0.0, 0.0)).total.backward()
    assert _gradient_norm(model.prior_head.parameters()) < 1e-8

    shifted = replace(matched, recognition=matched.recognition.roll(1, dims=-1))
    model.zero_grad()
    compute_losses(model, shifted, (0.0, 0.5, 0.0, 0.0)).total.backward()
    assert _gradient_norm(model.prior_head.parameters()) > 1e-4


# ~ Training loop ~ #


def _synthetic_set(count: int, seed: int = 0) -> DialogueDataset:
    "Responses fixed by the emotion, contexts random."

    rng = np.random.default_rng(seed)
    examples = []
    for index in range(count):
        emotion = index % 8
        intent = emotion % 9
        examples.append(
            EncodedExample(
                context=tuple(int(t) for t in rng.integers(4, 30, size=int(rng.integers(2, 6)))),
                response=(4 + emotion, 12 + emotion, 20 + emotion),
                emotion=emotion,
                recognition=tuple(0.92 if k == intent else 0.01 for k in range(9)),
                intent=intent,
                copy=(True, False, False),
            )
        )
    return DialogueDataset(examples)


def _vocab(size: int = 30) -> Vocabulary:
    return Vocabulary(("<pad>", "<unk>", "<bos>", "<eos>") + tuple(f"w{i}" for i in range(size - 4)))


def test_train_logs_every_epoch(tmp_path: Path):
    torch.manual_seed(0)
    model = EmphiModel(30, tiny_model_config())
    config = TrainingConfig(learning_rate=5e-3, batch_size=8, max_epochs=2)
    seen: list[int] = []
    result = train(
        model,
        _synthetic_set(16),
        _synthetic_set(8, seed=1),
        _vocab(),
        config,
        seed=0,
        log_path=tmp_path / "train_log.jsonl",
        on_epoch=lambda record: seen.append(record.epoch),
    )
    assert seen == [1, 2]
    records = read_jsonl(tmp_path / "train_log.jsonl")
    assert [record["epoch"] for record in records] == [1, 2]
    assert set(records[0]) == {"epoch", "L1", "L2", "L3", "L4", "total", "valid_total"}
    assert result.best_epoch in (1, 2)


def _scaled_losses(monkeypatch: pytest.MonkeyPatch, scale: dict[str, float]) -> None:
    real = trainer_module.compute_losses

    def scaled(model, batch, weights) -> LossTensors:
        losses = real(model, batch, weights)
        s = scale["value"]
        return LossTensors(
            l1=losses.l1 * s,
            l2=losses.l2 * s,
            l3=losses.l3 * s,
            l4=losses.l4 * s,
            total=losses.total * s,
            weights=weights,
        )

    monkeypatch.setattr(trainer_module, "compute_losses", scaled)


def test_runaway_loss_raises_divergence(monkeypatch: pytest.MonkeyPatch):
    scale = {"value": 1.0}
    _scaled_losses(monkeypatch, scale)
    torch.manual_seed(0)
    model = EmphiModel(30, tiny_model_config())
    config = TrainingConfig(learning_rate=1e-6, batch_size=8, max_epochs=8, patience=6, divergence_epochs=3)

    def grow(record) -> None:
        scale["value"] *= 100.0

    with pytest.raises(DivergenceError, match="exceeded"):
        train(model, _synthetic_set(8), _synthetic_set(8), _vocab(), config, seed=0, on_epoch=grow)


def test_early_stop_restores_best_weights(monkeypatch: pytest.MonkeyPatch):
    scale = {"value": 1.0}
    _scaled_losses(monkeypatch, scale)
    torch.manual_seed(0)
    model = EmphiModel(30, tiny_model_config())
    config = TrainingConfig(
        learning_rate=1e-2, batch_size=8, max_epochs=10, patience=2, divergence_factor=1e6
    )
    snapshots: dict[int, dict[str, torch.Tensor]] = {}

    def grow(record) -> None:
        snapshots[record.epoch] = {name: t.clone() for name, t in model.state_dict().items()}
        scale["value"] *= 2.0

    result = train(model, _synthetic_set(8), _synthetic_set(8), _vocab(), config, seed=0, on_epoch=grow)
    assert result.stopped_early
    assert result.best_epoch == 1
    assert len(result.history) == 3
    for name, tensor in model.state_dict().items():
        assert torch.equal(tensor, snapshots[1][name])


def test_same_seed_gives_identical_parameters():
    def run() -> dict[str, torch.Tensor]:
        torch.manual_seed(0)
        model = EmphiModel(30, tiny_model_config())
        config = TrainingConfig(learning_rate=5e-3, batch_size=4, max_epochs=3, patience=3)
        train(model, _synthetic_set(12), _synthetic_set(4, seed=1), _vocab(), config, seed=7)
        return model.state_dict()

    first, second = run(), run()
    assert first.keys() == second.keys()
    for name, tensor in first.items():
        assert torch.equal(tensor, second[name]), name


# ~ Overfitting a tiny corpus ~ #

OVERFIT_VOCAB = 300
OVERFIT_CONTEXTS = 4


def _intent_tokens(intent: int) -> tuple[int, int, int]:
    return (4 + 3 * intent, 5 + 3 * intent, 6 + 3 * intent)


def _overfit_contexts() -> list[tuple[int, ...]]:
    rng = np.random.default_rng(11)
    return [tuple(int(t) for t in rng.integers(31, OVERFIT_VOCAB, size=6)) for _ in range(OVERFIT_CONTEXTS)]


@pytest.fixture(scope="module")
def overfit_run() -> tuple[EmphiModel, DialogueDataset, Vocabulary, TrainingConfig]:
    "64 examples over every (context, intent) pair; the response spells out the intent."

    contexts = _overfit_contexts()
    examples = []
    for index in range(64):
        intent, which = index % 9, index % OVERFIT_CONTEXTS
        examples.append(
            EncodedExample(
                context=contexts[which],
                response=_intent_tokens(intent),
                emotion=which,
                recognition=tuple(0.92 if k == intent else 0.01 for k in range(9)),
                intent=intent,
                copy=(True, True, True),
            )
        )
    dataset = DialogueDataset(examples)
    vocab = _vocab(OVERFIT_VOCAB)
    torch.manual_seed(0)
    config = ModelConfig(
        embedding_dim=32, hidden_size=32, latent_dim=16, ffn_hidden=32, num_layers=1, dropout=0.0
    )
    model = EmphiModel(OVERFIT_VOCAB, config)
    training = TrainingConfig(learning_rate=1e-2, batch_size=16, max_epochs=400, patience=400)
    train(model, dataset, dataset, vocab, training, seed=0)
    return model, dataset, vocab, training


def _greedy(model: EmphiModel, vocab: Vocabulary, context: tuple[int, ...], intent: Intent) -> tuple[int, ...]:
    bos, eos = vocab.bos_id, vocab.eos_id
    (response,) = generate(model, context, bos_id=bos, eos_id=eos, intent=intent, max_len=4)
    return tuple(response.ids)


@pytest.mark.slow
def test_small_model_overfits_sixty_four_examples(overfit_run):
    model, dataset, vocab, training = overfit_run
    breakdown = evaluate_loss(model, make_loader(dataset, vocab, 16), training.effective_loss_weights)
    assert breakdown.l1 < 0.1


@pytest.mark.slow
def test_changing_the_intent_changes_the_reply(overfit_run):
    model, _, vocab, _ = overfit_run
    context = _overfit_contexts()[0]
    replies = {_greedy(model, vocab, context, intent) for intent in Intent}
    assert len(replies) >= 8


@pytest.mark.slow
def test_replies_follow_the_requested_intent(overfit_run):
    model, _, vocab, _ = overfit_run
    labels = {_intent_tokens(intent): intent for intent in range(9)}
    hits = total = 0
    for context in _overfit_contexts():
        for intent in Intent:
            total += 1
            hits += labels.get(_greedy(model, vocab, context, intent)) == int(intent)
    assert hits / total >= 0.9
