import pytest
import torch
from textual.widgets import DataTable, RichLog

from emphi.chat import ChatApp, ChatSession
from emphi.chat.session import sorted_distribution
from emphi.classifier.model import IntentClassifier
from emphi.common.labels import Intent
from emphi.corpus.vocab import Vocabulary
from emphi.keywords.extraction import KeywordTable
from emphi.model.network import EmphiModel

from conftest import tiny_model_config


@pytest.fixture
def session(
    synthetic_vocab: Vocabulary, trained_classifier: IntentClassifier, keyword_table: KeywordTable
) -> ChatSession:
    torch.manual_seed(0)
    model = EmphiModel(len(synthetic_vocab), tiny_model_config()).eval()
    return ChatSession(
        model=model,
        vocab=synthetic_vocab,
        classifier=trained_classifier,
        keywords=keyword_table,
        max_len=6,
        generator=torch.Generator().manual_seed(0),
    )


def _transcript_text(app: ChatApp) -> str:
    return "\n".join(line.text for line in app.query_one("#transcript", RichLog).lines)


# ~ Session ~ #


def test_reply_carries_a_normalised_distribution(session: ChatSession):
    turn = session.respond("i lost my job last week")
    assert len(turn.distribution) == 9
    assert sum(p for _, p in turn.distribution) == pytest.approx(1.0, abs=1e-6)
    probabilities = [p for _, p in turn.distribution]
    assert probabilities == sorted(probabilities, reverse=True)
    assert turn.response
    assert [u.speaker for u in session.history] == ["speaker", "listener"]


def test_regenerate_replaces_the_last_reply(session: ChatSession):
    session.respond("i lost my job last week")
    turn = session.regenerate(Intent.QUESTIONING)
    assert turn.intent == Intent.QUESTIONING
    assert [u.speaker for u in session.history] == ["speaker", "listener"]


def test_regenerate_needs_a_context(session: ChatSession):
    with pytest.raises(ValueError, match="say something first"):
        session.regenerate(Intent.WISHING)


def test_empty_utterance_is_rejected(session: ChatSession):
    with pytest.raises(ValueError):
        session.respond("   ")
    assert session.history == []


def test_reset_clears_history(session: ChatSession):
    session.respond("my dog is sick")
    session.reset()
    assert not session.has_context


def test_sorted_distribution_keeps_canonical_order_on_ties():
    rows = sorted_distribution([0.1, 0.3, 0.3] + [0.3 / 6] * 6)
    assert [name for name, _ in rows[:3]] == ["Acknowledging", "Encouraging", "Agreeing"]


# ~ App ~ #


async def test_app_shows_a_turn(session: ChatSession):
    app = ChatApp(session)
    async with app.run_test(size=(160, 40)) as pilot:
        await pilot.pause()
        app.process_line("i lost my job last week")
        await app.workers.wait_for_complete()
        await pilot.pause()

        assert app.last_turn is not None
        assert app.query_one("#distribution", DataTable).row_count == 9

        app.process_line("/intent Questioning")
        await app.workers.wait_for_complete()
        await pilot.pause()
        assert app.last_turn.intent == Intent.QUESTIONING
        await pilot.exit(None)


async def test_app_reports_unknown_intent(session: ChatSession):
    app = ChatApp(session)
    async with app.run_test(size=(160, 40)) as pilot:
        await pilot.pause()
        app.process_line("/intent Gloating")
        await pilot.pause()
        assert "unknown intent 'Gloating'" in _transcript_text(app)
        assert app.last_turn is None
        await pilot.exit(None)


async def test_app_reset_clears_the_table(session: ChatSession):
    app = ChatApp(session)
    async with app.run_test(size=(160, 40)) as pilot:
        await pilot.pause()
        app.process_line("my dog is sick")
        await app.workers.wait_for_complete()
        await pilot.pause()
        app.process_line("/reset")
        await pilot.pause()
        assert app.last_turn is None
        assert app.query_one("#distribution", DataTable).row_count == 0
        assert not session.has_context
        await pilot.exit(None)


async def test_app_writes_generation_errors_to_the_transcript(
    session: ChatSession, monkeypatch: pytest.MonkeyPatch
):
    def refuse(text: str):
        raise ValueError("empty utterance")

    monkeypatch.setattr(session, "respond", refuse)
    app = ChatApp(session)
    async with app.run_test(size=(160, 40)) as pilot:
        await pilot.pause()
        app.process_line("hello there")
        await app.workers.wait_for_complete()
        await pilot.pause()
        assert "error: empty utterance" in _transcript_text(app)
        assert app.last_turn is None
        await pilot.exit(None)
