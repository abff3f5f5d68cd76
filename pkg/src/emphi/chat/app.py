"""app.py - the Textual chat REPL.

Type an utterance to get a reply under an intent sampled from the prior.
`/intent <name>` regenerates the latest reply under a chosen intent,
`/reset` clears the dialogue and `/quit` leaves."""

# python standard library imports
from __future__ import annotations
from typing import TYPE_CHECKING

if TYPE_CHECKING:
    from textual.app import ComposeResult

# Textual imports
from textual import on, work
from textual.app import App
from textual.binding import Binding
from textual.containers import Horizontal
from textual.widgets import DataTable, Footer, Header, Input, RichLog
from textual_autocomplete import AutoComplete
from rich.markup import escape

# Local imports
from emphi.chat.session import ChatSession, ChatTurn
from emphi.common.exceptions import EmphiException
from emphi.common.labels import INTENT_NAMES, Intent

COMMANDS = ("/intent", "/reset", "/quit")
COMPLETIONS = [f"/intent {name}" for name in INTENT_NAMES] + ["/reset", "/quit"]


class ChatApp(App[None]):

    TITLE = "EmpHi"
    SUB_TITLE = "empathetic response generator"

    DEFAULT_CSS = """
    #transcript { width: 2fr; border: round $primary; }
    #distribution { width: 1fr; border: round $secondary; }
    #prompt { dock: bottom; }
    """

    BINDINGS = [
        Binding("ctrl+r", "reset", "Reset dialogue"),
        Binding("ctrl+q", "quit", "Quit"),
    ]

    def __init__(self, session: ChatSession) -> None:
        super().__init__()
        self.session = session
        self.last_turn: ChatTurn | None = None

    def compose(self) -> ComposeResult:

        yield Header()
        with Horizontal():
            yield RichLog(id="transcript", wrap=True, markup=True)
            yield DataTable(id="distribution", cursor_type="none")
        prompt = Input(placeholder="Say something, or /intent <name>, /reset, /quit", id="prompt")
        yield prompt
        yield AutoComplete(prompt, candidates=COMPLETIONS)
        yield Footer()

    def on_mount(self) -> None:

        table = self.query_one("#distribution", DataTable)
        table.add_columns("intent", "p(z|C)")
        self.transcript.write("[dim]Intents: " + ", ".join(INTENT_NAMES) + "[/dim]")
        self.query_one("#prompt", Input).focus()

    @property
    def transcript(self) -> RichLog:
        return self.query_one("#transcript", RichLog)

    @on(Input.Submitted, "#prompt")
    def prompt_submitted(self, event: Input.Submitted) -> None:
        event.input.clear()
        self.process_line(event.value)

    def process_line(self, line: str) -> None:
        "Dispatch one line of input: a command or an utterance."

        line = line.strip()
        if not line:
            return
        if not line.startswith("/"):
            self.transcript.write(f"[bold]you:[/bold] {line}")
            self.generate_turn(line, None)
            return

        command, _, argument = line.partition(" ")
        if command == "/quit":
            self.exit()
        elif command == "/reset":
            self.action_reset()
        elif command == "/intent":
            try:
                intent = Intent.from_name(argument)
            except ValueError:
                self.transcript.write(
                    f"[red]unknown intent {argument.strip()!r}[/red]; "
                    f"valid intents: {', '.join(INTENT_NAMES)}"
                )
                return
            if not self.session.has_context:
                self.transcript.write("[yellow]say something first, then pick an intent[/yellow]")
                return
            self.generate_turn(None, intent)
        else:
            self.transcript.write(f"[red]unknown command {command}[/red]; commands: {', '.join(COMMANDS)}")

    @work(thread=True, group="generate", exclusive=True, exit_on_error=False)
    def generate_turn(self, text: str | None, intent: Intent | None) -> None:

        try:
            if text is not None:
                turn = self.session.respond(text)
            else:
                assert intent is not None
                turn = self.session.regenerate(intent)
        except (ValueError, EmphiException) as e:
            self.log.error(f"Failed to generate a reply: {str(e)}")
            self.call_from_thread(self.show_error, str(e))
            return
        self.call_from_thread(self.show_turn, turn)

    def show_error(self, message: str) -> None:
        self.transcript.write(f"[red]error:[/red] {escape(message)}")

    def show_turn(self, turn: ChatTurn) -> None:

        self.last_turn = turn
        table = self.query_one("#distribution", DataTable)
        table.clear()
        for name, probability in turn.distribution:
            table.add_row(name, f"{probability:.4f}")

        self.transcript.write(f"[dim]emotion: {turn.emotion}[/dim]")
        self.transcript.write(f"[bold green]emphi ({turn.intent.label}):[/bold green] {turn.response}")
        detail = f"classifier reads: {turn.recognised.label}"
        if turn.keywords:
            detail += f"; keywords: {', '.join(turn.keywords)}"
        self.transcript.write(f"[dim]{detail}[/dim]")
        self.log.debug(f"turn intent={turn.intent.label} recognised={turn.recognised.label}")

    def action_reset(self) -> None:
        self.session.reset()
        self.last_turn = None
        self.query_one("#distribution", DataTable).clear()
        self.transcript.write("[dim]dialogue reset[/dim]")
