"chat.py - `emphi chat`: interactive session with a trained generator."

from __future__ import annotations
import argparse

from emphi.chat import ChatApp, ChatSession
from emphi.common.seeding import torch_generator
from emphi.model.checkpoint import load_model, model_dir
from emphi.stages.stagebase import StageBase, ablation_overrides, add_ablation_argument


class ChatStage(StageBase):

    STAGE_ID = "chat"
    HELP = "Chat with a trained generator; shows the intent prior, the emotion and the reply."

    @classmethod
    def add_arguments(cls, parser: argparse.ArgumentParser) -> None:
        add_ablation_argument(parser)

    @classmethod
    def config_overrides(cls, args: argparse.Namespace) -> dict[str, object]:
        return ablation_overrides(args)

    def build_session(self) -> ChatSession:
        model, _ = load_model(model_dir(self.work_dir, self.config.training.ablations))
        return ChatSession(
            model=model,
            vocab=self.load_vocab(),
            classifier=self.load_classifier(),
            keywords=self.load_keywords(),
            max_context_tokens=self.config.corpus.max_context_tokens,
            max_len=self.config.evaluation.max_len,
            max_tokens=self.config.classifier.max_tokens,
            generator=torch_generator(self.seed, "generation"),
        )

    def run(self, args: argparse.Namespace) -> int:
        app = ChatApp(self.build_session())
        app.run()
        return app.return_code or 0
