"""EmpHi - empathetic responses with human-like empathetic intents.

A discrete-latent CVAE seq2seq generator with an intent predictor, gated
intent/emotion embeddings and a keyword copy head, plus the tooling to
audit how the intents of any response set drift away from human ones."""

__version__ = "0.1.0"
