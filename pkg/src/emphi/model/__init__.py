"The EmpHi generator network, decoding and checkpoints."

from emphi.model.outputs import EncoderOutput, DecoderState, StepOutput, ForwardOutput
from emphi.model.network import EmphiModel, count_parameters
from emphi.model.generation import GeneratedResponse, generate, sample_intents
from emphi.model.embeddings import load_pretrained_vectors
from emphi.model.checkpoint import save_model, load_model, model_dir

__all__ = [
    "EncoderOutput",
    "DecoderState",
    "StepOutput",
    "ForwardOutput",
    "EmphiModel",
    "count_parameters",
    "GeneratedResponse",
    "generate",
    "sample_intents",
    "load_pretrained_vectors",
    "save_model",
    "load_model",
    "model_dir",
]
