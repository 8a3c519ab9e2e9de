"""Toy encoder-decoder with a style pointer, written in numpy."""

from .checkpoint import load_checkpoint, save_checkpoint
from .infer import Generation, infer, random_styles
from .network import ModelConfig, ToyModel
from .synthetic import make_synthetic_corpus
from .train import Stage, TrainConfig, TrainingError, train

__all__ = [
    "Generation",
    "ModelConfig",
    "Stage",
    "ToyModel",
    "TrainConfig",
    "TrainingError",
    "infer",
    "load_checkpoint",
    "make_synthetic_corpus",
    "random_styles",
    "save_checkpoint",
    "train",
]
