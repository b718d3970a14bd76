from .app import create_app
from .model import (BUILTIN_MODEL, BUILTIN_VERSION, Candidate,
                    TransformersModel, UnigramModel, load_model)

__version__ = "0.1.0"

__all__ = [
    "BUILTIN_MODEL",
    "BUILTIN_VERSION",
    "Candidate",
    "TransformersModel",
    "UnigramModel",
    "create_app",
    "load_model",
]
