"""An interpreter for a small functional language hosting three reflective
object systems: single inheritance (``as``), multiple inheritance over
object graphs (``asmi``) and multiple inheritance with a reflective
message delivery service (``asmirs``)."""

from .errors import BootstrapError, BraidError, DepthExceeded, DesugarError, EvalError, ParseError
from .kernel import Interpreter
from .runtime import BRAID_NAMES, load_braid, new_interpreter

__all__ = [
    "BRAID_NAMES", "BootstrapError", "BraidError", "DepthExceeded", "DesugarError",
    "EvalError", "Interpreter", "ParseError", "load_braid", "new_interpreter",
]
