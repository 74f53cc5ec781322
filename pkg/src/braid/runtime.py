"""Loading the object-system preludes into an interpreter."""

from __future__ import annotations

from functools import lru_cache
from importlib import resources

from . import desugar as D
from .errors import EvalError
from .kernel import Interpreter
from .syntax import parse_program
from .values import GlobalEnv, Prim

BRAID_NAMES = ("as", "asmi", "asmirs")


def prelude_text(name):
    return resources.files("braid.preludes").joinpath(f"{name}.gb").read_text(encoding="utf-8")


@lru_cache(maxsize=None)
def prelude_program(name):
    """Kernel translation of a prelude, shared by every interpreter."""
    return D.desugar_program(parse_program(prelude_text(name)))


class BraidState:
    """Shared plumbing for a loaded object system.

    Prelude code runs in a private environment layered over the
    interpreter's globals; only the names listed in ``exports`` are copied
    to the globals afterwards.
    """

    name = ""
    exports = ()

    def __init__(self, interp):
        self.interp = interp
        self.env = GlobalEnv(parent=interp.globals)
        self.send_count = 0

    def native(self, name, arity, fn):
        value = Prim(name, arity, fn)
        self.interp.define(name, value, self.env)
        return value

    def define(self, name, value):
        self.interp.define(name, value, self.env)

    def get(self, name):
        loc = self.env.local_lookup(name)
        if loc is None:
            raise EvalError(f"{self.name}: prelude did not define {name}")
        return loc.value

    def run_prelude(self, name=None):
        self.interp.run_kernel_program(prelude_program(name or self.name), env=self.env, echo=False)

    def export(self):
        for name in self.exports:
            loc = self.env.local_lookup(name)
            if loc is None:
                raise EvalError(f"{self.name}: missing export {name}")
            self.interp.globals.define(name, loc)

    def trace(self, recv, selector, via, node):
        if self.interp.trace_send:
            self.interp.trace(f"#send recv={recv} sel={selector} via={via} node={node}")


def new_interpreter(braid=None, **kwargs):
    """An interpreter with the named object system (or none) preloaded."""
    interp = Interpreter(**kwargs)
    if braid is not None:
        load_braid(interp, braid)
    return interp


def load_braid(interp, braid):
    if braid == "as":
        from . import as_braid as module
    elif braid == "asmi":
        from . import asmi_braid as module
    elif braid == "asmirs":
        from . import asmirs_braid as module
    else:
        raise ValueError(f"unknown object system {braid!r}; choose from {', '.join(BRAID_NAMES)}")
    return module.load(interp)
