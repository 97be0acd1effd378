from .model import BUILTIN_SHIFT, AnchoredWord, VertexShift

__all__ = ["AnchoredWord", "VertexShift", "BUILTIN_SHIFT"]
