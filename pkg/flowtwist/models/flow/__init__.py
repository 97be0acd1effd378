from .model import ONE, ZERO, FlowedWord, Piece

__all__ = ["Piece", "FlowedWord", "ZERO", "ONE"]
