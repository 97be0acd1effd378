from .model import Relation, expand_inverses, inverse_word

__all__ = ["Relation", "expand_inverses", "inverse_word"]
