from .model import PrefixBijection

__all__ = ["PrefixBijection"]
