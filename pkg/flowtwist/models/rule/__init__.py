from .model import GroundMapping, LocalRule, Mapping, PartitionWitness, PatternToken, ValidationReport, tokens

__all__ = ["PatternToken", "Mapping", "LocalRule", "GroundMapping", "PartitionWitness", "ValidationReport", "tokens"]
