"""Exception hierarchy.

Every error carries a ``details`` dict so the CLI can emit machine-readable
diagnostics without parsing messages.
"""

from __future__ import annotations


class RankBSError(Exception):
    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self), **_jsonable(self.details)}


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (int, float, str, bool)) or obj is None:
        return obj
    return str(obj)


# kgraph
class NonBijectiveTheta(RankBSError):
    pass


class CubicConditionViolated(RankBSError):
    pass


class FlipSizeMismatch(RankBSError):
    pass


class LetterOutOfRange(RankBSError):
    pass


class DegreeTooLarge(RankBSError):
    pass


class SizeOverflow(RankBSError):
    pass


# selfsim
class NonBijectiveSigma(RankBSError):
    pass


class ActCompatibilityViolated(RankBSError):
    pass


class AxiomViolated(RankBSError):
    pass


class ZeroRestrictionSum(RankBSError):
    pass


# semigroup
class InvalidLetter(RankBSError):
    pass


class NotRightLCM(RankBSError):
    pass


# periodicity / staralg
class ZeroInput(RankBSError):
    pass


class UnsupportedFamily(RankBSError):
    pass


class DegreesNotEquivalent(RankBSError):
    pass


class RelationFailed(RankBSError):
    pass


class NotGaugeInvariant(RankBSError):
    pass


class NotPseudoFree(RankBSError):
    pass


class ParseError(RankBSError):
    pass
