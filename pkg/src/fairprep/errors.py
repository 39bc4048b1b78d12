"""Semantic exception hierarchy.

Every contract violation raises a named subclass of FairprepError so callers
(and the CLI exit-code mapping) can distinguish bad input from internal bugs.
"""


class FairprepError(Exception):
    """Base class for all errors raised by this package."""


# ---------------------------------------------------------------- dataset / schema

class SchemaError(FairprepError):
    """Problems with attribute roles, domains, or CSV structure."""


class MissingRoleError(SchemaError):
    """A CSV header has no entry in the roles config."""


class NoLabelError(SchemaError):
    """The roles config assigns no label attribute."""


class MultipleLabelsError(SchemaError):
    """The roles config assigns more than one label attribute."""


class UnknownCategoryError(SchemaError):
    """A cell value falls outside a pinned domain."""


class EmptyDatasetError(SchemaError):
    """The table has no rows or no columns."""


class IoFailureError(FairprepError):
    """Underlying file I/O failed."""


# ---------------------------------------------------------------- info measures

class InfoError(FairprepError):
    """Invalid inputs to an information-measure computation."""


class EmptyAttrSetError(InfoError):
    pass


class IndexOutOfRangeError(InfoError):
    pass


class SameAttributeError(InfoError):
    pass


class TooManyAttributesError(InfoError):
    pass


class ShapeMismatchError(InfoError):
    pass


# ---------------------------------------------------------------- clique engine

class CliqueError(FairprepError):
    """Invalid inputs to clique construction or scoring."""


class MemberAlreadyInCliqueError(CliqueError):
    pass


class EmptyCliqueError(CliqueError):
    pass


class CandidateTooSmallError(CliqueError):
    pass


class InfeasibleParamsError(CliqueError):
    pass


class EmptyInitError(CliqueError):
    pass


class SeparatorInfeasibleError(CliqueError):
    pass


class TooLargeError(CliqueError):
    """Instance exceeds the exhaustive-search cap."""


# ---------------------------------------------------------------- marginal model

class ModelError(FairprepError):
    """Invalid inputs to marginal fitting or evaluation."""


class AttrMismatchError(ModelError):
    pass


class UnassignedSeparatorError(ModelError):
    pass


class IncompleteRecordError(ModelError):
    pass


# ---------------------------------------------------------------- sampler

class SamplerError(FairprepError):
    pass


class NoFairAttributesError(SamplerError):
    pass


class PlanDatasetMismatchError(SamplerError):
    pass


# ---------------------------------------------------------------- metrics

class MetricError(FairprepError):
    pass


class NonBinaryOutcomeError(MetricError):
    pass


class NoSensitiveVariationError(MetricError):
    pass


class SchemaMismatchError(MetricError):
    pass


class ContextExplosionError(MetricError):
    pass


# ---------------------------------------------------------------- synthetic generator

class SynthError(FairprepError):
    pass


class CyclicSpecError(SynthError):
    pass


class MalformedCptError(SynthError):
    pass


# ---------------------------------------------------------------- config

class ConfigError(FairprepError):
    """Malformed roles config or generator spec document."""
