"""Exception types shared across the package."""


class TspQuboError(Exception):
    """Base class for all package errors."""


class ParseError(TspQuboError):
    """A TSPLIB file could not be parsed; the message names the offending line."""


class StructureError(ParseError):
    """Header and data sections disagree (bad counts, bad dimension, asymmetry)."""


class UnsupportedFeatureError(ParseError):
    """The file uses a TSPLIB feature this parser deliberately does not support."""


class ValidationError(TspQuboError):
    """An input value violates a documented precondition."""


class SizeLimitError(TspQuboError):
    """A problem exceeds the enforced size bound of an exhaustive method."""
