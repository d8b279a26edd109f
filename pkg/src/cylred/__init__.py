"""Reduction by Abelian group actions with cylinder-valued momentum maps."""

from .scalars import FieldMismatchError, FieldSpec, Scalar, embed, format_scalar, parse_scalar

__version__ = "0.1.0"
