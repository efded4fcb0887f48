"""Trace monoids, their finitely generated categories, and weak
asynchronous systems, with finite limits and colimits throughout."""

from .errors import TraceError
from .fpcm_cat import Category
from .trace_core import (
    STAR,
    BasicHom,
    Trace,
    TraceMonoid,
    apply,
    compose,
    concat,
    empty_trace,
    equivalent,
    free_commutative_monoid,
    free_monoid,
    identity_hom,
    is_independence_preserving,
    make_hom,
    make_monoid,
    normal_form,
    normalize,
)

__all__ = [
    "STAR",
    "BasicHom",
    "Category",
    "Trace",
    "TraceError",
    "TraceMonoid",
    "apply",
    "compose",
    "concat",
    "empty_trace",
    "equivalent",
    "free_commutative_monoid",
    "free_monoid",
    "identity_hom",
    "is_independence_preserving",
    "make_hom",
    "make_monoid",
    "normal_form",
    "normalize",
]

__version__ = "0.1.0"
