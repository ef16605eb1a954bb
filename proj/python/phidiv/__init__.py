"""Deformed-exponential divergences on the probability simplex."""

from ._core import (
    Phi,
    PhidivError,
    characterize,
    check_concave,
    check_convexity,
    check_partition,
    check_pinsker,
    check_superadditive,
    divergence,
    g,
    h,
    kl,
    normalize,
    pinsker_constant,
    tsallis,
)

__all__ = [
    "Phi",
    "PhidivError",
    "characterize",
    "check_concave",
    "check_convexity",
    "check_partition",
    "check_pinsker",
    "check_superadditive",
    "divergence",
    "g",
    "h",
    "kl",
    "normalize",
    "pinsker_constant",
    "tsallis",
]
