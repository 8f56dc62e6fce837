"""Oracles: compute advice payloads from the full sequence."""

import logging
from collections import Counter
from typing import Sequence

from ..core import Vec2
from ..restricted import GroupTag, RestrictedParams, classify
from ..scaled import ScaledMode, ScaledParams, box_of, is_short
from .payload import RestrictedAdvice, ScaledAdvice

__all__ = [
    "oracle_restricted",
    "oracle_scaled",
]

logger = logging.getLogger(__name__)


def oracle_restricted(sigma: Sequence[Vec2], params: RestrictedParams) -> RestrictedAdvice:
    """Per-strip counts of large, medium and small vectors.

    Tiny and huge vectors are not counted. Raises OutOfConeError for a vector
    outside the cone.
    """
    counts = {tag: [0] * params.k for tag in (GroupTag.LARGE, GroupTag.MEDIUM, GroupTag.SMALL)}
    for v in sigma:
        group = classify(v, params)
        if group.tag in counts:
            counts[group.tag][group.strip - 1] += 1

    payload = RestrictedAdvice(
        large=tuple(counts[GroupTag.LARGE]),
        medium=tuple(counts[GroupTag.MEDIUM]),
        small=tuple(counts[GroupTag.SMALL]),
        n=len(sigma),
    )
    logger.debug(
        "Restricted advice: L=%d M=%d S=%d over n=%d",
        sum(payload.large),
        sum(payload.medium),
        sum(payload.small),
        len(sigma),
    )
    return payload


def oracle_scaled(
    sigma: Sequence[Vec2],
    k: int,
    mode: ScaledMode = ScaledMode.DESK,
) -> ScaledAdvice:
    """Number of long vectors per (i, j)-box; short vectors are not reported.

    ``k`` is checked against ``mode``: odd k is only accepted in diagnostic mode.
    """
    k = ScaledParams(k, mode).k
    counts = Counter(box_of(v, k) for v in sigma if not is_short(v, k))
    logger.debug("Scaled advice: %d long vectors in %d boxes", counts.total(), len(counts))
    return ScaledAdvice(k=k, counts=dict(sorted(counts.items())), n=len(sigma))
