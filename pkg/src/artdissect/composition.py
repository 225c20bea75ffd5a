"""Composition descriptors derived from a dissection: the direction pair of
the first two cuts, the horizon proportion r_c and the per-step gain profile."""
from __future__ import annotations

import enum
from dataclasses import dataclass

from .dissection import DissectionResult, Direction
from .errors import NotHorizontalFirst
from .ingest import QuantizedImage


class DissectionPair(str, enum.Enum):
    HH = "HH"
    HV = "HV"
    VH = "VH"
    VV = "VV"
    UNDETERMINED = "Underdetermined"

    @property
    def determinate(self) -> bool:
        return self is not DissectionPair.UNDETERMINED


DETERMINATE_PAIRS = (DissectionPair.HH, DissectionPair.HV, DissectionPair.VH, DissectionPair.VV)


@dataclass(frozen=True)
class GainProfile:
    gains_bits: list[float]
    entropy_bits: float
    normalized: list[float]


@dataclass(frozen=True)
class CompositionRecord:
    painting_id: str
    pair: DissectionPair
    r_c: float | None
    gain_profile: GainProfile
    first_cut_direction: Direction | None


def classify_pair(result: DissectionResult) -> DissectionPair:
    if result.n_cuts < 2:
        return DissectionPair.UNDETERMINED
    letters = "".join(s.cut.direction.letter for s in result.cuts[:2])
    return DissectionPair(letters)


def compositional_proportion(result: DissectionResult, img: QuantizedImage | None = None,
                             from_top: bool = True) -> float:
    """Height fraction of the first horizontal cut.

    With ``from_top`` (the default) this is the share of the canvas above the
    cut; otherwise the share below it.
    """
    if not result.cuts or result.cuts[0].cut.direction is not Direction.HORIZONTAL:
        raise NotHorizontalFirst("first cut is vertical" if result.cuts else "no cuts were made")
    h = result.height if img is None else img.height
    offset = result.cuts[0].cut.offset
    return offset / h if from_top else (h - offset) / h


def gain_profile(result: DissectionResult) -> GainProfile:
    gains = list(result.gains_bits)
    h = result.entropy_bits
    normalized = [g / h for g in gains] if h > 0 else [0.0] * len(gains)
    return GainProfile(gains, h, normalized)


def describe(result: DissectionResult, painting_id: str = "", from_top: bool = True) -> CompositionRecord:
    """Bundle pair, r_c and gain profile into one record."""
    first = result.cuts[0].cut.direction if result.cuts else None
    r_c = compositional_proportion(result, from_top=from_top) if first is Direction.HORIZONTAL else None
    return CompositionRecord(painting_id, classify_pair(result), r_c, gain_profile(result), first)
