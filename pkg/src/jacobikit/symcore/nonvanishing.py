"""Decision procedure for "this Scalar vanishes nowhere".

An exp-unit is certified globally.  Anything else is checked exactly at the
supplied rational sample points, keeping exponentials symbolic in ``e`` so the
zero test at a sample stays exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Dict, Iterable, Mapping, Optional

from ..errors import InconclusiveError
from .scalar import Scalar, as_scalar


class Nonvanishing(str, Enum):
    UNIT = "UNIT"
    ZERO = "ZERO"
    NONVANISHING_ON_SAMPLES = "NONVANISHING_ON_SAMPLES"
    VANISHES_AT_SAMPLE = "VANISHES_AT_SAMPLE"

    @property
    def ok(self) -> bool:
        return self in (Nonvanishing.UNIT, Nonvanishing.NONVANISHING_ON_SAMPLES)


@dataclass(frozen=True)
class NonvanishingResult:
    status: Nonvanishing
    witness: Optional[Dict[str, Fraction]] = None

    @property
    def ok(self) -> bool:
        return self.status.ok


def classify_nonvanishing(s, samples: Iterable[Mapping[str, Fraction]] = ()) -> NonvanishingResult:
    """Classify ``s`` as UNIT, ZERO, or by its values at ``samples``.

    Raises InconclusiveError when no certificate applies and no samples are given.
    A sample at which ``s`` has a pole propagates PoleError.
    """
    s = as_scalar(s)
    if s.is_zero():
        return NonvanishingResult(Nonvanishing.ZERO)
    if s.is_unit():
        return NonvanishingResult(Nonvanishing.UNIT)
    samples = [dict(p) for p in samples]
    if not samples:
        raise InconclusiveError(f"cannot certify that {s} vanishes nowhere without sample points")
    for point in samples:
        if s.specialize(point).is_zero():
            return NonvanishingResult(Nonvanishing.VANISHES_AT_SAMPLE, {k: Fraction(v) for k, v in point.items()})
    return NonvanishingResult(Nonvanishing.NONVANISHING_ON_SAMPLES)


def value_at(s: Scalar, point) -> Scalar:
    """Exact value at a rational point (exponentials as powers of e)."""
    return as_scalar(s).specialize(point)
