from __future__ import annotations

import math
from dataclasses import asdict, dataclass


@dataclass(frozen=True)
class IntegralEstimate:
    """Value of an integral with its uncertainty.

    ``std_error`` is a statistical standard error for Monte Carlo estimates and
    an error bound (difference between two resolutions) for deterministic rules.
    """

    value: float
    std_error: float = 0.0
    samples_used: int = 0

    def __post_init__(self):
        if self.std_error < 0 or math.isnan(self.std_error):
            raise ValueError(f"std_error must be nonnegative, got {self.std_error}")

    def scaled(self, factor: float) -> "IntegralEstimate":
        return IntegralEstimate(self.value * factor, self.std_error * abs(factor), self.samples_used)

    def __add__(self, other: "IntegralEstimate") -> "IntegralEstimate":
        return IntegralEstimate(
            self.value + other.value,
            math.hypot(self.std_error, other.std_error),
            self.samples_used + other.samples_used,
        )

    def to_dict(self) -> dict:
        return asdict(self)


ZERO = IntegralEstimate(0.0, 0.0, 0)
