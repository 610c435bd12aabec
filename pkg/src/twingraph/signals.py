"""Signal payloads and their canonical wire encoding."""

from __future__ import annotations

from dataclasses import dataclass
from decimal import Decimal

from .canon import dumps_canonical


@dataclass(frozen=True)
class SignalPayload:
    """What a signal carries from a measurement toward a decider."""

    signal_id: str
    sensor_id: str
    timestamp: str  # ISO 8601 UTC
    value: Decimal
    unit: str
    measured_type: str
    quality: str | None = None

    def canonical(self) -> str:
        """Single-line JSON, keys sorted, minimal decimal value; bit-exact
        for equal payloads. The quality key appears only when set."""
        body = {
            "measuredType": self.measured_type,
            "sensorId": self.sensor_id,
            "signalId": self.signal_id,
            "timestamp": self.timestamp,
            "unit": self.unit,
            "value": self.value,
        }
        if self.quality is not None:
            body["quality"] = self.quality
        return dumps_canonical(body)
