import json
from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        return float(obj)
    return obj


@dataclass
class VerificationReport:
    """Outcome of one numerical check, serializable as a flat JSON object."""

    check: str
    params: dict
    passed: bool
    witness: Any = None
    min_value: Optional[float] = None
    argmin: Any = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return bool(self.passed)

    def to_dict(self):
        out = {
            "check": self.check,
            "params": self.params,
            "pass": self.passed,
            "witness": self.witness,
            "min_value": self.min_value,
            "argmin": self.argmin,
        }
        if self.details:
            out["details"] = self.details
        return _plain(out)

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), sort_keys=False, **kwargs)
