"""Scalar vector fields with hand-coded derivatives.

Fields come from a small catalogue (``zero``, ``const``, ``linear``, ``sin``,
``cos``, ``tanh``), each scaled by a constant. The catalogue code lets the
compiled scheme kernels evaluate the field without Python callbacks.
``linear`` is unbounded and only meant for closed-form checks on short
horizons.
"""

from dataclasses import dataclass

import numpy as np

from . import kernels
from .errors import ParameterError

_CODES = {
    "zero": kernels.FIELD_ZERO,
    "const": kernels.FIELD_CONST,
    "linear": kernels.FIELD_LINEAR,
    "sin": kernels.FIELD_SIN,
    "cos": kernels.FIELD_COS,
    "tanh": kernels.FIELD_TANH,
}
_BOUNDED = {"zero", "const", "sin", "cos", "tanh"}


@dataclass(frozen=True)
class ScalarField:
    kind: str = "zero"
    scale: float = 1.0

    def __post_init__(self):
        if self.kind not in _CODES:
            raise ParameterError(f"unknown field {self.kind!r}; expected one of {sorted(_CODES)}")

    @property
    def code(self):
        return _CODES[self.kind]

    @property
    def spec(self):
        """``(code, scale)`` pair consumed by :mod:`roughwz.kernels`."""
        return self.code, float(self.scale)

    @property
    def bounded(self) -> bool:
        return self.kind in _BOUNDED

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or self.scale == 0.0

    def eval(self, x):
        return kernels.field_eval(self.code, self.scale, np.asarray(x, dtype=float))[0]

    def d1(self, x):
        return kernels.field_eval(self.code, self.scale, np.asarray(x, dtype=float))[1]

    def d2(self, x):
        return kernels.field_eval(self.code, self.scale, np.asarray(x, dtype=float))[2]

    def d3(self, x):
        x = np.asarray(x, dtype=float)
        c = self.scale
        if self.kind == "sin":
            return -c * np.cos(x)
        if self.kind == "cos":
            return c * np.sin(x)
        if self.kind == "tanh":
            t = np.tanh(x)
            return c * (1.0 - t * t) * (6.0 * t * t - 2.0)
        return 0.0 * x

    def __call__(self, x):
        return self.eval(x)

    def sup_norms(self):
        """``(|f|, |f'|, |f''|, |f'''|)`` sup-norms, ``inf`` for unbounded fields."""
        c = abs(self.scale)
        if self.kind == "zero":
            return (0.0, 0.0, 0.0, 0.0)
        if self.kind == "const":
            return (c, 0.0, 0.0, 0.0)
        if self.kind == "linear":
            return (np.inf, c, 0.0, 0.0)
        if self.kind == "tanh":
            return (c, c, c * 4.0 / (3.0 * np.sqrt(3.0)), 2.0 * c)
        return (c, c, c, c)


ZERO = ScalarField("zero")


def field(kind: str, scale: float = 1.0) -> ScalarField:
    return ScalarField(kind, scale)


def parse_field(text: str) -> ScalarField:
    """Parse ``"sin"``, ``"0.5*tanh"`` or ``"const:2"`` style field names."""
    text = text.strip()
    if ":" in text:
        kind, scale = text.split(":", 1)
        return ScalarField(kind.strip(), float(scale))
    if "*" in text:
        scale, kind = text.split("*", 1)
        return ScalarField(kind.strip(), float(scale))
    return ScalarField(text)
