"""Continuous-variable circuit container shared by the GKP and RSB compilers."""

from __future__ import annotations

from dataclasses import dataclass, field


@dataclass(frozen=True)
class Primitive:
    """RSB primitive: a coherent state of amplitude ``alpha`` or the ideal limit."""

    kind: str = "ideal"
    alpha: float | None = None

    def __post_init__(self):
        if self.kind not in ("ideal", "coherent"):
            raise ValueError(f"unknown primitive kind {self.kind!r}")
        if self.kind == "coherent" and (self.alpha is None or self.alpha <= 0):
            raise ValueError("coherent primitive needs a positive amplitude")

    def __str__(self):
        return "ideal" if self.kind == "ideal" else f"coherent:{self.alpha:g}"


@dataclass
class CvCircuit:
    """Gate list plus code metadata.

    ``inputs`` maps a mode to its logical basis index (default 0) and
    ``input_lines`` remembers where each ``init`` came from, for errors.
    """

    family: str
    d1: int
    n_modes: int
    gates: list = field(default_factory=list)
    inputs: dict = field(default_factory=dict)
    input_lines: dict = field(default_factory=dict)
    N: int | None = None
    primitive: Primitive | None = None

    def input_index(self, mode) -> int:
        return self.inputs.get(mode, 0)

    def measured_modes(self):
        return [g.modes[0] for g in self.gates if g.kind in ("homodyne", "phasemeas")]
