"""Parse, preprocess, ground and emit in one call."""
from __future__ import annotations

import time
from dataclasses import dataclass, field

from .emitter import emit
from .frontend import Script, parse, preprocess
from .grounder import Grounder, GrounderConfig, Residual


@dataclass
class GroundResult:
    script: Script
    groundings: list
    text: str
    grounder: Grounder
    ground_seconds: float
    per_assertion: list = field(default_factory=list)  # (rule counts, rows) per assertion

    @property
    def residuals(self) -> list:
        return [g for g in self.groundings if isinstance(g, Residual)]


def ground_text(text: str, config: GrounderConfig = None) -> GroundResult:
    t0 = time.perf_counter()
    script = preprocess(parse(text))
    grounder = Grounder(script.structure, config)
    groundings, per = [], []
    for a in script.assertions:
        before = grounder.stats.copy()
        groundings.append(grounder.ground_sentence(a))
        per.append(grounder.stats - before)
    out = emit(script, groundings)
    return GroundResult(script, groundings, out, grounder, time.perf_counter() - t0, per)
