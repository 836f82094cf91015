from __future__ import annotations

import json
from dataclasses import dataclass, field


@dataclass
class Transcript:
    """Ordered protocol events plus the final verdict.

    ``params`` carries the public inputs (graphs included) so a transcript can
    be replayed on its own.
    """

    protocol: str
    params: dict
    events: list[dict] = field(default_factory=list)
    verdict: str = "pending"

    def add(self, kind: str, **data) -> dict:
        event = {"type": kind, **data}
        self.events.append(event)
        return event

    @property
    def accepted(self) -> bool:
        return self.verdict == "accept"

    def rounds(self) -> list[list[dict]]:
        out: dict[int, list[dict]] = {}
        for ev in self.events:
            if "round" in ev:
                out.setdefault(ev["round"], []).append(ev)
        return [out[i] for i in sorted(out)]

    def to_dict(self) -> dict:
        return {
            "protocol": self.protocol,
            "params": self.params,
            "events": self.events,
            "verdict": self.verdict,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, **kwargs)

    @classmethod
    def from_dict(cls, doc: dict) -> "Transcript":
        return cls(doc["protocol"], doc["params"], list(doc["events"]), doc["verdict"])
