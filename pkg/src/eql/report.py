"""Pass/fail reports shared by the checkers and the CLI."""

from dataclasses import dataclass, field


@dataclass
class Report:
    name: str
    ok: bool
    witness: dict | None = None
    details: dict = field(default_factory=dict)

    def __bool__(self):
        return self.ok

    def to_json(self):
        out = {"name": self.name, "pass": self.ok}
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out


def passed(name, **details):
    return Report(name, True, None, details)


def failed(name, witness, **details):
    return Report(name, False, witness, details)
