"""Game files and report serialization.

A game file is JSON::

    {"label": "...", "states": ["L", "R"], "actions": ["l", "r"],
     "u1": [["1/2", 1], [0, 1]], "u2": [[1, 1], [0, 1]],
     "transition": [["1/2", "1/2"], ["1/2", "1/2"]]}

Numbers may be integers, decimals or "num/den" strings; all are read exactly.
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
from fractions import Fraction
from importlib import resources
from pathlib import Path

from .game import GameSpec
from .rational import fmt, matrix

REQUIRED_KEYS = ("u1", "u2", "transition")


class GameFileError(ValueError):
    """The file is not valid JSON or lacks required fields."""


def parse_game(doc: dict) -> GameSpec:
    """Build a game from a decoded game-file document.

    Raises:
        GameFileError: missing keys or malformed numbers.
        chain.ChainError: the transition matrix is invalid (raised by GameSpec).
    """
    if not isinstance(doc, dict):
        raise GameFileError("game file must contain a JSON object")
    missing = [k for k in REQUIRED_KEYS if k not in doc]
    if missing:
        raise GameFileError(f"game file is missing {', '.join(missing)}")
    try:
        u1, u2, p = matrix(doc["u1"]), matrix(doc["u2"]), matrix(doc["transition"])
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise GameFileError(f"bad number in game file: {exc}") from exc
    return GameSpec(
        u1=u1,
        u2=u2,
        p=p,
        states=tuple(doc.get("states", ())),
        actions=tuple(doc.get("actions", ())),
        label=str(doc.get("label", "")),
    )


def load_game(path) -> GameSpec:
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise GameFileError(f"{path}: {exc}") from exc
    return parse_game(doc)


def game_to_doc(game: GameSpec) -> dict:
    return {
        "label": game.label,
        "states": list(game.states),
        "actions": list(game.actions),
        "u1": encode(game.u1),
        "u2": encode(game.u2),
        "transition": encode(game.p),
    }


def bundled_path(name: str):
    """Path of a game file shipped with the package (``name`` without extension)."""
    return resources.files("markovtalk") / "games" / f"{name}.json"


def load_bundled(name: str) -> GameSpec:
    ref = bundled_path(name)
    try:
        return parse_game(json.loads(ref.read_text()))
    except json.JSONDecodeError as exc:
        raise GameFileError(f"{name}: {exc}") from exc


def encode(obj):
    """JSON-ready copy: rationals become "num/den", tuples lists, dataclasses dicts.

    Plain ints (indices, counts) stay ints.
    """
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, Fraction):
        return fmt(obj)
    if isinstance(obj, int):
        return obj
    if isinstance(obj, float):
        return float(f"{obj:.12g}")
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return {f.name: encode(getattr(obj, f.name)) for f in dataclasses.fields(obj)}
    if hasattr(obj, "_asdict"):
        return {k: encode(v) for k, v in obj._asdict().items()}
    if isinstance(obj, dict):
        return {str(k): encode(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [encode(v) for v in obj]
    if isinstance(obj, (set, frozenset)):
        return [encode(v) for v in sorted(obj)]
    raise TypeError(f"cannot encode {type(obj).__name__}")


@dataclasses.dataclass
class ReportBundle:
    """Analysis outputs keyed by command; every leaf is a JSON scalar."""

    data: dict

    @classmethod
    def build(cls, **sections) -> "ReportBundle":
        return cls(encode(sections))

    def to_json(self) -> str:
        return json.dumps(self.data, indent=2, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "ReportBundle":
        return cls(json.loads(text))


def float_cell(x) -> str:
    return "" if x is None else f"{float(x):.12g}"


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()
