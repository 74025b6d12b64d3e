"""Trial protocol files: one `utterance_id label [pair_id]` entry per line.

Lines starting with `#` and blank lines are ignored. The optional pair_id
links a genuine utterance with its replayed counterpart for parallel
training.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

from .errors import ProtocolError
from .ioutil import atomic_write_text


class Label(Enum):
    GENUINE = "genuine"
    SPOOF = "spoof"


@dataclass(frozen=True)
class ProtocolEntry:
    utterance_id: str
    label: Label
    pair_id: str | None = None

    def __post_init__(self):
        if not self.utterance_id:
            raise ValueError("utterance_id must be non-empty")


def parse_protocol_text(text: str, source: str = "<protocol>") -> list[ProtocolEntry]:
    entries: list[ProtocolEntry] = []
    seen: set[str] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) not in (2, 3):
            raise ProtocolError(
                f"{source}, line {lineno}: expected 'utterance_id label [pair_id]', got {raw!r}"
            )
        utt, label_token = tokens[0], tokens[1]
        try:
            label = Label(label_token)
        except ValueError:
            raise ProtocolError(
                f"{source}, line {lineno}: unknown label {label_token!r}"
            ) from None
        if utt in seen:
            raise ProtocolError(f"{source}, line {lineno}: duplicate utterance id {utt!r}")
        seen.add(utt)
        entries.append(
            ProtocolEntry(utt, label, tokens[2] if len(tokens) == 3 else None)
        )
    return entries


def parse_protocol(path: str | Path) -> list[ProtocolEntry]:
    return parse_protocol_text(Path(path).read_text(encoding="utf-8"), source=str(path))


def render_protocol(entries: list[ProtocolEntry]) -> str:
    """Format entries back to protocol text (inverse of parse_protocol_text)."""
    lines = []
    for e in entries:
        parts = [e.utterance_id, e.label.value]
        if e.pair_id is not None:
            parts.append(e.pair_id)
        lines.append(" ".join(parts))
    return "\n".join(lines) + ("\n" if lines else "")


def write_protocol(entries: list[ProtocolEntry], path: str | Path) -> None:
    atomic_write_text(path, render_protocol(entries))


def paired_entries(
    entries: list[ProtocolEntry],
) -> list[tuple[ProtocolEntry, ProtocolEntry]]:
    """Match genuine/spoof entries sharing a pair_id, in protocol order.

    Entries without a usable partner are skipped with a warning.
    """
    by_pair: dict[str, list[ProtocolEntry]] = {}
    order: list[str] = []
    for e in entries:
        if e.pair_id is None:
            warnings.warn(f"unpaired utterance {e.utterance_id!r} skipped")
            continue
        if e.pair_id not in by_pair:
            order.append(e.pair_id)
        by_pair.setdefault(e.pair_id, []).append(e)

    pairs = []
    for pid in order:
        group = by_pair[pid]
        genuine = [e for e in group if e.label is Label.GENUINE]
        spoof = [e for e in group if e.label is Label.SPOOF]
        if len(genuine) == 1 and len(spoof) == 1:
            pairs.append((genuine[0], spoof[0]))
        else:
            warnings.warn(
                f"pair {pid!r} needs exactly one genuine and one spoof entry, skipped"
            )
    return pairs
