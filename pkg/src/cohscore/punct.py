"""Misused-case classification: diff author punctuation against a restoration reference.

Both label sequences derive from the same punctuation-stripped text, so the
comparison is a positional walk over slots rather than an edit-distance
alignment. Six counters cover the cases: del_* (author mark where the
reference has none), ins_* (author missing a reference mark) and rep_*
(author used the other mark; named by the reference's mark).
"""

from __future__ import annotations

import csv
import hashlib
import json
from dataclasses import dataclass, fields
from typing import Iterable, Mapping

from .corpus import PunctLabelSeq, SlotLabel, derive_labels, normalize_punct


class AlignmentError(ValueError):
    """Base texts disagree; carries the first differing character index."""

    def __init__(self, index: int, message: str | None = None):
        self.index = index
        super().__init__(message or f"base texts differ at character {index}")


@dataclass(frozen=True)
class PunctErrorCounts:
    del_comma: int = 0
    ins_comma: int = 0
    rep_comma: int = 0
    del_period: int = 0
    ins_period: int = 0
    rep_period: int = 0

    def __add__(self, other: "PunctErrorCounts") -> "PunctErrorCounts":
        return PunctErrorCounts(
            *(getattr(self, f.name) + getattr(other, f.name) for f in fields(self))
        )

    def total(self) -> int:
        return sum(getattr(self, f.name) for f in fields(self))

    def as_dict(self) -> dict[str, int]:
        return {f"num_{f.name}": getattr(self, f.name) for f in fields(self)}


# (original, reference) -> counter name; matching slots contribute nothing.
_CASE_TABLE = {
    (SlotLabel.COMMA, SlotLabel.NONE): "del_comma",
    (SlotLabel.NONE, SlotLabel.COMMA): "ins_comma",
    (SlotLabel.PERIOD, SlotLabel.COMMA): "rep_comma",
    (SlotLabel.PERIOD, SlotLabel.NONE): "del_period",
    (SlotLabel.NONE, SlotLabel.PERIOD): "ins_period",
    (SlotLabel.COMMA, SlotLabel.PERIOD): "rep_period",
}


def _first_mismatch(a: str, b: str) -> int:
    for i, (ca, cb) in enumerate(zip(a, b)):
        if ca != cb:
            return i
    return min(len(a), len(b))


def align_and_count(original: PunctLabelSeq, reference: PunctLabelSeq) -> PunctErrorCounts:
    """Count per-slot label disagreements between author and reference."""
    if original.base != reference.base:
        raise AlignmentError(_first_mismatch(original.base, reference.base))
    counts = {name: 0 for name in _CASE_TABLE.values()}
    for orig, ref in zip(original.labels, reference.labels):
        case = _CASE_TABLE.get((orig, ref))
        if case is not None:
            counts[case] += 1
    return PunctErrorCounts(**counts)


def count_essay(essay_text: str, reference: PunctLabelSeq) -> PunctErrorCounts:
    """Normalize the raw essay, derive its labels and diff against the reference."""
    return align_and_count(derive_labels(normalize_punct(essay_text)), reference)


def base_sha256(base: str) -> str:
    return hashlib.sha256(base.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class ReferenceLabels:
    """One punct_labels.jsonl record: labels plus the hash of the base they cover."""

    essay_id: str
    base_sha256: str
    labels: tuple[SlotLabel, ...]


def read_punct_labels(path: str) -> dict[str, ReferenceLabels]:
    refs: dict[str, ReferenceLabels] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            obj = json.loads(line)
            try:
                labels = tuple(SlotLabel(v) for v in obj["labels"])
                rec = ReferenceLabels(obj["essay_id"], obj["base_sha256"], labels)
            except (KeyError, ValueError) as exc:
                raise ValueError(f"{path}:{lineno}: bad punctuation label record: {exc}") from exc
            if rec.essay_id in refs:
                raise ValueError(f"{path}:{lineno}: duplicate essay id {rec.essay_id!r}")
            refs[rec.essay_id] = rec
    return refs


def write_punct_labels(path: str, records: Iterable[ReferenceLabels]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(
                json.dumps(
                    {
                        "essay_id": rec.essay_id,
                        "base_sha256": rec.base_sha256,
                        "labels": [int(v) for v in rec.labels],
                    },
                    ensure_ascii=False,
                )
                + "\n"
            )


def resolve_reference(essay_text: str, record: ReferenceLabels) -> PunctLabelSeq:
    """Attach file labels to the essay's own base text, hash-checked first.

    The hash mismatch path signals a misbehaving extractor (it stripped the
    text differently than this package would).
    """
    stripped = derive_labels(normalize_punct(essay_text))
    digest = base_sha256(stripped.base)
    if digest != record.base_sha256:
        raise ValueError(
            f"essay {record.essay_id!r}: base hash mismatch "
            f"(expected {digest}, labels file has {record.base_sha256})"
        )
    if len(record.labels) != len(stripped.base):
        raise ValueError(
            f"essay {record.essay_id!r}: {len(record.labels)} labels for "
            f"{len(stripped.base)} characters"
        )
    return PunctLabelSeq(stripped.base, record.labels)


COUNTS_CSV_HEADER = [
    "essay_id",
    "num_del_comma",
    "num_ins_comma",
    "num_rep_comma",
    "num_del_period",
    "num_ins_period",
    "num_rep_period",
]


def write_counts_csv(path: str, rows: Mapping[str, PunctErrorCounts]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(COUNTS_CSV_HEADER)
        for essay_id, counts in rows.items():
            d = counts.as_dict()
            writer.writerow([essay_id] + [d[name] for name in COUNTS_CSV_HEADER[1:]])
