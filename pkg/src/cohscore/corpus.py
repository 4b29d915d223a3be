"""Essay ingestion, punctuation normalization, sentence segmentation and slot labels.

Everything downstream works on normalized text, where the only punctuation
left is the full-width comma （，）and the full-width period （。）. A slot
label records which of the two marks (or neither) follows each character of
the punctuation-stripped text.
"""

from __future__ import annotations

import json
import unicodedata
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Optional

COMMA_CHAR = "，"
PERIOD_CHAR = "。"

# Marks folded into the two-mark space. Everything else that is Unicode
# punctuation gets deleted outright.
_FOLD_TO_COMMA = frozenset({"：", ":", ",", COMMA_CHAR})
_FOLD_TO_PERIOD = frozenset({"；", ";", "？", "?", "！", "!", ".", PERIOD_CHAR})


class SlotLabel(IntEnum):
    """Punctuation that follows a character: 0 none, 1 comma, 2 period."""

    NONE = 0
    COMMA = 1
    PERIOD = 2


class CorpusError(ValueError):
    """Raised on malformed corpus files or invalid essay records."""


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def normalize_punct(text: str) -> str:
    """Fold punctuation into the two-mark space {，, 。}.

    Colons become commas; semicolons, question and exclamation marks become
    periods; ASCII comma/period become their full-width counterparts. Any
    other Unicode punctuation (quotes, brackets, dashes, ellipsis, the
    enumeration mark 、) is deleted. Non-punctuation characters pass through
    unchanged. Idempotent.
    """
    out = []
    for ch in text:
        if ch in _FOLD_TO_COMMA:
            out.append(COMMA_CHAR)
        elif ch in _FOLD_TO_PERIOD:
            out.append(PERIOD_CHAR)
        elif _is_punct(ch):
            continue
        else:
            out.append(ch)
    return "".join(out)


def split_sentences(text: str) -> list[str]:
    """Split normalized text into sentences after each 。.

    A trailing segment with no terminal period is emitted as a final
    sentence. Whitespace-only segments are dropped; for inputs without such
    segments, joining the result restores the input exactly.
    """
    sentences = []
    start = 0
    for i, ch in enumerate(text):
        if ch == PERIOD_CHAR:
            sentences.append(text[start : i + 1])
            start = i + 1
    if start < len(text):
        sentences.append(text[start:])
    return [s for s in sentences if s.strip()]


@dataclass(frozen=True)
class PunctLabelSeq:
    """A punctuation-free character sequence plus one slot label per character."""

    base: str
    labels: tuple[SlotLabel, ...]

    def __post_init__(self) -> None:
        if len(self.base) != len(self.labels):
            raise CorpusError(
                f"label sequence length {len(self.labels)} != base length {len(self.base)}"
            )
        if COMMA_CHAR in self.base or PERIOD_CHAR in self.base:
            raise CorpusError("base text still contains punctuation marks")


_MARK_FOR_LABEL = {SlotLabel.COMMA: COMMA_CHAR, SlotLabel.PERIOD: PERIOD_CHAR}


def derive_labels(text: str) -> PunctLabelSeq:
    """Strip ，and 。from normalized text and record them as slot labels.

    When a character is followed by a run of marks, the first mark of the
    run wins and the rest are dropped. Marks before the first character are
    dropped.
    """
    base: list[str] = []
    labels: list[SlotLabel] = []
    in_run = False
    for ch in text:
        if ch == COMMA_CHAR or ch == PERIOD_CHAR:
            if base and not in_run:
                labels[-1] = SlotLabel.COMMA if ch == COMMA_CHAR else SlotLabel.PERIOD
            in_run = True
        else:
            base.append(ch)
            labels.append(SlotLabel.NONE)
            in_run = False
    return PunctLabelSeq("".join(base), tuple(labels))


def reinsert_labels(seq: PunctLabelSeq) -> str:
    """Inverse of derive_labels for texts without mark runs or leading marks."""
    out = []
    for ch, label in zip(seq.base, seq.labels):
        out.append(ch)
        if label != SlotLabel.NONE:
            out.append(_MARK_FOR_LABEL[label])
    return "".join(out)


@dataclass
class Essay:
    """One identified essay; level is the optional gold coherence rating 0/1/2."""

    id: str
    paragraphs: list[str]
    title: Optional[str] = None
    level: Optional[int] = None

    def __post_init__(self) -> None:
        if not self.id:
            raise CorpusError("essay id must be nonempty")
        if any(p == "" for p in self.paragraphs):
            raise CorpusError(f"essay {self.id!r}: empty paragraph")
        if self.level is not None and self.level not in (0, 1, 2):
            raise CorpusError(f"essay {self.id!r}: level must be 0, 1, 2 or null")

    def text(self) -> str:
        """Paragraphs joined without separators (canonical punctuation view)."""
        return "".join(self.paragraphs)

    def sentences(self) -> list[str]:
        """Normalized sentences, segmented per paragraph and concatenated."""
        out: list[str] = []
        for para in self.paragraphs:
            out.extend(split_sentences(normalize_punct(para)))
        return out


def read_essays(path: str) -> list[Essay]:
    """Read an essays.jsonl file, validating schema and id uniqueness."""
    essays: list[Essay] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise CorpusError(f"{path}:{lineno}: expected an object")
            try:
                essay = Essay(
                    id=obj["id"],
                    paragraphs=list(obj.get("paragraphs") or []),
                    title=obj.get("title"),
                    level=obj.get("level"),
                )
            except (KeyError, TypeError, CorpusError) as exc:
                raise CorpusError(f"{path}:{lineno}: {exc}") from exc
            if essay.id in seen:
                raise CorpusError(f"{path}:{lineno}: duplicate essay id {essay.id!r}")
            seen.add(essay.id)
            essays.append(essay)
    return essays


def write_essays(path: str, essays: Iterable[Essay]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for e in essays:
            fh.write(
                json.dumps(
                    {"id": e.id, "title": e.title, "paragraphs": e.paragraphs, "level": e.level},
                    ensure_ascii=False,
                )
                + "\n"
            )
