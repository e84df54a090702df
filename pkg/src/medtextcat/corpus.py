"""Multi-label corpus loading, writing and OHSUMED conversion.

Canonical format is UTF-8 TSV, one document per line::

    id<TAB>label1;label2<TAB>text
"""

import logging
import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

logger = logging.getLogger(__name__)

LABEL_SEP = ";"


class CorpusFormatError(ValueError):
    """Raised for malformed canonical corpus files or invalid documents."""


@dataclass(frozen=True)
class Document:
    id: str
    labels: FrozenSet[str]
    text: str

    def __post_init__(self):
        if not self.id:
            raise CorpusFormatError("document id must be non-empty")
        if not self.labels:
            raise CorpusFormatError(f"document {self.id!r} has no labels")
        if not self.text.strip():
            raise CorpusFormatError(f"document {self.id!r} has empty text")
        object.__setattr__(self, "labels", frozenset(self.labels))


@dataclass(frozen=True)
class Corpus:
    """An ordered, immutable collection of documents for one split."""

    split: str
    documents: Tuple[Document, ...]
    categories: Tuple[str, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "documents", tuple(self.documents))
        used = set().union(*(d.labels for d in self.documents)) if self.documents else set()
        cats = tuple(self.categories) if self.categories else tuple(sorted(used))
        missing = used - set(cats)
        if missing:
            raise CorpusFormatError(f"labels not among categories: {sorted(missing)}")
        object.__setattr__(self, "categories", cats)
        seen = set()
        for d in self.documents:
            if d.id in seen:
                raise CorpusFormatError(f"duplicate document id {d.id!r}")
            seen.add(d.id)

    def __len__(self):
        return len(self.documents)

    @property
    def texts(self) -> List[str]:
        return [d.text for d in self.documents]

    @property
    def label_sets(self) -> List[FrozenSet[str]]:
        return [d.labels for d in self.documents]


def parse_canonical_line(line: str, lineno: int) -> Document:
    parts = line.split("\t")
    if len(parts) != 3:
        raise CorpusFormatError(f"line {lineno}: expected 3 tab-separated fields, got {len(parts)}")
    doc_id, label_field, text = parts
    labels = frozenset(lab.strip() for lab in label_field.split(LABEL_SEP) if lab.strip())
    if not labels:
        raise CorpusFormatError(f"line {lineno}: empty label field")
    if not doc_id:
        raise CorpusFormatError(f"line {lineno}: empty document id")
    if not text.strip():
        raise CorpusFormatError(f"line {lineno}: empty text")
    return Document(doc_id, labels, text)


def load_canonical(path, split: str = "train") -> Corpus:
    """Load a canonical TSV corpus; documents keep file order."""
    docs = []
    seen = set()
    with open(path, encoding="utf-8", newline="\n") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n").rstrip("\r")
            if not line:
                continue
            doc = parse_canonical_line(line, lineno)
            if doc.id in seen:
                raise CorpusFormatError(f"line {lineno}: duplicate document id {doc.id!r}")
            seen.add(doc.id)
            docs.append(doc)
    if not docs:
        raise CorpusFormatError(f"{path}: no documents")
    return Corpus(split, docs)


def _clean_field(text: str) -> str:
    return " ".join(text.split())


def format_canonical_line(doc: Document) -> str:
    return f"{doc.id}\t{LABEL_SEP.join(sorted(doc.labels))}\t{_clean_field(doc.text)}\n"


def write_canonical(corpus: Corpus, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for doc in corpus.documents:
            fh.write(format_canonical_line(doc))


def category_counts(corpus: Corpus) -> Dict[str, int]:
    """Documents per category; a multi-label document counts once per label."""
    counts = Counter()
    for doc in corpus.documents:
        counts.update(doc.labels)
    return {cat: counts[cat] for cat in corpus.categories if counts[cat]}


# --- OHSUMED -----------------------------------------------------------------

_TAG = re.compile(r"^\.([A-Z])(?:\s+(.*))?$")


def normalize_heading(heading: str) -> str:
    """``'Virus Diseases/*CO'`` -> ``'virus diseases'``."""
    heading = heading.split("/", 1)[0]
    return " ".join(heading.replace("*", " ").split()).lower()


def load_category_map(path) -> Dict[str, str]:
    """Read ``MeSH heading<TAB>category`` lines; ``#`` starts a comment."""
    mapping = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].rstrip()
            if not line.strip():
                continue
            parts = line.split("\t")
            if len(parts) != 2 or not parts[0].strip() or not parts[1].strip():
                raise CorpusFormatError(f"{path} line {lineno}: expected 'heading<TAB>category'")
            mapping[normalize_heading(parts[0])] = parts[1].strip()
    return mapping


def iter_medline_records(lines: Iterable[str]):
    """Yield dicts of tag -> text from field-tagged MEDLINE records.

    A tag's value may share the tag line (``.I 12``) or follow on the next
    lines. A new ``.I`` starts a new record.
    """
    record: Optional[dict] = None
    tag = None
    for raw in lines:
        line = raw.rstrip("\r\n")
        m = _TAG.match(line)
        if m:
            tag = m.group(1)
            if tag == "I":
                if record is not None:
                    yield record
                record = {}
            elif record is None:
                record = {}
            value = m.group(2)
            record.setdefault(tag, [])
            if value:
                record[tag].append(value.strip())
        elif record is not None and tag is not None and line.strip():
            record[tag].append(line.strip())
    if record is not None:
        yield record


@dataclass
class ConversionSummary:
    written: int = 0
    unmapped: int = 0
    missing_abstract: int = 0
    counts: Counter = field(default_factory=Counter)

    def format(self) -> str:
        lines = [f"{cat}\t{n}" for cat, n in sorted(self.counts.items())]
        lines.append(f"written\t{self.written}")
        lines.append(f"dropped_unmapped\t{self.unmapped}")
        lines.append(f"skipped_missing_abstract\t{self.missing_abstract}")
        return "\n".join(lines)


def convert_ohsumed(raw_path, category_map_path, out_path) -> ConversionSummary:
    """Convert a raw OHSUMED file to canonical TSV.

    Records without a ``.W`` abstract are skipped and counted; records whose
    headings map to none of the categories are dropped.
    """
    mapping = load_category_map(category_map_path)
    summary = ConversionSummary()
    seen = set()
    try:
        src = open(raw_path, encoding="utf-8")
    except OSError as exc:
        raise CorpusFormatError(f"cannot read {raw_path}: {exc}") from exc
    with src, open(out_path, "w", encoding="utf-8", newline="\n") as out:
        for rec in iter_medline_records(src):
            abstract = " ".join(rec.get("W", []))
            if not abstract.strip():
                summary.missing_abstract += 1
                continue
            headings = " ".join(rec.get("M", [])).split(";")
            labels = {mapping[h] for h in map(normalize_heading, headings) if h in mapping}
            if not labels:
                summary.unmapped += 1
                continue
            doc_id = " ".join(rec.get("U", [])) or " ".join(rec.get("I", []))
            doc_id = _clean_field(doc_id)
            if not doc_id or doc_id in seen:
                logger.warning("skipping record with missing or duplicate id %r", doc_id)
                continue
            seen.add(doc_id)
            text = _clean_field(" ".join(rec.get("T", []) + [abstract]))
            out.write(format_canonical_line(Document(doc_id, frozenset(labels), text)))
            summary.written += 1
            summary.counts.update(labels)
    if summary.missing_abstract:
        logger.warning("%d records without an abstract were skipped", summary.missing_abstract)
    return summary
