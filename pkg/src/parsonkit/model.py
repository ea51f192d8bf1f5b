"""Authored problem format: block taxonomy, validation, canonical rendering.

A :class:`ProblemSpec` is the single authored source from which every
learner-facing representation is derived.  Specs are immutable after load and
safe to share across threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

from .textnorm import lines_equal, normalize

PLACEHOLDER = "___"
INDENT_UNIT = "    "  # one indent level == 4 spaces when rendering
DEFAULT_TIME_LIMIT_S = 600

CATEGORIES = (
    "list-manipulation",
    "string-manipulation",
    "counting-iteration",
    "middle-element",
    "other",
)


class Representation(str, Enum):
    WRITE_CODE = "WriteCode"
    PARSONS_2D = "Parsons2D"
    FADED_PARSONS = "FadedParsons"
    PSEUDOCODE_PARSONS = "PseudocodeParsons"
    FIX_CODE = "FixCode"


PARSONS_FAMILY = frozenset(
    {
        Representation.PARSONS_2D,
        Representation.FADED_PARSONS,
        Representation.PSEUDOCODE_PARSONS,
    }
)


@dataclass(frozen=True)
class Blank:
    """A fill-in gap within a block's text."""

    index: int
    answer: str
    hint_type: str | None = None


@dataclass(frozen=True)
class FixCodeAnnotation:
    """A deliberate bug: learners see ``buggy_text`` and must produce
    ``corrected_text``."""

    buggy_text: str
    corrected_text: str


@dataclass(frozen=True)
class SolutionBlock:
    id: str
    text: str
    indent: int = 0
    blanks: tuple[Blank, ...] = ()
    fixcode: FixCodeAnnotation | None = None

    def filled_text(self, fills: list[str] | None = None) -> str:
        """Text with placeholders replaced.

        With no ``fills``, the canonical answers are used.  Empty fills leave
        the placeholder marker in place (it renders verbatim downstream).
        """
        if fills is None:
            fills = [b.answer for b in self.blanks]
        parts = self.text.split(PLACEHOLDER)
        out = [parts[0]]
        for k, rest in enumerate(parts[1:]):
            value = fills[k] if k < len(fills) and fills[k].strip() else PLACEHOLDER
            out.append(value)
            out.append(rest)
        return "".join(out)

    def canonical_text(self) -> str:
        """Fully resolved text: blanks answered, fix-code corrected."""
        if self.fixcode is not None:
            return self.fixcode.corrected_text
        return self.filled_text()


@dataclass(frozen=True)
class DistractorBlock:
    id: str
    text: str
    pair_target: str | None = None
    indent_shown: int = 0


@dataclass(frozen=True)
class TestCase:
    ordinal: int
    call: str
    expected: str
    explanation: str | None = None


@dataclass(frozen=True)
class ValidationIssue:
    field: str
    rule: str

    def __str__(self) -> str:  # pragma: no cover - display helper
        return f"{self.field}: {self.rule}"


@dataclass(frozen=True)
class ProblemSpec:
    id: str
    title: str
    prompt: str
    category: str
    language: str
    solution_blocks: tuple[SolutionBlock, ...]
    distractors: tuple[DistractorBlock, ...] = ()
    pseudocode_lines: tuple[str, ...] = ()
    test_cases: tuple[TestCase, ...] = ()
    time_limit: int = DEFAULT_TIME_LIMIT_S
    merge_groups: tuple[tuple[str, ...], ...] = ()

    def block_by_id(self, block_id: str) -> SolutionBlock | None:
        for block in self.solution_blocks:
            if block.id == block_id:
                return block
        return None

    def distractor_by_id(self, block_id: str) -> DistractorBlock | None:
        for block in self.distractors:
            if block.id == block_id:
                return block
        return None

    def available_representations(self) -> list[Representation]:
        reps = [Representation.WRITE_CODE, Representation.PARSONS_2D,
                Representation.FADED_PARSONS]
        if self.pseudocode_lines:
            reps.append(Representation.PSEUDOCODE_PARSONS)
        if any(b.fixcode for b in self.solution_blocks):
            reps.append(Representation.FIX_CODE)
        return reps


def validate_spec(spec: ProblemSpec) -> list[ValidationIssue]:
    """Check every authored-content invariant; issues are data, not failures."""
    issues: list[ValidationIssue] = []

    if not spec.solution_blocks:
        issues.append(ValidationIssue("solution_blocks", "solution_blocks empty"))
        return issues

    if spec.category not in CATEGORIES:
        issues.append(ValidationIssue("category", f"unknown category {spec.category!r}"))

    if spec.solution_blocks[0].indent != 0:
        issues.append(ValidationIssue("solution_blocks[0].indent", "block 0 must be at level 0"))

    seen_ids: set[str] = set()
    for n, block in enumerate(spec.solution_blocks):
        where = f"solution_blocks[{n}]"
        if block.id in seen_ids:
            issues.append(ValidationIssue(where, f"duplicate block id {block.id!r}"))
        seen_ids.add(block.id)
        if block.indent < 0:
            issues.append(ValidationIssue(where, "negative indent level"))
        marker_count = block.text.count(PLACEHOLDER)
        if block.blanks and marker_count != len(block.blanks):
            issues.append(
                ValidationIssue(where, f"{len(block.blanks)} blanks but {marker_count} placeholder markers")
            )
        for blank in block.blanks:
            if not normalize(blank.answer):
                issues.append(ValidationIssue(where, f"blank {blank.index} answer empty"))
        if block.fixcode is not None and lines_equal(block.fixcode.buggy_text, block.fixcode.corrected_text):
            issues.append(ValidationIssue(where, "fix-code buggy and corrected text are equivalent"))

    if spec.pseudocode_lines and len(spec.pseudocode_lines) != len(spec.solution_blocks):
        issues.append(
            ValidationIssue(
                "pseudocode_lines",
                f"{len(spec.pseudocode_lines)} pseudocode lines for {len(spec.solution_blocks)} solution blocks",
            )
        )

    solution_ids = {b.id for b in spec.solution_blocks}
    for n, distractor in enumerate(spec.distractors):
        where = f"distractors[{n}]"
        if distractor.id in seen_ids:
            issues.append(ValidationIssue(where, f"duplicate block id {distractor.id!r}"))
        seen_ids.add(distractor.id)
        if distractor.pair_target is not None:
            target = spec.block_by_id(distractor.pair_target)
            if target is None:
                issues.append(ValidationIssue(where, "dangling pair_target"))
            elif lines_equal(distractor.text, target.canonical_text()):
                issues.append(ValidationIssue(where, "distractor text equals its pair target"))

    ordinals = [t.ordinal for t in spec.test_cases]
    if ordinals != list(range(1, len(ordinals) + 1)):
        issues.append(ValidationIssue("test_cases", "ordinals not contiguous from 1"))

    for group in spec.merge_groups:
        if len(group) < 2 or not all(bid in solution_ids for bid in group):
            issues.append(ValidationIssue("merge_groups", f"bad merge group {list(group)}"))

    if spec.time_limit <= 0:
        issues.append(ValidationIssue("time_limit", "time limit must be positive"))

    return issues


def render_line(text: str, indent: int) -> str:
    """Render one block at an indent level; multi-line blocks keep their
    embedded relative indentation."""
    prefix = INDENT_UNIT * indent
    return "\n".join(prefix + line for line in text.splitlines() or [""])


def canonical_program(spec: ProblemSpec) -> str:
    """The reference program: blocks in order, blanks answered, bugs fixed."""
    issues = validate_spec(spec)
    if issues:
        from .errors import InvalidSpec

        raise InvalidSpec("; ".join(str(i) for i in issues))
    return "\n".join(render_line(b.canonical_text(), b.indent) for b in spec.solution_blocks)


# ---------------------------------------------------------------------------
# JSON corpus format


def spec_to_dict(spec: ProblemSpec) -> dict:
    doc = {
        "id": spec.id,
        "title": spec.title,
        "prompt": spec.prompt,
        "category": spec.category,
        "language": spec.language,
        "solution_blocks": [
            {
                "id": b.id,
                "text": b.text,
                "indent": b.indent,
                "blanks": [
                    {"index": blank.index, "answer": blank.answer, "hint_type": blank.hint_type}
                    for blank in b.blanks
                ],
                "fixcode": (
                    {"buggy_text": b.fixcode.buggy_text, "corrected_text": b.fixcode.corrected_text}
                    if b.fixcode
                    else None
                ),
            }
            for b in spec.solution_blocks
        ],
        "distractors": [
            {"id": d.id, "text": d.text, "pair_target": d.pair_target, "indent_shown": d.indent_shown}
            for d in spec.distractors
        ],
        "pseudocode_lines": list(spec.pseudocode_lines),
        "test_cases": [
            {"ordinal": t.ordinal, "call": t.call, "expected": t.expected, "explanation": t.explanation}
            for t in spec.test_cases
        ],
        "time_limit": spec.time_limit,
    }
    if spec.merge_groups:
        doc["merge_groups"] = [list(g) for g in spec.merge_groups]
    return doc


def spec_from_dict(doc: dict) -> ProblemSpec:
    return ProblemSpec(
        id=doc["id"],
        title=doc["title"],
        prompt=doc["prompt"],
        category=doc["category"],
        language=doc.get("language", "python"),
        solution_blocks=tuple(
            SolutionBlock(
                id=b["id"],
                text=b["text"],
                indent=b.get("indent", 0),
                blanks=tuple(
                    Blank(index=x["index"], answer=x["answer"], hint_type=x.get("hint_type"))
                    for x in b.get("blanks", [])
                ),
                fixcode=(
                    FixCodeAnnotation(
                        buggy_text=b["fixcode"]["buggy_text"],
                        corrected_text=b["fixcode"]["corrected_text"],
                    )
                    if b.get("fixcode")
                    else None
                ),
            )
            for b in doc["solution_blocks"]
        ),
        distractors=tuple(
            DistractorBlock(
                id=d["id"],
                text=d["text"],
                pair_target=d.get("pair_target"),
                indent_shown=d.get("indent_shown", 0),
            )
            for d in doc.get("distractors", [])
        ),
        pseudocode_lines=tuple(doc.get("pseudocode_lines", [])),
        test_cases=tuple(
            TestCase(
                ordinal=t["ordinal"],
                call=t["call"],
                expected=t["expected"],
                explanation=t.get("explanation"),
            )
            for t in doc.get("test_cases", [])
        ),
        time_limit=doc.get("time_limit", DEFAULT_TIME_LIMIT_S),
        merge_groups=tuple(tuple(g) for g in doc.get("merge_groups", [])),
    )


def load_spec(path: str | Path) -> ProblemSpec:
    with open(path, encoding="utf-8") as fh:
        return spec_from_dict(json.load(fh))


def load_corpus(directory: str | Path) -> dict[str, ProblemSpec]:
    """Load every ``*.json`` problem file in a directory, keyed by id."""
    corpus: dict[str, ProblemSpec] = {}
    for path in sorted(Path(directory).glob("*.json")):
        spec = load_spec(path)
        corpus[spec.id] = spec
    return corpus


def builtin_corpus_dir() -> Path:
    return Path(__file__).parent / "data" / "corpus"
