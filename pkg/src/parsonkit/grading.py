"""Structural grading: block order, indentation, blank fills, fix-code edits.

Grading is pure and deterministic.  Blocks whose normalized text is identical
are interchangeable in order grading (a learner cannot tell them apart), and
learner-added blocks grade as a missing solution block when their text
matches its canonical text.

Order is judged positionally against the solution sequence restricted to the
blocks actually placed; blocks absent from the placement are reported through
``missing_block_ids`` rather than as order errors on everything after them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum

from .errors import TooLarge, UnknownBlockId
from .model import PARSONS_FAMILY, ProblemSpec, Representation, SolutionBlock
from .textnorm import lines_equal

MAX_ENUMERATION_BLOCKS = 8


class OrderVerdict(str, Enum):
    OK = "ok"
    WRONG_POSITION = "wrong-position"
    DISTRACTOR_INCLUDED = "distractor-included"


class IndentVerdict(str, Enum):
    OK = "ok"
    WRONG = "wrong"


class FixcodeVerdict(str, Enum):
    OK = "ok"
    UNCORRECTED = "uncorrected"
    WRONG_EDIT = "wrong-edit"


@dataclass(frozen=True)
class PlacedBlock:
    """One block in the learner's workspace.

    ``text`` is only set for learner-added blocks (their id is not in the
    spec); ``edited_text`` only for the fix-code block.
    """

    id: str
    indent: int = 0
    blank_fills: tuple[str, ...] = ()
    edited_text: str | None = None
    text: str | None = None

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "indent": self.indent,
            "blank_fills": list(self.blank_fills),
            "edited_text": self.edited_text,
            "text": self.text,
        }

    @staticmethod
    def from_dict(doc: dict) -> "PlacedBlock":
        return PlacedBlock(
            id=doc["id"],
            indent=doc.get("indent", 0),
            blank_fills=tuple(doc.get("blank_fills", [])),
            edited_text=doc.get("edited_text"),
            text=doc.get("text"),
        )


@dataclass(frozen=True)
class Arrangement:
    problem_id: str
    representation: Representation
    placed: tuple[PlacedBlock, ...] = ()
    editor_text: str | None = None

    def to_dict(self) -> dict:
        return {
            "problem_id": self.problem_id,
            "representation": self.representation.value,
            "placed": [p.to_dict() for p in self.placed],
            "editor_text": self.editor_text,
        }

    @staticmethod
    def from_dict(doc: dict) -> "Arrangement":
        return Arrangement(
            problem_id=doc["problem_id"],
            representation=Representation(doc["representation"]),
            placed=tuple(PlacedBlock.from_dict(p) for p in doc.get("placed", [])),
            editor_text=doc.get("editor_text"),
        )


@dataclass(frozen=True)
class BlockVerdict:
    block_id: str
    order: OrderVerdict
    indent: IndentVerdict | None = None  # None when indentation is not graded
    blanks: tuple[bool, ...] = ()
    fixcode: FixcodeVerdict | None = None

    @property
    def clean(self) -> bool:
        return (
            self.order is OrderVerdict.OK
            and self.indent in (None, IndentVerdict.OK)
            and all(self.blanks)
            and self.fixcode in (None, FixcodeVerdict.OK)
        )

    def to_dict(self) -> dict:
        return {
            "block_id": self.block_id,
            "order": self.order.value,
            "indent": self.indent.value if self.indent else None,
            "blanks": ["ok" if b else "wrong" for b in self.blanks],
            "fixcode": self.fixcode.value if self.fixcode else None,
        }


@dataclass(frozen=True)
class GradeReport:
    solved: bool
    block_verdicts: tuple[BlockVerdict, ...]
    missing_block_ids: tuple[str, ...]
    summary_counts: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "solved": self.solved,
            "block_verdicts": [v.to_dict() for v in self.block_verdicts],
            "missing_block_ids": list(self.missing_block_ids),
            "summary_counts": dict(self.summary_counts),
        }

    @property
    def defect_count(self) -> int:
        return sum(self.summary_counts.values())


def _solution_sequence(
    spec: ProblemSpec,
    representation: Representation,
    placed_ids: frozenset[str] = frozenset(),
) -> list[SolutionBlock]:
    if representation is Representation.PSEUDOCODE_PARSONS:
        return [
            SolutionBlock(id=f"ps{n}", text=line, indent=0)
            for n, line in enumerate(spec.pseudocode_lines)
        ]
    # A placement may contain blocks merged by intra-problem adaptation;
    # their ids are the joined member ids.  Grade those atomically.
    solution_ids = {b.id for b in spec.solution_blocks}
    groups = tuple(
        tuple(pid.split("+"))
        for pid in sorted(placed_ids)
        if "+" in pid and all(p in solution_ids for p in pid.split("+"))
    )
    if groups:
        from dataclasses import replace as dc_replace

        from .variants import merge_solution_blocks

        return list(merge_solution_blocks(dc_replace(spec, merge_groups=groups)))
    return list(spec.solution_blocks)


def resolve_placements(
    placed_blocks: tuple[PlacedBlock, ...], spec: ProblemSpec, representation: Representation
) -> list[tuple[PlacedBlock, SolutionBlock | None]]:
    """Map each placed block to the solution block it stands for, or None
    for distractors (including learner-added blocks matching nothing)."""
    solution = _solution_sequence(
        spec, representation, frozenset(p.id for p in placed_blocks)
    )
    by_id = {b.id: b for b in solution}

    seen: set[str] = set()
    for placed in placed_blocks:
        if placed.id in seen:
            raise UnknownBlockId(f"block {placed.id!r} placed twice")
        seen.add(placed.id)

    resolved: list[tuple[PlacedBlock, SolutionBlock | None]] = []
    taken = {p.id for p in placed_blocks if p.id in by_id}
    for placed in placed_blocks:
        if placed.id in by_id:
            resolved.append((placed, by_id[placed.id]))
            continue
        if spec.distractor_by_id(placed.id) is not None:
            resolved.append((placed, None))
            continue
        if placed.text is None:
            raise UnknownBlockId(f"unknown block id {placed.id!r}")
        stand_in = next(
            (
                b
                for b in solution
                if b.id not in taken and lines_equal(placed.text, b.canonical_text())
            ),
            None,
        )
        if stand_in is not None:
            taken.add(stand_in.id)
        resolved.append((placed, stand_in))
    return resolved


def grade(arrangement: Arrangement, spec: ProblemSpec) -> GradeReport:
    """Grade a Parsons-family arrangement against the authored solution."""
    representation = Representation(arrangement.representation)
    if representation not in PARSONS_FAMILY:
        raise UnknownBlockId(f"structural grading does not apply to {representation.value}")

    solution = _solution_sequence(
        spec, representation, frozenset(p.id for p in arrangement.placed)
    )
    grade_indent = representation is not Representation.PSEUDOCODE_PARSONS

    resolved = resolve_placements(arrangement.placed, spec, representation)
    placed_solution = [(p, b) for p, b in resolved if b is not None]
    placed_ids = {b.id for _, b in placed_solution}
    missing = tuple(b.id for b in solution if b.id not in placed_ids)
    expected = [b for b in solution if b.id in placed_ids]

    verdicts: list[BlockVerdict] = []
    solution_pos = 0
    for placed, block in resolved:
        if block is None:
            verdicts.append(
                BlockVerdict(block_id=placed.id, order=OrderVerdict.DISTRACTOR_INCLUDED)
            )
            continue
        want = expected[solution_pos]
        solution_pos += 1
        order = (
            OrderVerdict.OK
            if lines_equal(block.canonical_text(), want.canonical_text())
            else OrderVerdict.WRONG_POSITION
        )
        indent = None
        if grade_indent:
            indent = IndentVerdict.OK if placed.indent == block.indent else IndentVerdict.WRONG
        # Blanks exist only in the faded representation; every other tray
        # shows blocks with the blanks already resolved.
        blanks: tuple[bool, ...] = ()
        if representation is Representation.FADED_PARSONS:
            fills = list(placed.blank_fills) + [""] * (
                len(block.blanks) - len(placed.blank_fills)
            )
            blanks = tuple(
                lines_equal(fills[blank.index], blank.answer) for blank in block.blanks
            )
        fixcode = None
        if block.fixcode is not None:
            shown = (
                block.fixcode.buggy_text
                if representation is Representation.FADED_PARSONS
                else block.fixcode.corrected_text
            )
            effective = placed.edited_text if placed.edited_text is not None else shown
            if lines_equal(effective, block.fixcode.corrected_text):
                fixcode = FixcodeVerdict.OK
            elif lines_equal(effective, block.fixcode.buggy_text):
                fixcode = FixcodeVerdict.UNCORRECTED
            else:
                fixcode = FixcodeVerdict.WRONG_EDIT
        verdicts.append(
            BlockVerdict(
                block_id=placed.id, order=order, indent=indent, blanks=blanks, fixcode=fixcode
            )
        )

    counts = {
        "wrong_order": sum(v.order is OrderVerdict.WRONG_POSITION for v in verdicts),
        "distractors_placed": sum(
            v.order is OrderVerdict.DISTRACTOR_INCLUDED for v in verdicts
        ),
        "wrong_indent": sum(v.indent is IndentVerdict.WRONG for v in verdicts),
        "wrong_blanks": sum(len([b for b in v.blanks if not b]) for v in verdicts),
        "fixcode_defects": sum(
            v.fixcode in (FixcodeVerdict.UNCORRECTED, FixcodeVerdict.WRONG_EDIT)
            for v in verdicts
        ),
        "missing_blocks": len(missing),
    }
    solved = not missing and all(v.clean for v in verdicts)
    return GradeReport(
        solved=solved,
        block_verdicts=tuple(verdicts),
        missing_block_ids=missing,
        summary_counts=counts,
    )


def canonical_arrangement(
    spec: ProblemSpec, representation: Representation = Representation.PARSONS_2D
) -> Arrangement:
    """The fully correct placement: solution order, solution indents,
    canonical fills, corrected fix-code."""
    representation = Representation(representation)
    placed = []
    for block in _solution_sequence(spec, representation):
        edited = None
        if block.fixcode is not None and representation is Representation.FADED_PARSONS:
            edited = block.fixcode.corrected_text
        placed.append(
            PlacedBlock(
                id=block.id,
                indent=block.indent,
                blank_fills=tuple(b.answer for b in block.blanks),
                edited_text=edited,
            )
        )
    return Arrangement(
        problem_id=spec.id, representation=representation, placed=tuple(placed)
    )


def count_valid_placements(spec: ProblemSpec, max_blocks: int = MAX_ENUMERATION_BLOCKS) -> int:
    """Brute-force oracle: over every distractor subset and every ordering of
    the resulting tray, count placements that grade as solved.

    Placements use canonical indents, fills, and fix-code edits; only the
    ordering (and distractor inclusion) varies.  Test support only.
    """
    max_blocks = min(max_blocks, MAX_ENUMERATION_BLOCKS)
    total = len(spec.solution_blocks) + len(spec.distractors)
    if total > max_blocks:
        raise TooLarge(f"{total} tray blocks exceeds the enumeration cap of {max_blocks}")

    canonical = {p.id: p for p in canonical_arrangement(spec).placed}
    count = 0
    distractor_ids = [d.id for d in spec.distractors]
    for r in range(len(distractor_ids) + 1):
        for subset in itertools.combinations(distractor_ids, r):
            pool = [b.id for b in spec.solution_blocks] + list(subset)
            for ordering in itertools.permutations(pool):
                placed = tuple(
                    canonical.get(bid, PlacedBlock(id=bid)) for bid in ordering
                )
                report = grade(
                    Arrangement(
                        problem_id=spec.id,
                        representation=Representation.PARSONS_2D,
                        placed=placed,
                    ),
                    spec,
                )
                count += report.solved
    return count
