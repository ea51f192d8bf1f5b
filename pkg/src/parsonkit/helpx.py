"""Learner-initiated help actions and difficulty adaptation.

Help actions operate on a :class:`Workspace` (tray plus placement) for one
rendered problem.  They are free of scoring penalties but every invocation is
meant to be logged by the session layer.  Each action weakly decreases the
number of grading defects; ShowPseudocode leaves the workspace untouched.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from enum import Enum

from .errors import EmptyText, EmptyWorkspace, NotApplicable
from .grading import (
    Arrangement,
    PlacedBlock,
    _solution_sequence,
    grade,
    resolve_placements,
)
from .model import PARSONS_FAMILY, ProblemSpec, Representation, SolutionBlock
from .textnorm import normalize
from .variants import (
    BlockKind,
    DifficultyConfig,
    DistractorMode,
    RenderedBlock,
    RenderedProblem,
    merge_solution_blocks,
)


class HelpAction(str, Enum):
    SHOW_PSEUDOCODE = "ShowPseudocode"
    PAIR_AND_COMPARE = "PairAndCompare"
    REMOVE_INCORRECT_BLOCKS = "RemoveIncorrectBlocks"
    ADD_MISSING_BLOCK = "AddMissingBlock"
    PROVIDE_CORRECT_ORDER = "ProvideCorrectOrder"
    PROVIDE_CORRECT_INDENTATION = "ProvideCorrectIndentation"


@dataclass(frozen=True)
class Workspace:
    """Tray block ids plus the current placement for one rendered problem."""

    tray: tuple[str, ...] = ()
    placed: tuple[PlacedBlock, ...] = ()
    custom_texts: dict = field(default_factory=dict)  # learner-added id -> text

    def to_dict(self) -> dict:
        return {
            "tray": list(self.tray),
            "placed": [p.to_dict() for p in self.placed],
            "custom_texts": dict(self.custom_texts),
        }

    @staticmethod
    def from_dict(doc: dict) -> "Workspace":
        return Workspace(
            tray=tuple(doc.get("tray", [])),
            placed=tuple(PlacedBlock.from_dict(p) for p in doc.get("placed", [])),
            custom_texts=dict(doc.get("custom_texts", {})),
        )

    @staticmethod
    def from_rendered(rendered: RenderedProblem) -> "Workspace":
        return Workspace(tray=tuple(b.id for b in rendered.source_blocks))

    def arrangement(self, problem_id: str, representation: Representation) -> Arrangement:
        placed = tuple(
            replace(p, text=self.custom_texts.get(p.id, p.text)) for p in self.placed
        )
        return Arrangement(problem_id=problem_id, representation=representation, placed=placed)


@dataclass(frozen=True)
class HelpEffect:
    action: HelpAction
    detail: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"action": self.action.value, "detail": dict(self.detail)}


def _grade_workspace(workspace: Workspace, rendered: RenderedProblem, spec: ProblemSpec):
    return grade(workspace.arrangement(spec.id, rendered.representation), spec)


def _canonical_placed(block: SolutionBlock, representation: Representation) -> PlacedBlock:
    edited = None
    if block.fixcode is not None and representation is Representation.FADED_PARSONS:
        edited = block.fixcode.corrected_text
    return PlacedBlock(
        id=block.id,
        indent=block.indent,
        blank_fills=tuple(b.answer for b in block.blanks),
        edited_text=edited,
    )


def apply_help(
    action: HelpAction,
    workspace: Workspace,
    rendered: RenderedProblem,
    spec: ProblemSpec,
) -> tuple[Workspace, HelpEffect]:
    """Apply one help action; returns the new workspace and its effect."""
    action = HelpAction(action)
    representation = Representation(rendered.representation)

    if action is HelpAction.SHOW_PSEUDOCODE:
        if not spec.pseudocode_lines:
            raise NotApplicable("problem has no pseudocode")
        return workspace, HelpEffect(action, {"pseudocode_lines": list(spec.pseudocode_lines)})

    if representation not in PARSONS_FAMILY:
        raise NotApplicable(f"{action.value} applies to Parsons-family workspaces only")

    if action is HelpAction.PAIR_AND_COMPARE:
        in_play = set(workspace.tray) | {p.id for p in workspace.placed}
        candidate = next(
            (d for d in spec.distractors if d.pair_target and d.id in in_play), None
        )
        if candidate is None:
            raise NotApplicable("no pairable distractor remaining")
        target = spec.block_by_id(candidate.pair_target)
        new_ws = replace(
            workspace,
            tray=tuple(t for t in workspace.tray if t != candidate.id),
            placed=tuple(p for p in workspace.placed if p.id != candidate.id),
        )
        return new_ws, HelpEffect(
            action,
            {
                "correct": {"id": target.id, "text": target.canonical_text()},
                "distractor": {"id": candidate.id, "text": candidate.text},
                "removed": candidate.id,
            },
        )

    if action is HelpAction.REMOVE_INCORRECT_BLOCKS:
        resolved = resolve_placements(
            workspace.arrangement(spec.id, representation).placed, spec, representation
        )
        drop = {p.id for p, block in resolved if block is None}
        new_ws = replace(workspace, placed=tuple(p for p in workspace.placed if p.id not in drop))
        return new_ws, HelpEffect(action, {"removed": sorted(drop)})

    resolved_by_id = {
        p.id: b
        for p, b in resolve_placements(
            workspace.arrangement(spec.id, representation).placed, spec, representation
        )
    }
    resolved = [(p, resolved_by_id[p.id]) for p in workspace.placed]
    in_play = frozenset(workspace.tray) | {p.id for p in workspace.placed}
    solution = _solution_sequence(spec, representation, in_play)
    order = {b.id: n for n, b in enumerate(solution)}

    if action is HelpAction.ADD_MISSING_BLOCK:
        taken = {b.id for _, b in resolved if b is not None}
        missing = [b for b in solution if b.id not in taken]
        if not missing:
            raise NotApplicable("no solution block is missing")
        block = missing[0]
        insert_at = len(workspace.placed)
        for n, (_, resolved_block) in enumerate(resolved):
            if resolved_block is not None and order[resolved_block.id] > order[block.id]:
                insert_at = n
                break
        new_placed = list(workspace.placed)
        new_placed.insert(insert_at, _canonical_placed(block, representation))
        new_ws = replace(
            workspace,
            tray=tuple(t for t in workspace.tray if t != block.id),
            placed=tuple(new_placed),
        )
        return new_ws, HelpEffect(action, {"added": block.id, "position": insert_at})

    if action is HelpAction.PROVIDE_CORRECT_ORDER:
        queue = iter(
            sorted(
                (p for p, b in resolved if b is not None),
                key=lambda p: order[resolved_by_id[p.id].id],
            )
        )
        new_placed = tuple(p if b is None else next(queue) for p, b in resolved)
        return replace(workspace, placed=new_placed), HelpEffect(action, {})

    if action is HelpAction.PROVIDE_CORRECT_INDENTATION:
        new_placed = tuple(
            p if b is None else replace(p, indent=b.indent) for p, b in resolved
        )
        return replace(workspace, placed=new_placed), HelpEffect(action, {})

    raise NotApplicable(f"unsupported help action {action!r}")


# ---------------------------------------------------------------------------
# Add / copy blocks


_add_counter = itertools.count(1)


def add_block(workspace: Workspace, text: str) -> tuple[Workspace, str]:
    """Append a learner-authored block to the tray; returns (workspace, id).

    Grading treats the block as a distractor unless its text matches a
    missing solution block's canonical text.
    """
    if not normalize(text):
        raise EmptyText("added block text is empty")
    block_id = f"add-{next(_add_counter)}"
    custom = dict(workspace.custom_texts)
    custom[block_id] = text
    new_ws = replace(workspace, tray=workspace.tray + (block_id,), custom_texts=custom)
    return new_ws, block_id


def copy_blocks(
    workspace: Workspace,
    rendered: RenderedProblem,
    spec: ProblemSpec,
    target: Representation,
) -> str:
    """Render the current placement as text for a write-code or fix-code editor."""
    target = Representation(target)
    if target not in (Representation.WRITE_CODE, Representation.FIX_CODE):
        raise NotApplicable(f"cannot copy blocks into {target.value}")
    representation = Representation(rendered.representation)
    if representation not in PARSONS_FAMILY:
        raise NotApplicable("copy blocks applies to Parsons-family workspaces only")
    if not workspace.placed:
        raise EmptyWorkspace("nothing placed to copy")

    from .execfb import assemble

    return assemble(workspace.arrangement(spec.id, representation), spec)


# ---------------------------------------------------------------------------
# Difficulty adaptation

LADDER = (DistractorMode.NONE, DistractorMode.PAIRED, DistractorMode.ALL_JUMBLED)
STRUGGLE_ATTEMPTS = 3


@dataclass(frozen=True)
class AdaptationState:
    last_problem_attempts: int = 0
    helps_used: int = 0
    difficulty: DifficultyConfig = DifficultyConfig(distractor_mode=DistractorMode.PAIRED)

    def to_dict(self) -> dict:
        return {
            "last_problem_attempts": self.last_problem_attempts,
            "helps_used": self.helps_used,
            "difficulty": {
                "distractor_mode": self.difficulty.distractor_mode.value,
                "combine_blocks": self.difficulty.combine_blocks,
            },
        }


@dataclass(frozen=True)
class Outcome:
    solved: bool
    attempts: int
    gave_up: bool = False


def inter_adapt(
    state: AdaptationState, outcome: Outcome, struggle_threshold: int = STRUGGLE_ATTEMPTS
) -> DifficultyConfig:
    """Next-problem difficulty from the just-finished problem's outcome.

    One-attempt solves step the distractor ladder up; giving up or needing
    ``struggle_threshold`` attempts steps it down.  Both ends saturate.
    """
    rung = LADDER.index(DistractorMode(state.difficulty.distractor_mode))
    if outcome.solved and outcome.attempts == 1:
        rung = min(rung + 1, len(LADDER) - 1)
    elif outcome.gave_up or outcome.attempts >= struggle_threshold:
        rung = max(rung - 1, 0)
    return replace(state.difficulty, distractor_mode=LADDER[rung])


def intra_adapt(
    rendered: RenderedProblem, spec: ProblemSpec
) -> tuple[RenderedProblem, str]:
    """Ease the current problem one notch: shed a distractor (unpaired
    first), else combine the first available merge-group, else no-op."""
    representation = Representation(rendered.representation)
    if representation not in PARSONS_FAMILY:
        raise NotApplicable("intra-problem adaptation applies to Parsons-family only")

    blocks = list(rendered.source_blocks)
    distractors = [b for b in blocks if b.kind is BlockKind.DISTRACTOR]
    if distractors:
        victim = next((d for d in distractors if d.pair_tag is None), distractors[0])
        remaining = tuple(b for b in blocks if b.id != victim.id)
        return replace(rendered, source_blocks=remaining), f"removed-distractor:{victim.id}"

    if representation is not Representation.PSEUDOCODE_PARSONS:
        present = {b.id for b in blocks}
        for group in spec.merge_groups:
            if all(bid in present for bid in group):
                merged_spec_blocks = merge_solution_blocks(
                    replace_spec_merge(spec, group)
                )
                merged = next(b for b in merged_spec_blocks if b.id == "+".join(group))
                first_pos = min(n for n, b in enumerate(blocks) if b.id in group)
                kept = [b for b in blocks if b.id not in group]
                kept.insert(
                    min(first_pos, len(kept)),
                    RenderedBlock(
                        id=merged.id,
                        display_text=merged.text,
                        kind=BlockKind.SOLUTION,
                    ),
                )
                return replace(rendered, source_blocks=tuple(kept)), f"merged:{merged.id}"

    return rendered, "exhausted"


def replace_spec_merge(spec: ProblemSpec, group: tuple[str, ...]) -> ProblemSpec:
    from dataclasses import replace as dc_replace

    return dc_replace(spec, merge_groups=(tuple(group),))
