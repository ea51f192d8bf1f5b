"""Derives learner-facing representations from a problem spec.

Everything here is deterministic in ``(spec, representation, difficulty,
seed)``.  Shuffling uses an explicit splitmix64 generator so tray orders are
reproducible across platforms and Python versions; the generator name travels
with every rendered problem.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .errors import InvalidSpec, RepresentationUnavailable
from .model import (
    PARSONS_FAMILY,
    DistractorBlock,
    ProblemSpec,
    Representation,
    SolutionBlock,
    canonical_program,
    render_line,
    validate_spec,
)

PRNG_NAME = "splitmix64-fisher-yates"

_MASK = (1 << 64) - 1


def _splitmix64(state: int) -> tuple[int, int]:
    state = (state + 0x9E3779B97F4A7C15) & _MASK
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return state, (z ^ (z >> 31)) & _MASK


def jumble(blocks: list, seed: int) -> list:
    """Seeded Fisher-Yates permutation that never returns the input order.

    For two or more blocks the result differs from the input order: identity
    draws are rejected (bounded at 100, then the list is rotated by one).
    """
    if len(blocks) < 2:
        return list(blocks)
    state = seed & _MASK
    for _ in range(100):
        out = list(blocks)
        for i in range(len(out) - 1, 0, -1):
            state, z = _splitmix64(state)
            j = z % (i + 1)
            out[i], out[j] = out[j], out[i]
        if out != list(blocks):
            return out
    return list(blocks[1:]) + [blocks[0]]


class DistractorMode(str, Enum):
    NONE = "none"
    PAIRED = "paired"
    JUMBLED_SUBSET = "jumbled-subset"
    ALL_JUMBLED = "all-jumbled"


@dataclass(frozen=True)
class DifficultyConfig:
    distractor_mode: DistractorMode = DistractorMode.ALL_JUMBLED
    combine_blocks: bool = False


class BlockKind(str, Enum):
    SOLUTION = "solution"
    DISTRACTOR = "distractor"
    LEARNER_ADDED = "learner-added"


@dataclass(frozen=True)
class RenderedBlock:
    """One tray entry as shown to the learner."""

    id: str
    display_text: str
    kind: BlockKind
    pair_tag: str | None = None
    indent_shown: int = 0
    blank_count: int = 0
    bug_badge: bool = False

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "display_text": self.display_text,
            "kind": self.kind.value,
            "pair_tag": self.pair_tag,
            "indent_shown": self.indent_shown,
            "blank_count": self.blank_count,
            "bug_badge": self.bug_badge,
        }


@dataclass(frozen=True)
class RenderedProblem:
    problem_id: str
    representation: Representation
    source_blocks: tuple[RenderedBlock, ...]
    workspace: tuple = ()
    prompt: str = ""
    seed: int = 0
    prng: str = PRNG_NAME
    editor_text: str | None = None

    def to_dict(self) -> dict:
        return {
            "problem_id": self.problem_id,
            "representation": self.representation.value,
            "source_blocks": [b.to_dict() for b in self.source_blocks],
            "workspace": list(self.workspace),
            "prompt": self.prompt,
            "seed": self.seed,
            "prng": self.prng,
            "editor_text": self.editor_text,
        }


@dataclass(frozen=True)
class BlockSelection:
    solution: tuple[SolutionBlock, ...]
    distractors: tuple[DistractorBlock, ...]
    pair_tags: dict = field(default_factory=dict)  # distractor id -> solution id


def merge_solution_blocks(spec: ProblemSpec) -> tuple[SolutionBlock, ...]:
    """Collapse each authored merge-group into one atomic multi-line block.

    Members render at their indent relative to the group's first block; the
    merged text is canonical (blanks answered, fix-code corrected) since
    combining is an easing action.
    """
    grouped: dict[str, tuple[str, ...]] = {}
    for group in spec.merge_groups:
        grouped[group[0]] = group
    member_of = {bid for group in spec.merge_groups for bid in group}

    merged: list[SolutionBlock] = []
    for block in spec.solution_blocks:
        if block.id in member_of and block.id not in grouped:
            continue
        if block.id in grouped:
            members = [spec.block_by_id(bid) for bid in grouped[block.id]]
            base = members[0].indent
            text = "\n".join(
                render_line(m.canonical_text(), m.indent - base) for m in members
            )
            merged.append(
                SolutionBlock(id="+".join(m.id for m in members), text=text, indent=base)
            )
        else:
            merged.append(block)
    return tuple(merged)


def apply_difficulty(spec: ProblemSpec, config: DifficultyConfig) -> BlockSelection:
    """Select solution blocks and distractors for a Parsons-family tray."""
    solution = merge_solution_blocks(spec) if config.combine_blocks else spec.solution_blocks

    mode = DistractorMode(config.distractor_mode)
    pair_tags: dict[str, str] = {}
    if mode is DistractorMode.NONE:
        selected: tuple[DistractorBlock, ...] = ()
    elif mode is DistractorMode.PAIRED:
        selected = tuple(d for d in spec.distractors if d.pair_target is not None)
        pair_tags = {d.id: d.pair_target for d in selected}
    elif mode is DistractorMode.JUMBLED_SUBSET:
        keep = (len(spec.distractors) + 1) // 2
        selected = spec.distractors[:keep]
    else:
        selected = spec.distractors
    return BlockSelection(solution=solution, distractors=selected, pair_tags=pair_tags)


def _render_solution_block(block: SolutionBlock, representation: Representation) -> RenderedBlock:
    if representation is Representation.FADED_PARSONS:
        display = block.fixcode.buggy_text if block.fixcode else block.text
        return RenderedBlock(
            id=block.id,
            display_text=display,
            kind=BlockKind.SOLUTION,
            blank_count=len(block.blanks),
            bug_badge=block.fixcode is not None,
        )
    return RenderedBlock(id=block.id, display_text=block.canonical_text(), kind=BlockKind.SOLUTION)


def derive(
    spec: ProblemSpec,
    representation: Representation,
    difficulty: DifficultyConfig | None = None,
    seed: int = 0,
) -> RenderedProblem:
    """Build the learner-facing shell for one representation of a problem."""
    issues = validate_spec(spec)
    if issues:
        raise InvalidSpec("; ".join(str(i) for i in issues))
    representation = Representation(representation)
    if representation not in spec.available_representations():
        raise RepresentationUnavailable(
            f"{representation.value} is not available for problem {spec.id!r}"
        )
    difficulty = difficulty or DifficultyConfig()

    common = dict(problem_id=spec.id, representation=representation, prompt=spec.prompt, seed=seed)

    if representation is Representation.WRITE_CODE:
        return RenderedProblem(source_blocks=(), editor_text="", **common)

    if representation is Representation.FIX_CODE:
        lines = [
            render_line(b.fixcode.buggy_text if b.fixcode else b.canonical_text(), b.indent)
            for b in spec.solution_blocks
        ]
        return RenderedProblem(source_blocks=(), editor_text="\n".join(lines), **common)

    if representation is Representation.PSEUDOCODE_PARSONS:
        blocks = [
            RenderedBlock(id=f"ps{n}", display_text=line, kind=BlockKind.SOLUTION)
            for n, line in enumerate(spec.pseudocode_lines)
        ]
        return RenderedProblem(source_blocks=tuple(jumble(blocks, seed)), **common)

    selection = apply_difficulty(spec, difficulty)
    blocks = [_render_solution_block(b, representation) for b in selection.solution]
    blocks += [
        RenderedBlock(
            id=d.id,
            display_text=d.text,
            kind=BlockKind.DISTRACTOR,
            pair_tag=selection.pair_tags.get(d.id),
            indent_shown=0,
        )
        for d in selection.distractors
    ]
    return RenderedProblem(source_blocks=tuple(jumble(blocks, seed)), **common)
