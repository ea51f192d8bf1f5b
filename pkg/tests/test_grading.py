import itertools
import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parsonkit.errors import TooLarge, UnknownBlockId
from parsonkit.grading import (
    Arrangement,
    FixcodeVerdict,
    IndentVerdict,
    OrderVerdict,
    PlacedBlock,
    canonical_arrangement,
    count_valid_placements,
    grade,
)
from parsonkit.model import Representation


def arrangement(spec, placed, representation=Representation.PARSONS_2D):
    return Arrangement(
        problem_id=spec.id, representation=representation, placed=tuple(placed)
    )


class TestCanonical:
    @pytest.mark.parametrize("rep", [Representation.PARSONS_2D, Representation.FADED_PARSONS])
    def test_canonical_arrangement_solves(self, corpus, rep):
        for spec in corpus.values():
            report = grade(canonical_arrangement(spec, rep), spec)
            assert report.solved, (spec.id, rep, report.summary_counts)

    def test_pseudocode_canonical_solves(self, locate):
        report = grade(
            canonical_arrangement(locate, Representation.PSEUDOCODE_PARSONS), locate
        )
        assert report.solved

    def test_summary_counts_all_zero_when_solved(self, locate):
        report = grade(canonical_arrangement(locate), locate)
        assert report.defect_count == 0


class TestDefects:
    def test_swapped_blocks_wrong_order(self, middle):
        placed = list(canonical_arrangement(middle).placed)
        placed[0], placed[2] = placed[2], placed[0]
        report = grade(arrangement(middle, placed), middle)
        assert not report.solved
        assert report.summary_counts["wrong_order"] == 2

    def test_distractor_included(self, middle):
        placed = list(canonical_arrangement(middle).placed)
        placed.insert(1, PlacedBlock(id="md0", indent=1))
        report = grade(arrangement(middle, placed), middle)
        verdicts = {v.block_id: v for v in report.block_verdicts}
        assert verdicts["md0"].order is OrderVerdict.DISTRACTOR_INCLUDED
        assert report.summary_counts["distractors_placed"] == 1
        assert report.summary_counts["wrong_order"] == 0

    def test_wrong_indent(self, middle):
        placed = list(canonical_arrangement(middle).placed)
        placed[2] = PlacedBlock(id="m2", indent=3)
        report = grade(arrangement(middle, placed), middle)
        verdicts = {v.block_id: v for v in report.block_verdicts}
        assert verdicts["m2"].indent is IndentVerdict.WRONG
        assert report.summary_counts["wrong_indent"] == 1

    def test_wrong_blank_fill_in_faded(self, middle):
        placed = list(
            canonical_arrangement(middle, Representation.FADED_PARSONS).placed
        )
        placed[1] = PlacedBlock(id="m1", indent=1, blank_fills=("%",))
        report = grade(
            arrangement(middle, placed, Representation.FADED_PARSONS), middle
        )
        assert report.summary_counts["wrong_blanks"] == 1

    def test_blanks_not_graded_outside_faded(self, middle):
        # Parsons2D trays show blocks with the blanks already resolved, so
        # fills are immaterial there.
        placed = list(canonical_arrangement(middle).placed)
        placed[1] = PlacedBlock(id="m1", indent=1)
        report = grade(arrangement(middle, placed), middle)
        assert report.solved

    def test_missing_block_reported_not_order_error(self, middle):
        placed = [p for p in canonical_arrangement(middle).placed if p.id != "m1"]
        report = grade(arrangement(middle, placed), middle)
        assert report.missing_block_ids == ("m1",)
        assert report.summary_counts["wrong_order"] == 0
        assert not report.solved

    def test_duplicate_placement_rejected(self, middle):
        placed = list(canonical_arrangement(middle).placed)
        placed.append(placed[0])
        with pytest.raises(UnknownBlockId):
            grade(arrangement(middle, placed), middle)

    def test_unknown_id_without_text_rejected(self, middle):
        placed = [PlacedBlock(id="mystery")]
        with pytest.raises(UnknownBlockId):
            grade(arrangement(middle, placed), middle)


class TestInterchangeability:
    def test_identical_text_blocks_swap_freely(self, twice):
        placed = list(canonical_arrangement(twice).placed)
        by_id = {p.id: p for p in placed}
        swapped = [
            by_id[i] for i in ["t0", "t1", "t3", "t2", "t4"]
        ]
        report = grade(arrangement(twice, swapped), twice)
        assert report.solved

    def test_locate_append_blocks_interchange(self, locate):
        # s4 (the fix-code block) and s7 render identical corrected text.
        placed = list(canonical_arrangement(locate).placed)
        idx4 = next(i for i, p in enumerate(placed) if p.id == "s4")
        idx7 = next(i for i, p in enumerate(placed) if p.id == "s7")
        placed[idx4], placed[idx7] = (
            PlacedBlock(id="s7", indent=placed[idx4].indent),
            PlacedBlock(id="s4", indent=placed[idx7].indent),
        )
        report = grade(arrangement(locate, placed), locate)
        assert report.solved


class TestLearnerAdded:
    def test_matching_text_stands_in_for_missing_block(self, middle):
        placed = [
            p if p.id != "m2" else PlacedBlock(id="add-9", indent=1, text="return lst[mid]")
            for p in canonical_arrangement(middle).placed
        ]
        report = grade(arrangement(middle, placed), middle)
        assert report.solved

    def test_non_matching_text_counts_as_distractor(self, middle):
        placed = list(canonical_arrangement(middle).placed)
        placed.append(PlacedBlock(id="add-1", indent=0, text="print(mid)"))
        report = grade(arrangement(middle, placed), middle)
        assert report.summary_counts["distractors_placed"] == 1

    def test_stand_in_not_double_matched(self, middle):
        placed = list(canonical_arrangement(middle).placed)
        placed.append(PlacedBlock(id="add-1", indent=1, text="return lst[mid]"))
        report = grade(arrangement(middle, placed), middle)
        # m2 is already placed, so the copy grades as an included distractor.
        assert report.summary_counts["distractors_placed"] == 1


class TestFixcode:
    def test_uncorrected_in_faded(self, locate):
        placed = [
            p if p.id != "s4" else PlacedBlock(id="s4", indent=3, edited_text=None)
            for p in canonical_arrangement(locate, Representation.FADED_PARSONS).placed
        ]
        report = grade(
            arrangement(locate, placed, Representation.FADED_PARSONS), locate
        )
        verdicts = {v.block_id: v for v in report.block_verdicts}
        assert verdicts["s4"].fixcode is FixcodeVerdict.UNCORRECTED
        assert not report.solved

    def test_wrong_edit(self, locate):
        placed = [
            p
            if p.id != "s4"
            else PlacedBlock(id="s4", indent=3, edited_text="missing.add(i)")
            for p in canonical_arrangement(locate, Representation.FADED_PARSONS).placed
        ]
        report = grade(
            arrangement(locate, placed, Representation.FADED_PARSONS), locate
        )
        verdicts = {v.block_id: v for v in report.block_verdicts}
        assert verdicts["s4"].fixcode is FixcodeVerdict.WRONG_EDIT

    def test_whitespace_only_edit_still_ok(self, locate):
        placed = [
            p
            if p.id != "s4"
            else PlacedBlock(id="s4", indent=3, edited_text="missing.append( i )")
            for p in canonical_arrangement(locate, Representation.FADED_PARSONS).placed
        ]
        report = grade(
            arrangement(locate, placed, Representation.FADED_PARSONS), locate
        )
        verdicts = {v.block_id: v for v in report.block_verdicts}
        assert verdicts["s4"].fixcode is FixcodeVerdict.OK


class TestPseudocode:
    def test_indent_not_graded(self, locate):
        placed = [
            PlacedBlock(id=f"ps{n}", indent=3) for n in range(9)
        ]
        report = grade(
            arrangement(locate, placed, Representation.PSEUDOCODE_PARSONS), locate
        )
        assert report.solved

    def test_order_still_graded(self, locate):
        ids = [f"ps{n}" for n in range(9)]
        ids[0], ids[8] = ids[8], ids[0]
        placed = [PlacedBlock(id=i) for i in ids]
        report = grade(
            arrangement(locate, placed, Representation.PSEUDOCODE_PARSONS), locate
        )
        assert report.summary_counts["wrong_order"] == 2


def independent_count(spec) -> int:
    """Oracle independent of the grader: over every distractor subset and
    ordering, a placement solves iff it contains no distractor and its block
    texts, in order, equal the solution texts line by line."""
    from parsonkit.textnorm import lines_equal

    solution_texts = [b.canonical_text() for b in spec.solution_blocks]
    blocks = {b.id: b.canonical_text() for b in spec.solution_blocks}
    distractor_ids = [d.id for d in spec.distractors]
    count = 0
    for r in range(len(distractor_ids) + 1):
        for subset in itertools.combinations(distractor_ids, r):
            pool = list(blocks) + list(subset)
            for ordering in itertools.permutations(pool):
                if any(i in subset for i in ordering):
                    continue
                texts = [blocks[i] for i in ordering]
                if all(
                    lines_equal(a, b) for a, b in zip(texts, solution_texts)
                ):
                    count += 1
    return count


class TestEnumerationOracle:
    def test_agreement_on_small_corpus_problems(self, corpus):
        for spec in corpus.values():
            if len(spec.solution_blocks) + len(spec.distractors) > 8:
                continue
            assert count_valid_placements(spec) == independent_count(spec), spec.id

    def test_twice_has_two_valid_orderings(self, twice):
        assert count_valid_placements(twice) == 2
        assert independent_count(twice) == math.factorial(1) * 2

    def test_large_problem_rejected(self, locate):
        with pytest.raises(TooLarge):
            count_valid_placements(locate)


class TestProperties:
    @given(st.integers(min_value=0, max_value=2**32))
    @settings(max_examples=30, deadline=None)
    def test_any_permutation_of_canonical_locate_without_distractors(self, seed):
        # Permuting canonical placements almost never stays solved unless the
        # permutation maps equal-text blocks to each other.
        import random

        from parsonkit.model import builtin_corpus_dir, load_corpus

        spec = load_corpus(builtin_corpus_dir())["middle"]
        placed = list(canonical_arrangement(spec).placed)
        rng = random.Random(seed)
        rng.shuffle(placed)
        report = grade(arrangement(spec, placed), spec)
        ids = [p.id for p in placed]
        assert report.solved == (ids == ["m0", "m1", "m2"])

    @given(st.integers(min_value=0, max_value=2**32))
    @settings(max_examples=30, deadline=None)
    def test_grade_is_deterministic(self, seed):
        import random

        from parsonkit.model import builtin_corpus_dir, load_corpus

        spec = load_corpus(builtin_corpus_dir())["count_vowels"]
        placed = list(canonical_arrangement(spec).placed)
        random.Random(seed).shuffle(placed)
        arr = arrangement(spec, placed)
        assert grade(arr, spec).to_dict() == grade(arr, spec).to_dict()
