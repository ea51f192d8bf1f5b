import { describe, expect, it } from "vitest";

import { renderExecutionFeedback, renderGradeFeedback } from "../src/feedback.js";
import type { BlockVerdict, ExecutionReport, GradeReport } from "../src/types.js";

function verdict(overrides: Partial<BlockVerdict>): BlockVerdict {
  return {
    block_id: "b",
    order: "ok",
    indent: "ok",
    blanks: [],
    fixcode: null,
    ...overrides,
  };
}

function gradeReport(
  verdicts: BlockVerdict[],
  solved = false,
  missing: string[] = [],
): GradeReport {
  return {
    solved,
    block_verdicts: verdicts,
    missing_block_ids: missing,
    summary_counts: {},
  };
}

describe("renderGradeFeedback", () => {
  it("outlines wrong-position blocks", () => {
    const view = renderGradeFeedback(
      gradeReport([
        verdict({ block_id: "s1", order: "wrong-position" }),
        verdict({ block_id: "s2" }),
      ]),
    );
    expect(view.blocks[0]?.wrongPosition).toBe(true);
    expect(view.blocks[1]?.wrongPosition).toBe(false);
  });

  it("bug badge persists while fixcode is uncorrected or wrong-edit", () => {
    for (const fixcode of ["uncorrected", "wrong-edit"] as const) {
      const view = renderGradeFeedback(
        gradeReport([verdict({ block_id: "s4", fixcode })]),
      );
      expect(view.blocks[0]?.bugBadge).toBe(true);
    }
  });

  it("bug badge clears once fixcode is ok", () => {
    const view = renderGradeFeedback(
      gradeReport([verdict({ block_id: "s4", fixcode: "ok" })]),
    );
    expect(view.blocks[0]?.bugBadge).toBe(false);
  });

  it("blocks without a fix-code defect never show the badge", () => {
    const view = renderGradeFeedback(gradeReport([verdict({ fixcode: null })]));
    expect(view.blocks[0]?.bugBadge).toBe(false);
  });

  it("marks wrong blanks by index and flags distractors", () => {
    const view = renderGradeFeedback(
      gradeReport([
        verdict({ block_id: "s0", blanks: ["wrong", "ok", "wrong"] }),
        verdict({ block_id: "d0", order: "distractor-included" }),
      ]),
    );
    expect(view.blocks[0]?.wrongBlankIndexes).toEqual([0, 2]);
    expect(view.blocks[1]?.distractor).toBe(true);
  });

  it("an all-ok report shows the success banner", () => {
    const view = renderGradeFeedback(gradeReport([verdict({})], true));
    expect(view.solved).toBe(true);
    expect(view.banner).toMatch(/solved/i);
  });

  it("missing blocks are surfaced", () => {
    const view = renderGradeFeedback(gradeReport([], false, ["s5+s6+s7"]));
    expect(view.missingBlockIds).toEqual(["s5+s6+s7"]);
  });
});

describe("renderExecutionFeedback", () => {
  const report: ExecutionReport = {
    compiled: true,
    all_passed: false,
    results: [
      {
        ordinal: 1,
        status: "pass",
        expected: "[2]",
        actual: "[2]",
        error: null,
        wall_time_ms: 3,
      },
      {
        ordinal: 2,
        status: "error",
        expected: "[1, 2]",
        actual: null,
        error: "IndexError: list index out of range",
        wall_time_ms: 4,
      },
    ],
  };

  it("lists ordinal, expected, and actual per test", () => {
    const view = renderExecutionFeedback(report);
    expect(view.rows[0]).toEqual({
      ordinal: 1,
      status: "pass",
      expected: "[2]",
      shown: "[2]",
    });
  });

  it("shows error text verbatim", () => {
    const view = renderExecutionFeedback(report);
    expect(view.rows[1]?.shown).toBe("IndexError: list index out of range");
  });

  it("success banner only when all tests pass", () => {
    expect(renderExecutionFeedback(report).solved).toBe(false);
    const passing: ExecutionReport = {
      compiled: true,
      all_passed: true,
      results: [],
    };
    expect(renderExecutionFeedback(passing).banner).toMatch(/passed/i);
  });

  it("reports compile failure distinctly", () => {
    const broken: ExecutionReport = { compiled: false, all_passed: false, results: [] };
    expect(renderExecutionFeedback(broken).banner).toMatch(/compile/i);
  });
});
