/** View models for the feedback panel.
 *
 * Structural reports highlight misplaced blocks and keep the bug badge on
 * fix-code blocks until their edit is accepted; execution reports list one
 * row per test with expected/actual values and error text shown verbatim.
 */

import type { ExecutionReport, GradeReport } from "./types.js";

export interface BlockFeedback {
  blockId: string;
  /** Outline the block when it sits in the wrong position. */
  wrongPosition: boolean;
  /** The block is a distractor that should not be placed at all. */
  distractor: boolean;
  wrongIndent: boolean;
  wrongBlankIndexes: number[];
  /** Bug badge stays visible until fixcode === "ok". */
  bugBadge: boolean;
}

export interface GradeFeedbackView {
  kind: "grade";
  solved: boolean;
  banner: string;
  blocks: BlockFeedback[];
  missingBlockIds: string[];
}

export interface TestRow {
  ordinal: number;
  status: "pass" | "fail" | "error";
  expected: string;
  /** Actual value on pass/fail, error text verbatim on error. */
  shown: string;
}

export interface ExecutionFeedbackView {
  kind: "execution";
  solved: boolean;
  banner: string;
  compiled: boolean;
  rows: TestRow[];
}

export type FeedbackView = GradeFeedbackView | ExecutionFeedbackView;

export function renderGradeFeedback(report: GradeReport): GradeFeedbackView {
  const blocks: BlockFeedback[] = report.block_verdicts.map((v) => ({
    blockId: v.block_id,
    wrongPosition: v.order === "wrong-position",
    distractor: v.order === "distractor-included",
    wrongIndent: v.indent === "wrong",
    wrongBlankIndexes: v.blanks
      .map((b, i) => (b === "wrong" ? i : -1))
      .filter((i) => i >= 0),
    bugBadge: v.fixcode !== null && v.fixcode !== "ok",
  }));
  return {
    kind: "grade",
    solved: report.solved,
    banner: report.solved ? "Solved! Great work." : "Not quite — check the highlighted blocks.",
    blocks,
    missingBlockIds: [...report.missing_block_ids],
  };
}

export function renderExecutionFeedback(
  report: ExecutionReport,
): ExecutionFeedbackView {
  const rows: TestRow[] = report.results.map((r) => ({
    ordinal: r.ordinal,
    status: r.status,
    expected: r.expected,
    shown: r.status === "error" ? (r.error ?? "") : (r.actual ?? ""),
  }));
  return {
    kind: "execution",
    solved: report.all_passed,
    banner: report.all_passed
      ? "All tests passed!"
      : report.compiled
        ? "Some tests did not pass."
        : "The program did not compile.",
    compiled: report.compiled,
    rows,
  };
}
