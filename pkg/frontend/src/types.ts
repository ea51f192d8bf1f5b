/** Wire types mirroring the service JSON one-to-one. */

export type Representation =
  | "WriteCode"
  | "Parsons2D"
  | "FadedParsons"
  | "PseudocodeParsons"
  | "FixCode";

export type BlockKind = "solution" | "distractor" | "learner-added";

export interface RenderedBlock {
  id: string;
  display_text: string;
  kind: BlockKind;
  pair_tag: string | null;
  indent_shown: number;
  blank_count: number;
  bug_badge: boolean;
}

export interface RenderedProblem {
  problem_id: string;
  representation: Representation;
  source_blocks: RenderedBlock[];
  workspace: unknown[];
  prompt: string;
  seed: number;
  prng: string;
  editor_text: string | null;
  time_limit?: number;
}

export interface PlacedBlock {
  id: string;
  indent: number;
  blank_fills: string[];
  edited_text: string | null;
  text: string | null;
}

export interface Arrangement {
  problem_id: string;
  representation: Representation;
  placed: PlacedBlock[];
  editor_text: string | null;
}

export type OrderVerdict = "ok" | "wrong-position" | "distractor-included";
export type FixcodeVerdict = "ok" | "uncorrected" | "wrong-edit";

export interface BlockVerdict {
  block_id: string;
  order: OrderVerdict;
  indent: "ok" | "wrong" | null;
  blanks: ("ok" | "wrong")[];
  fixcode: FixcodeVerdict | null;
}

export interface GradeReport {
  solved: boolean;
  block_verdicts: BlockVerdict[];
  missing_block_ids: string[];
  summary_counts: Record<string, number>;
}

export interface TestResult {
  ordinal: number;
  status: "pass" | "fail" | "error";
  expected: string;
  actual: string | null;
  error: string | null;
  wall_time_ms: number;
}

export interface ExecutionReport {
  compiled: boolean;
  results: TestResult[];
  all_passed: boolean;
}

export interface SessionStateDoc {
  session_id: string;
  learner_id: string;
  problem_order: string[];
  limit_ms: number;
  problem_index: number;
  current_problem: string;
  representation: Representation;
  phase: "running" | "paused" | "finished";
  finish_reason: "timeout" | "solved" | "gave-up" | null;
  elapsed_ms: number;
  attempts_this_problem: number;
}

export interface WorkspaceDoc {
  tray: string[];
  placed: PlacedBlock[];
  custom_texts: Record<string, string>;
}

export interface SessionView {
  state: SessionStateDoc;
  rendered: RenderedProblem;
  workspace: WorkspaceDoc;
}

export interface HelpEffect {
  action: string;
  detail: Record<string, unknown>;
}

export interface ApiErrorBody {
  code: string;
  message: string;
}
