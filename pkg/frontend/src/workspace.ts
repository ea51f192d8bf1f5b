/** View model for the two-panel tray/workspace layout.
 *
 * The view holds presentation state only (which block sits in which row at
 * which indent); grading always happens server-side via the Arrangement the
 * view serializes.  Round-tripping view state to an Arrangement and back is
 * lossless: ids, order, indents, blank fills, and edits all survive.
 */

import type {
  Arrangement,
  PlacedBlock,
  RenderedBlock,
  RenderedProblem,
  Representation,
} from "./types.js";

/** Device-independent pixels per indentation level. */
export const INDENT_PX = 40;

export interface LayoutMetrics {
  /** x coordinate of the workspace panel's left edge. */
  workspaceLeft: number;
  /** y coordinate of the workspace panel's top edge. */
  workspaceTop: number;
  /** Height of one placed row, including its gap. */
  rowHeight: number;
  /** Deepest indent level the problem allows. */
  maxIndent: number;
  indentPx?: number;
}

export interface Slot {
  row: number;
  indent: number;
}

/** Map a pointer position to the drop slot under it.
 *
 * The row is the nearest gap between placed rows, judged by vertical
 * midpoint; a drop below the last row appends.  The indent is
 * floor((x - workspaceLeft) / indentPx), clamped to [0, maxIndent].
 */
export function dropToSlot(
  x: number,
  y: number,
  metrics: LayoutMetrics,
  placedCount: number,
): Slot {
  const indentPx = metrics.indentPx ?? INDENT_PX;
  const rawIndent = Math.floor((x - metrics.workspaceLeft) / indentPx);
  const indent = Math.min(Math.max(rawIndent, 0), metrics.maxIndent);

  const offset = y - metrics.workspaceTop;
  const rawRow = Math.round(offset / metrics.rowHeight);
  const row = Math.min(Math.max(rawRow, 0), placedCount);
  return { row, indent };
}

export interface PlacedItem {
  block: RenderedBlock;
  indent: number;
  blankFills: string[];
  editedText: string | null;
}

export class WorkspaceView {
  readonly problemId: string;
  readonly representation: Representation;
  tray: RenderedBlock[];
  placed: PlacedItem[] = [];
  editorText: string | null;
  /** Block selected for keyboard manipulation, as an index into `placed`. */
  selectedRow: number | null = null;

  constructor(problem: RenderedProblem) {
    this.problemId = problem.problem_id;
    this.representation = problem.representation;
    this.tray = [...problem.source_blocks];
    this.editorText = problem.editor_text;
  }

  get maxIndent(): number {
    return Math.max(
      4,
      ...this.tray.map((b) => b.indent_shown),
      ...this.placed.map((p) => p.indent),
    );
  }

  private trayIndex(blockId: string): number {
    const index = this.tray.findIndex((b) => b.id === blockId);
    if (index < 0) throw new Error(`block ${blockId} is not in the tray`);
    return index;
  }

  /** Drag a tray block into the workspace at the given slot. */
  dropFromTray(blockId: string, slot: Slot): void {
    const [block] = this.tray.splice(this.trayIndex(blockId), 1);
    if (!block) throw new Error(`block ${blockId} is not in the tray`);
    const item: PlacedItem = {
      block,
      indent: Math.min(slot.indent, this.maxIndent),
      blankFills: new Array<string>(block.blank_count).fill(""),
      editedText: null,
    };
    this.placed.splice(Math.min(slot.row, this.placed.length), 0, item);
  }

  /** Drag a placed block to a new slot (or back to the tray via removeRow). */
  moveRow(row: number, slot: Slot): void {
    const [item] = this.placed.splice(row, 1);
    if (!item) throw new Error(`no placed row ${row}`);
    item.indent = slot.indent;
    this.placed.splice(Math.min(slot.row, this.placed.length), 0, item);
  }

  /** Return a placed block to the tray (a drop outside the workspace). */
  removeRow(row: number): void {
    const [item] = this.placed.splice(row, 1);
    if (!item) throw new Error(`no placed row ${row}`);
    this.tray.push(item.block);
  }

  setBlankFill(row: number, blankIndex: number, value: string): void {
    const item = this.placed[row];
    if (!item) throw new Error(`no placed row ${row}`);
    if (blankIndex < 0 || blankIndex >= item.blankFills.length) {
      throw new Error(`block ${item.block.id} has no blank ${blankIndex}`);
    }
    item.blankFills[blankIndex] = value;
  }

  setEditedText(row: number, text: string | null): void {
    const item = this.placed[row];
    if (!item) throw new Error(`no placed row ${row}`);
    item.editedText = text;
  }

  // --- keyboard alternative: select a row, then nudge it with arrow keys ---

  select(row: number | null): void {
    if (row !== null && (row < 0 || row >= this.placed.length)) {
      throw new Error(`no placed row ${row}`);
    }
    this.selectedRow = row;
  }

  /** Arrow-key handler for the selected block; returns true when handled. */
  keyboardMove(key: "ArrowUp" | "ArrowDown" | "ArrowLeft" | "ArrowRight"): boolean {
    if (this.selectedRow === null) return false;
    const row = this.selectedRow;
    const item = this.placed[row];
    if (!item) return false;
    switch (key) {
      case "ArrowLeft":
        item.indent = Math.max(0, item.indent - 1);
        return true;
      case "ArrowRight":
        item.indent = Math.min(this.maxIndent, item.indent + 1);
        return true;
      case "ArrowUp":
        if (row === 0) return false;
        this.moveRow(row, { row: row - 1, indent: item.indent });
        this.selectedRow = row - 1;
        return true;
      case "ArrowDown":
        if (row >= this.placed.length - 1) return false;
        this.moveRow(row, { row: row + 1, indent: item.indent });
        this.selectedRow = row + 1;
        return true;
    }
  }

  /** Serialize view state for the server.  Lossless: every id, row order,
   * indent, blank fill, and edit appears in the Arrangement. */
  toArrangement(): Arrangement {
    const placed: PlacedBlock[] = this.placed.map((item) => ({
      id: item.block.id,
      indent: item.indent,
      blank_fills: [...item.blankFills],
      edited_text: item.editedText,
      text: item.block.kind === "learner-added" ? item.block.display_text : null,
    }));
    return {
      problem_id: this.problemId,
      representation: this.representation,
      placed,
      editor_text: this.editorText,
    };
  }

  /** Restore view state from an Arrangement (e.g. after a server help
   * action rewrote the workspace). */
  static fromArrangement(
    problem: RenderedProblem,
    arrangement: Arrangement,
  ): WorkspaceView {
    const view = new WorkspaceView(problem);
    const byId = new Map(problem.source_blocks.map((b) => [b.id, b]));
    view.tray = problem.source_blocks.filter(
      (b) => !arrangement.placed.some((p) => p.id === b.id),
    );
    view.placed = arrangement.placed.map((p) => {
      const block: RenderedBlock = byId.get(p.id) ?? {
        id: p.id,
        display_text: p.text ?? "",
        kind: "learner-added",
        pair_tag: null,
        indent_shown: p.indent,
        blank_count: p.blank_fills.length,
        bug_badge: false,
      };
      return {
        block,
        indent: p.indent,
        blankFills: [...p.blank_fills],
        editedText: p.edited_text,
      };
    });
    view.editorText = arrangement.editor_text;
    return view;
  }
}
