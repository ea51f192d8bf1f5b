/** Timer display and the paused-screen rule.
 *
 * The server is the authority on elapsed time; the client only formats the
 * remaining budget and decides what the paused screen shows.  While paused,
 * the problem and workspace are hidden and only the Resume control renders.
 */

import type { SessionStateDoc } from "./types.js";

export interface TimerDisplay {
  remainingMs: number;
  /** "MM:SS", clamped at 00:00. */
  label: string;
  expired: boolean;
}

export function timerDisplay(
  state: SessionStateDoc,
  localSinceSyncMs = 0,
): TimerDisplay {
  const running = state.phase === "running" ? localSinceSyncMs : 0;
  const remainingMs = Math.max(0, state.limit_ms - state.elapsed_ms - running);
  const totalSeconds = Math.floor(remainingMs / 1000);
  const minutes = Math.floor(totalSeconds / 60);
  const seconds = totalSeconds % 60;
  const pad = (n: number) => String(n).padStart(2, "0");
  return {
    remainingMs,
    label: `${pad(minutes)}:${pad(seconds)}`,
    expired: remainingMs === 0,
  };
}

export interface ScreenVisibility {
  showProblem: boolean;
  showWorkspace: boolean;
  showTimer: boolean;
  /** The only control visible while paused. */
  showResumeControl: boolean;
  showFinishedSummary: boolean;
}

export function screenVisibility(state: SessionStateDoc): ScreenVisibility {
  switch (state.phase) {
    case "paused":
      return {
        showProblem: false,
        showWorkspace: false,
        showTimer: false,
        showResumeControl: true,
        showFinishedSummary: false,
      };
    case "finished":
      return {
        showProblem: false,
        showWorkspace: false,
        showTimer: false,
        showResumeControl: false,
        showFinishedSummary: true,
      };
    case "running":
      return {
        showProblem: true,
        showWorkspace: true,
        showTimer: true,
        showResumeControl: false,
        showFinishedSummary: false,
      };
  }
}
