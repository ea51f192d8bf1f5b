export * from "./types.js";
export * from "./api.js";
export * from "./workspace.js";
export * from "./feedback.js";
export * from "./timer.js";
