// Split-panel proportions: transcript left, suggestion cards right.
export const PANEL_SPLIT = {
  transcriptPct: 40,
  suggestionsPct: 60,
} as const;
