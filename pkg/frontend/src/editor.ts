/**
 * Grammar-aware helpers for the text editor: keyword highlighting derived
 * from the parser's reserved words, and inline marker positioning for parse
 * errors (1-based line/column, as the API reports them).
 */

export const KEYWORDS = [
  "entity",
  "weak",
  "relationship",
  "identifying",
  "specialization",
  "union",
  "of",
  "as",
  "key",
  "partial_key",
  "derived",
  "multivalued",
  "total",
  "partial",
  "disjoint",
  "overlapping",
] as const;

const KEYWORD_SET = new Set<string>(KEYWORDS);
const TOKEN_RE = /(#.*$)|([A-Za-z_][A-Za-z0-9_-]*)|(\d+)|([{}()[\];,])/gm;

function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

/** Source text to HTML with span-wrapped tokens, one line per .code-line. */
export function highlight(source: string): string {
  const lines = source.split("\n").map((line, index) => {
    let html = "";
    let cursor = 0;
    for (const match of line.matchAll(TOKEN_RE)) {
      const start = match.index ?? 0;
      html += escapeHtml(line.slice(cursor, start));
      const [text] = match;
      let cls = "punct";
      if (match[1] !== undefined) cls = "comment";
      else if (match[2] !== undefined) cls = KEYWORD_SET.has(text) ? "kw" : "ident";
      else if (match[3] !== undefined) cls = "card";
      html += `<span class="${cls}">${escapeHtml(text)}</span>`;
      cursor = start + text.length;
    }
    html += escapeHtml(line.slice(cursor));
    return `<span class="code-line" data-line="${index + 1}">${html || "&nbsp;"}</span>`;
  });
  return lines.join("\n");
}

export interface Marker {
  line: number;
  column: number;
  message: string;
}

/** Clamp a reported position to the actual text, so markers always land. */
export function clampMarker(marker: Marker, source: string): Marker {
  const lines = source.split("\n");
  const line = Math.min(Math.max(marker.line, 1), Math.max(lines.length, 1));
  const lineText = lines[line - 1] ?? "";
  const column = Math.min(Math.max(marker.column, 1), lineText.length + 1);
  return { ...marker, line, column };
}
