/**
 * Scanner for the server's DOT output. The server emits one statement per
 * line with a fixed attribute vocabulary (shape, peripheries, style, label,
 * dir, penwidth), which is all the workbench needs to summarize a diagram
 * without a layout engine: which boxes (entities), diamonds (relationships)
 * and ellipses (attributes) exist and how they connect.
 */

export interface DotNode {
  id: string;
  label: string;
  shape: string;
  peripheries: number;
  dashed: boolean;
}

export interface DotEdge {
  from: string;
  to: string;
  label?: string;
  penwidth?: number;
}

export interface DotGraph {
  nodes: DotNode[];
  edges: DotEdge[];
}

const NODE_RE = /^\s*("(?:[^"\\]|\\.)*"|[A-Za-z_][A-Za-z0-9_]*)\s*\[(.*)\];?\s*$/;
const EDGE_RE =
  /^\s*("(?:[^"\\]|\\.)*"|[A-Za-z_][A-Za-z0-9_]*)\s*->\s*("(?:[^"\\]|\\.)*"|[A-Za-z_][A-Za-z0-9_]*)\s*(?:\[(.*)\])?;?\s*$/;

function unquote(id: string): string {
  if (id.startsWith('"') && id.endsWith('"')) {
    return id.slice(1, -1).replace(/\\(.)/g, "$1");
  }
  return id;
}

function splitAttrs(text: string): Map<string, string> {
  const attrs = new Map<string, string>();
  let depth = 0;
  let inQuotes = false;
  let current = "";
  const parts: string[] = [];
  for (let i = 0; i < text.length; i++) {
    const ch = text[i]!;
    if (inQuotes) {
      current += ch;
      if (ch === "\\") {
        current += text[++i] ?? "";
      } else if (ch === '"') {
        inQuotes = false;
      }
      continue;
    }
    if (ch === '"') {
      inQuotes = true;
      current += ch;
    } else if (ch === "<") {
      depth++;
      current += ch;
    } else if (ch === ">") {
      depth--;
      current += ch;
    } else if (ch === "," && depth === 0) {
      parts.push(current);
      current = "";
    } else {
      current += ch;
    }
  }
  if (current.trim()) parts.push(current);
  for (const part of parts) {
    const eq = part.indexOf("=");
    if (eq < 0) continue;
    attrs.set(part.slice(0, eq).trim(), part.slice(eq + 1).trim());
  }
  return attrs;
}

function labelText(raw: string | undefined, fallback: string): string {
  if (raw === undefined) return fallback;
  if (raw.startsWith('"')) return unquote(raw);
  // HTML-like label, e.g. <<u>id</u>>: strip markup
  return raw.replace(/^<|>$/g, "").replace(/<[^>]*>/g, "");
}

export function parseDot(text: string): DotGraph {
  const nodes: DotNode[] = [];
  const edges: DotEdge[] = [];
  for (const line of text.split("\n")) {
    const trimmed = line.trim();
    if (!trimmed || trimmed.startsWith("digraph") || trimmed === "}") continue;
    const edgeMatch = EDGE_RE.exec(trimmed);
    if (edgeMatch) {
      const attrs = splitAttrs(edgeMatch[3] ?? "");
      const label = attrs.get("label");
      const penwidth = attrs.get("penwidth");
      edges.push({
        from: unquote(edgeMatch[1]!),
        to: unquote(edgeMatch[2]!),
        ...(label !== undefined ? { label: labelText(label, "") } : {}),
        ...(penwidth !== undefined ? { penwidth: Number(penwidth) } : {}),
      });
      continue;
    }
    const nodeMatch = NODE_RE.exec(trimmed);
    if (nodeMatch) {
      const attrs = splitAttrs(nodeMatch[2] ?? "");
      const id = unquote(nodeMatch[1]!);
      nodes.push({
        id,
        label: labelText(attrs.get("label"), id),
        shape: attrs.get("shape") ?? "",
        peripheries: Number(attrs.get("peripheries") ?? "1"),
        dashed: attrs.get("style") === "dashed",
      });
    }
  }
  return { nodes, edges };
}

export interface DiagramSummary {
  entities: string[];
  weakEntities: string[];
  relationships: string[];
  identifyingRelationships: string[];
  attributeCount: number;
}

export function summarize(graph: DotGraph): DiagramSummary {
  const entities = graph.nodes.filter((n) => n.shape === "box");
  const relationships = graph.nodes.filter((n) => n.shape === "diamond");
  return {
    entities: entities.map((n) => n.label),
    weakEntities: entities.filter((n) => n.peripheries === 2).map((n) => n.label),
    relationships: relationships.map((n) => n.label),
    identifyingRelationships: relationships
      .filter((n) => n.peripheries === 2)
      .map((n) => n.label),
    attributeCount: graph.nodes.filter((n) => n.shape === "ellipse").length,
  };
}
