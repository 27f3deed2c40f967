/**
 * Client-side diagram rendering. The server only ever hands us DOT text;
 * layout happens here. The default path uses @viz-js/viz (Graphviz compiled
 * to WebAssembly) for real SVG layout and falls back to a structural
 * summary view when the engine is unavailable (offline bundles, test
 * environments without WASM).
 */

import { parseDot, summarize } from "./dot.js";

export type DotRenderer = (dot: string, container: HTMLElement) => Promise<void>;

/** Structural fallback: entity boxes, relationship diamonds, attribute count. */
export const summaryRenderer: DotRenderer = async (dot, container) => {
  const summary = summarize(parseDot(dot));
  container.textContent = "";
  const list = document.createElement("div");
  list.className = "diagram-summary";
  for (const name of summary.entities) {
    const node = document.createElement("div");
    node.className = summary.weakEntities.includes(name)
      ? "diagram-node entity weak"
      : "diagram-node entity";
    node.textContent = name;
    list.appendChild(node);
  }
  for (const name of summary.relationships) {
    const node = document.createElement("div");
    node.className = summary.identifyingRelationships.includes(name)
      ? "diagram-node relationship identifying"
      : "diagram-node relationship";
    node.textContent = name;
    list.appendChild(node);
  }
  const attrs = document.createElement("div");
  attrs.className = "diagram-attr-count";
  attrs.textContent = `${summary.attributeCount} attribute${summary.attributeCount === 1 ? "" : "s"}`;
  list.appendChild(attrs);
  container.appendChild(list);
};

export const vizRenderer: DotRenderer = async (dot, container) => {
  const { instance } = await import("@viz-js/viz");
  const viz = await instance();
  const svg = viz.renderSVGElement(dot);
  container.textContent = "";
  container.appendChild(svg);
};

/** Prefer real layout, degrade to the summary view. */
export const defaultRenderer: DotRenderer = async (dot, container) => {
  try {
    await vizRenderer(dot, container);
  } catch {
    await summaryRenderer(dot, container);
  }
};
