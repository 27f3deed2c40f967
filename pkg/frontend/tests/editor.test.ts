import { describe, expect, test } from "vitest";

import { clampMarker, highlight, KEYWORDS } from "../src/editor.js";

describe("highlight", () => {
  test("keywords get the kw class, identifiers do not", () => {
    const html = highlight("weak entity HealthRecord { partial_key record_id }");
    expect(html).toContain('<span class="kw">weak</span>');
    expect(html).toContain('<span class="kw">entity</span>');
    expect(html).toContain('<span class="kw">partial_key</span>');
    expect(html).toContain('<span class="ident">HealthRecord</span>');
    expect(html).toContain('<span class="ident">record_id</span>');
  });

  test("comments are marked and escaped", () => {
    const html = highlight("entity A { key id } # <b>note</b>");
    expect(html).toContain('<span class="comment"># &lt;b&gt;note&lt;/b&gt;</span>');
  });

  test("lines carry 1-based data-line markers", () => {
    const html = highlight("entity A { }\nentity B { }");
    expect(html).toContain('data-line="1"');
    expect(html).toContain('data-line="2"');
  });

  test("empty lines still render a line span", () => {
    const html = highlight("entity A { }\n\nentity B { }");
    expect(html.match(/class="code-line"/g)).toHaveLength(3);
  });

  test("every grammar keyword is covered", () => {
    for (const keyword of KEYWORDS) {
      expect(highlight(keyword)).toContain(`<span class="kw">${keyword}</span>`);
    }
  });
});

describe("clampMarker", () => {
  const source = "entity A { key id }\nentity B { }";

  test("in-range positions pass through", () => {
    expect(clampMarker({ line: 2, column: 8, message: "m" }, source)).toEqual({
      line: 2,
      column: 8,
      message: "m",
    });
  });

  test("line beyond the text clamps to the last line", () => {
    expect(clampMarker({ line: 99, column: 1, message: "m" }, source).line).toBe(2);
  });

  test("column beyond the line clamps to line end", () => {
    const clamped = clampMarker({ line: 2, column: 99, message: "m" }, source);
    expect(clamped.column).toBe("entity B { }".length + 1);
  });
});
