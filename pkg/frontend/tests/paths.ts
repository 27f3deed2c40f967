/**
 * Locates the repository root from the process working directory. Test
 * files run under jsdom, where import.meta.url is an http:// URL, so
 * file-URL tricks are out; walking up from cwd to the directory holding
 * the canonical fixtures works from both the frontend dir and the repo root.
 */

import { existsSync } from "node:fs";
import { dirname, join } from "node:path";

export function repoRoot(): string {
  let dir = process.cwd();
  while (!existsSync(join(dir, "tests", "data", "mock_pipeline.json"))) {
    const parent = dirname(dir);
    if (parent === dir) throw new Error("repository root not found from " + process.cwd());
    dir = parent;
  }
  return dir;
}
