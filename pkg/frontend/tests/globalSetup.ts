/**
 * Boots the real feedback service (HTTP API + scripted mock LLM) once for
 * the whole frontend suite. The mock script is the repo's canonical
 * three-stage pipeline script, repeated so several pipeline runs across
 * tests each consume a fresh matching/feedback/faq triple.
 */

import { spawn, ChildProcess } from "node:child_process";
import { createServer } from "node:net";
import { mkdtempSync, readFileSync, writeFileSync } from "node:fs";
import { tmpdir } from "node:os";
import { join, resolve } from "node:path";
import { fileURLToPath } from "node:url";
import type { TestProject } from "vitest/node";

const REPO_ROOT = resolve(fileURLToPath(new URL(".", import.meta.url)), "../..");

declare module "vitest" {
  export interface ProvidedContext {
    baseUrl: string;
  }
}

function freePort(): Promise<number> {
  return new Promise((resolvePort, reject) => {
    const probe = createServer();
    probe.once("error", reject);
    probe.listen(0, "127.0.0.1", () => {
      const address = probe.address();
      if (address === null || typeof address === "string") {
        reject(new Error("no port assigned"));
        return;
      }
      probe.close(() => resolvePort(address.port));
    });
  });
}

async function waitUntilUp(baseUrl: string, child: ChildProcess): Promise<void> {
  const deadline = Date.now() + 30000;
  let lastError = "";
  while (Date.now() < deadline) {
    if (child.exitCode !== null) {
      throw new Error(`server exited early with code ${child.exitCode}`);
    }
    try {
      await fetch(`${baseUrl}/projects/readiness-probe`);
      return; // any HTTP response (404 included) means the server is up
    } catch (error) {
      lastError = String(error);
      await new Promise((r) => setTimeout(r, 150));
    }
  }
  throw new Error(`server did not come up: ${lastError}`);
}

export default async function setup(project: TestProject): Promise<() => Promise<void>> {
  const canonical = JSON.parse(
    readFileSync(join(REPO_ROOT, "tests/data/mock_pipeline.json"), "utf8"),
  ) as { "*": string[] };
  const repeated = { "*": Array.from({ length: 50 }, () => canonical["*"]).flat() };
  const scriptPath = join(mkdtempSync(join(tmpdir(), "erd-mentor-ui-")), "mock.json");
  writeFileSync(scriptPath, JSON.stringify(repeated));

  const port = await freePort();
  const baseUrl = `http://127.0.0.1:${port}`;
  const child = spawn(
    "python3",
    ["-m", "erd_mentor.cli", "serve", "--store", ":memory:", "--host", "127.0.0.1",
     "--port", String(port), "--mock", scriptPath],
    { cwd: REPO_ROOT, stdio: ["ignore", "inherit", "inherit"] },
  );
  await waitUntilUp(baseUrl, child);
  project.provide("baseUrl", baseUrl);

  return async () => {
    child.kill("SIGTERM");
    await new Promise((r) => setTimeout(r, 100));
    if (child.exitCode === null) child.kill("SIGKILL");
  };
}
