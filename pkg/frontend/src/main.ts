/**
 * Entry point: boots the workbench against a base URL and offers a minimal
 * project-setup form (paste a requirements document, open the workbench).
 * Configuration is one setting: window.ERD_MENTOR_BASE_URL, falling back to
 * same-origin.
 */

import { ApiClient } from "./api.js";
import { mountWorkbench } from "./render.js";

declare global {
  interface Window {
    ERD_MENTOR_BASE_URL?: string;
  }
}

export function boot(root: HTMLElement): void {
  const baseUrl = window.ERD_MENTOR_BASE_URL ?? window.location.origin;
  const api = new ApiClient(baseUrl);

  const setup = document.createElement("section");
  setup.className = "project-setup";
  const label = document.createElement("p");
  label.textContent = "Paste the requirements document (JSON) to open a project:";
  const input = document.createElement("textarea");
  input.className = "requirements-input";
  input.rows = 10;
  const open = document.createElement("button");
  open.textContent = "Open project";
  const problem = document.createElement("p");
  problem.className = "setup-error";
  setup.append(label, input, open, problem);
  root.appendChild(setup);

  open.addEventListener("click", () => {
    let requirements: unknown;
    try {
      requirements = JSON.parse(input.value);
    } catch {
      problem.textContent = "That is not valid JSON.";
      return;
    }
    const container = document.createElement("div");
    root.replaceChildren(container);
    const view = mountWorkbench(container, api);
    void view.controller.openProject(requirements);
  });
}

if (typeof document !== "undefined" && document.getElementById("app")) {
  boot(document.getElementById("app")!);
}
