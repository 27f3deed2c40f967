/**
 * DOM view for the workbench. Renders from WorkbenchState only; no diagram
 * logic lives here beyond handing DOT text to the pluggable renderer.
 */

import { ApiClient } from "./api.js";
import { clampMarker, highlight } from "./editor.js";
import { DotRenderer, defaultRenderer } from "./viz.js";
import { WorkbenchController, WorkbenchState } from "./workbench.js";

export interface WorkbenchView {
  controller: WorkbenchController;
  root: HTMLElement;
  whenIdle: () => Promise<void>;
}

export interface MountOptions {
  dotRenderer?: DotRenderer;
}

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

export function mountWorkbench(
  root: HTMLElement,
  api: ApiClient,
  options: MountOptions = {},
): WorkbenchView {
  const dotRenderer = options.dotRenderer ?? defaultRenderer;
  root.textContent = "";
  root.classList.add("workbench");

  // editor pane
  const editorPane = el("section", "editor-pane");
  const editorWrap = el("div", "editor");
  const textarea = el("textarea", "editor-input");
  textarea.id = "erd-input";
  textarea.spellcheck = false;
  const highlightLayer = el("pre", "editor-highlight");
  editorWrap.append(highlightLayer, textarea);
  const submitButton = el("button", "submit-button", "Submit ERD");
  submitButton.id = "submit-erd";
  const parseErrorList = el("ul", "parse-errors");
  const violationList = el("ul", "violations");
  editorPane.append(editorWrap, submitButton, parseErrorList, violationList);

  // diagram pane
  const diagramPane = el("section", "diagram-pane");
  const picker = el("select", "relationship-picker");
  picker.id = "relationship-picker";
  const diagram = el("div", "diagram");
  diagram.id = "diagram";
  const feedbackButton = el("button", "feedback-button", "Get feedback");
  feedbackButton.id = "get-feedback";
  feedbackButton.disabled = true;
  diagramPane.append(picker, diagram, feedbackButton);

  // feedback pane
  const feedbackPane = el("section", "feedback-pane");
  const progress = el("div", "progress", "Generating feedback…");
  progress.hidden = true;
  const notice = el("div", "notice");
  notice.hidden = true;
  const feedbackText = el("div", "feedback-text");
  const faqHeading = el("h3", "faq-heading", "FAQ");
  faqHeading.hidden = true;
  const faqNote = el("div", "faq-unavailable", "FAQ unavailable for this feedback.");
  faqNote.hidden = true;
  const faqAccordion = el("div", "faq-accordion");
  const thread = el("ul", "discussion-thread");
  const composeForm = el("form", "compose");
  const composeInput = el("input", "compose-input");
  composeInput.type = "text";
  composeInput.placeholder = "Ask about this feedback…";
  const composeSend = el("button", "compose-send", "Send");
  composeSend.type = "submit";
  composeForm.append(composeInput, composeSend);
  composeForm.hidden = true;
  feedbackPane.append(progress, notice, feedbackText, faqHeading, faqNote,
                      faqAccordion, thread, composeForm);

  // history pane
  const historyPane = el("section", "history-pane");
  const historyHeading = el("h3", undefined, "History");
  const historyList = el("ol", "history-list");
  historyPane.append(historyHeading, historyList);

  root.append(editorPane, diagramPane, feedbackPane, historyPane);

  const controller = new WorkbenchController(api, render);

  textarea.addEventListener("input", () => {
    highlightLayer.innerHTML = highlight(textarea.value);
  });
  submitButton.addEventListener("click", () => {
    void controller.editAndSubmit(textarea.value);
  });
  picker.addEventListener("change", () => {
    void controller.selectRelationship(picker.value || null);
  });
  feedbackButton.addEventListener("click", () => {
    void controller.requestFeedback();
  });
  composeForm.addEventListener("submit", (event) => {
    event.preventDefault();
    const body = composeInput.value.trim();
    if (!body) return;
    composeInput.value = "";
    void controller.postMessage(body);
  });

  function renderEditorAnnotations(state: WorkbenchState): void {
    highlightLayer.innerHTML = highlight(textarea.value);
    parseErrorList.textContent = "";
    highlightLayer
      .querySelectorAll(".error-line")
      .forEach((line) => line.classList.remove("error-line"));
    for (const raw of state.parseErrors) {
      const marker = clampMarker(raw, textarea.value);
      const item = el("li", "error-marker");
      item.dataset.line = String(marker.line);
      item.dataset.column = String(marker.column);
      item.textContent = `line ${marker.line}, column ${marker.column}: ${raw.message}`;
      parseErrorList.appendChild(item);
      const line = highlightLayer.querySelector(`.code-line[data-line="${marker.line}"]`);
      line?.classList.add("error-line");
    }
    violationList.textContent = "";
    for (const violation of state.violations) {
      const item = el("li", "violation");
      item.dataset.code = violation.code;
      item.textContent = `${violation.code}: ${violation.message}`;
      violationList.appendChild(item);
    }
  }

  function renderPicker(state: WorkbenchState): void {
    picker.textContent = "";
    const whole = el("option", undefined, "(whole diagram)");
    whole.value = "";
    picker.appendChild(whole);
    for (const name of state.relationships) {
      const option = el("option", undefined, name);
      option.value = name;
      picker.appendChild(option);
    }
    picker.value = state.selected ?? "";
    picker.disabled = state.submission === null;
  }

  function renderFeedback(state: WorkbenchState): void {
    progress.hidden = !state.feedbackInFlight;
    notice.hidden = state.notice === null;
    if (state.notice) {
      notice.dataset.code = state.notice.code;
      notice.textContent = `Something went wrong (${state.notice.code}): ${state.notice.message}`;
    }
    feedbackText.textContent = state.feedback?.feedback ?? "";
    faqAccordion.textContent = "";
    const record = state.feedback;
    faqHeading.hidden = !record || record.faq.length === 0;
    faqNote.hidden = !(record && record.warning === "faq_unavailable");
    if (record) {
      for (const entry of record.faq) {
        const details = el("details", "faq-entry");
        const summary = el("summary", "faq-question", entry.question);
        const answer = el("p", "faq-answer", entry.answer);
        details.append(summary, answer);
        faqAccordion.appendChild(details);
      }
    }
    thread.textContent = "";
    for (const message of state.discussion) {
      const item = el("li", `message role-${message.author_role}`);
      const badge = el("span", "role-badge", message.author_role);
      const body = el("span", "message-body", ` ${message.body}`);
      item.append(badge, body);
      thread.appendChild(item);
    }
    composeForm.hidden = state.feedback === null;
  }

  function renderHistory(state: WorkbenchState): void {
    historyList.textContent = "";
    if (!state.history) return;
    for (const submission of state.history.submissions) {
      const item = el("li", "history-entry");
      item.dataset.submissionId = submission.id;
      const feedbackCount = state.history.feedback.filter(
        (record) => record.submission_id === submission.id,
      ).length;
      item.textContent = `${submission.created_at} — submission ${submission.id}`
        + (submission.parent_id ? ` (refines ${submission.parent_id})` : "")
        + (feedbackCount ? ` — ${feedbackCount} feedback` : "");
      historyList.appendChild(item);
    }
  }

  function render(state: WorkbenchState): void {
    renderEditorAnnotations(state);
    renderPicker(state);
    feedbackButton.disabled =
      state.submission === null || state.selected === null || state.feedbackInFlight;
    if (state.diagramDot !== null) {
      void dotRenderer(state.diagramDot, diagram);
    } else {
      diagram.textContent = "";
    }
    renderFeedback(state);
    renderHistory(state);
  }

  render(controller.state);
  return { controller, root, whenIdle: () => controller.whenIdle() };
}
