// DOM wiring. All state transitions go through the controllers; this file
// only renders snapshots and forwards events.

import { AnnotateSession } from "./annotate";
import { ApiClient } from "./api";
import { ConflictBoard } from "./conflicts";
import { classifyDiff } from "./diffview";
import { formProblems, setScore, toggleNature, toggleType } from "./form";
import {
  CIVILITY_OPTIONS,
  NATURE_OPTIONS,
  TYPE_OPTIONS,
  type CivilityLabel,
  type Dimension,
} from "./types";
import "./style.css";

const api = new ApiClient();
const root = document.getElementById("app") as HTMLElement;

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className = "",
  text = "",
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text) node.textContent = text;
  return node;
}

function renderDiff(container: HTMLElement, diff: string): void {
  container.textContent = "";
  const pre = el("pre", "diff");
  for (const line of classifyDiff(diff)) {
    const row = el("div", `diff-line diff-${line.kind}`, line.text || " ");
    pre.appendChild(row);
  }
  container.appendChild(pre);
}

async function pickAnnotator(): Promise<string> {
  const params = new URLSearchParams(window.location.search);
  const fromUrl = params.get("annotator");
  if (fromUrl) return fromUrl;
  const session = await api.session();
  const choice = window.prompt(
    `Annotator id (${session.annotators.join(" or ")})`,
    session.annotators[0],
  );
  return choice ?? session.annotators[0];
}

// ---- annotation view --------------------------------------------------------

function renderAnnotateView(session: AnnotateSession): void {
  const view = session.snapshot();
  root.textContent = "";

  const header = el("header");
  header.appendChild(el("h1", "", "Review-comment annotation"));
  header.appendChild(
    el("p", "meta", `annotator: ${session.annotator} | remaining: ${view.remaining}`),
  );
  const nav = el("button", "linkish", "conflicts →");
  nav.addEventListener("click", () => void showConflicts());
  header.appendChild(nav);
  root.appendChild(header);

  if (view.phase === "loading") {
    root.appendChild(el("p", "", "loading…"));
    return;
  }
  if (view.phase === "error") {
    root.appendChild(el("p", "error", view.notice ?? "request failed"));
    const retry = el("button", "", "retry");
    retry.addEventListener("click", () => void session.loadNext().then(() => renderAnnotateView(session)));
    root.appendChild(retry);
    return;
  }
  if (view.phase === "done" || !view.sample) {
    root.appendChild(el("p", "", "all samples annotated ✓"));
    return;
  }

  const sample = view.sample;
  const pane = el("section", "sample");
  pane.appendChild(el("h2", "", `sample ${sample.id} (${sample.lang})`));
  const diffBox = el("div");
  renderDiff(diffBox, sample.patch);
  pane.appendChild(diffBox);
  pane.appendChild(el("h3", "", "Reviewer comment"));
  pane.appendChild(el("blockquote", "comment", sample.comment));
  root.appendChild(pane);

  const form = el("section", "form");

  const typeBox = el("fieldset");
  typeBox.appendChild(el("legend", "", "Type (pick ≥ 1)"));
  for (const label of TYPE_OPTIONS) {
    const wrap = el("label", "check");
    const box = el("input") as HTMLInputElement;
    box.type = "checkbox";
    box.checked = session.form.types.has(label);
    box.addEventListener("change", () => {
      toggleType(session.form, label);
      refreshSubmit();
    });
    wrap.append(box, document.createTextNode(label));
    typeBox.appendChild(wrap);
  }
  form.appendChild(typeBox);

  const natureBox = el("fieldset");
  natureBox.appendChild(el("legend", "", "Nature (pick ≥ 1)"));
  for (const label of NATURE_OPTIONS) {
    const wrap = el("label", "check");
    const box = el("input") as HTMLInputElement;
    box.type = "checkbox";
    box.checked = session.form.natures.has(label);
    box.addEventListener("change", () => {
      toggleNature(session.form, label);
      refreshSubmit();
    });
    wrap.append(box, document.createTextNode(label));
    natureBox.appendChild(wrap);
  }
  form.appendChild(natureBox);

  const civilityBox = el("fieldset");
  civilityBox.appendChild(el("legend", "", "Civility"));
  for (const label of CIVILITY_OPTIONS) {
    const wrap = el("label", "check");
    const radio = el("input") as HTMLInputElement;
    radio.type = "radio";
    radio.name = "civility";
    radio.checked = session.form.civility === label;
    radio.addEventListener("change", () => {
      session.form.civility = label as CivilityLabel;
      refreshSubmit();
    });
    wrap.append(radio, document.createTextNode(label));
    civilityBox.appendChild(wrap);
  }
  form.appendChild(civilityBox);

  const scoresBox = el("fieldset");
  scoresBox.appendChild(el("legend", "", "Scores (1-10)"));
  for (const criterion of ["relevance", "clarity", "conciseness"] as const) {
    const wrap = el("label", "score");
    wrap.appendChild(document.createTextNode(criterion));
    const input = el("input") as HTMLInputElement;
    input.type = "number";
    input.min = "1";
    input.max = "10";
    input.step = "1";
    if (view.fieldError === criterion) input.classList.add("invalid");
    input.addEventListener("input", () => {
      const value = input.value === "" ? null : Number(input.value);
      setScore(session.form, criterion, value);
      refreshSubmit();
    });
    wrap.appendChild(input);
    scoresBox.appendChild(wrap);
  }
  form.appendChild(scoresBox);

  const noteWrap = el("label", "note");
  noteWrap.appendChild(document.createTextNode("note"));
  const note = el("textarea") as HTMLTextAreaElement;
  note.addEventListener("input", () => {
    session.form.note = note.value;
  });
  noteWrap.appendChild(note);
  form.appendChild(noteWrap);

  if (view.notice) form.appendChild(el("p", "error", view.notice));
  if (view.fieldError) form.appendChild(el("p", "error", `server rejected field: ${view.fieldError}`));

  const submit = el("button", "submit", "submit") as HTMLButtonElement;
  submit.addEventListener("click", () => void session.submit().then(() => renderAnnotateView(session)));
  form.appendChild(submit);
  const problems = el("p", "problems");
  form.appendChild(problems);
  root.appendChild(form);

  function refreshSubmit(): void {
    submit.disabled = !session.submittable();
    const issues = formProblems(session.form);
    problems.textContent = issues.length ? issues.join("; ") : "";
  }
  refreshSubmit();
}

// ---- conflict view ----------------------------------------------------------

async function showConflicts(): Promise<void> {
  const board = new ConflictBoard(api);
  const session = await api.session();
  await board.refresh();
  renderConflictView(board, session.annotators);
}

function renderConflictView(board: ConflictBoard, annotators: string[]): void {
  const view = board.snapshot();
  root.textContent = "";

  const header = el("header");
  header.appendChild(el("h1", "", "Conflict resolution"));
  const back = el("button", "linkish", "← annotate");
  back.addEventListener("click", () => void start());
  header.appendChild(back);
  root.appendChild(header);

  if (view.notice) root.appendChild(el("p", "error", view.notice));
  if (view.conflicts.length === 0) {
    root.appendChild(el("p", "", "no open conflicts ✓"));
    return;
  }

  for (const conflict of view.conflicts) {
    const card = el("section", "conflict");
    card.appendChild(el("h2", "", `${conflict.sample_id} · ${conflict.dimension}`));
    const table = el("div", "sides");
    for (const annotator of annotators) {
      const side = el("div", "side");
      side.appendChild(el("h3", "", annotator));
      side.appendChild(el("pre", "", JSON.stringify(conflict.values[annotator], null, 1)));
      const pick = el("button", "", `use ${annotator}'s value`);
      pick.addEventListener("click", () =>
        void board
          .resolve(conflict.sample_id, conflict.dimension as Dimension, conflict.values[annotator])
          .then(() => renderConflictView(board, annotators)),
      );
      side.appendChild(pick);
      table.appendChild(side);
    }
    card.appendChild(table);
    root.appendChild(card);
  }
}

// ---- boot -------------------------------------------------------------------

async function start(): Promise<void> {
  const annotator = await pickAnnotator();
  const session = new AnnotateSession(api, annotator);
  await session.loadNext();
  renderAnnotateView(session);
}

void start();
