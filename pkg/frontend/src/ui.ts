/**
 * DOM rendering: rules screen, one sample per screen with both rating
 * rows and the scale legend, progress bar, completion screen. Pure
 * render-from-state; every interaction mutates the session and
 * re-renders.
 */

import { Axis } from "./api.js";
import { AXES, SCALE_LEGEND, SurveySession } from "./session.js";

const AXIS_TITLES: Record<Axis, string> = {
  naturalness: "Naturalness",
  intelligibility: "Intelligibility",
};

export function render(session: SurveySession, root: HTMLElement): void {
  root.textContent = "";
  switch (session.phase) {
    case "rules":
      root.appendChild(rulesScreen(session, root));
      break;
    case "rating":
      root.appendChild(ratingScreen(session, root));
      break;
    case "done":
      root.appendChild(doneScreen(session, root));
      break;
  }
}

function el<K extends keyof HTMLElementTagNameMap>(
  doc: Document,
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = doc.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function legendTable(doc: Document): HTMLElement {
  const table = el(doc, "table", "scale-legend");
  const head = el(doc, "tr");
  for (const title of ["Score", "Quality", "Distortions"]) {
    head.appendChild(el(doc, "th", undefined, title));
  }
  table.appendChild(head);
  for (const row of SCALE_LEGEND) {
    const tr = el(doc, "tr");
    tr.appendChild(el(doc, "td", undefined, String(row.score)));
    tr.appendChild(el(doc, "td", undefined, row.quality));
    tr.appendChild(el(doc, "td", undefined, row.distortions));
    table.appendChild(tr);
  }
  return table;
}

function rulesScreen(session: SurveySession, root: HTMLElement): HTMLElement {
  const doc = root.ownerDocument;
  const screen = el(doc, "section", "screen rules-screen");
  screen.appendChild(el(doc, "h1", undefined, "Listening survey"));
  const rules = el(doc, "ul", "rules");
  for (const text of [
    `You will hear ${session.sampleCount} short audio samples, one per page.`,
    "Listen to each sample at least once; replaying is always allowed.",
    "Rate every sample on two axes, naturalness and intelligibility, " +
      "using the five-point scale below.",
    "Use headphones if you can, and work at your own pace.",
  ]) {
    rules.appendChild(el(doc, "li", undefined, text));
  }
  screen.appendChild(rules);
  screen.appendChild(legendTable(doc));
  const start = el(doc, "button", "start-button", "Start the survey");
  start.addEventListener("click", () => {
    session.acknowledgeRules();
    render(session, root);
  });
  screen.appendChild(start);
  return screen;
}

function ratingScreen(session: SurveySession, root: HTMLElement): HTMLElement {
  const doc = root.ownerDocument;
  const screen = el(doc, "section", "screen rating-screen");
  const sample = session.currentSample;

  const progress = el(doc, "div", "progress");
  const bar = el(doc, "div", "progress-bar");
  bar.style.width = `${session.progressPercent}%`;
  progress.appendChild(bar);
  progress.appendChild(el(
    doc, "span", "progress-label",
    `Sample ${session.cursor + 1} of ${session.sampleCount}`,
  ));
  screen.appendChild(progress);

  const audio = el(doc, "audio", "sample-audio") as HTMLAudioElement;
  audio.src = sample.audioUrl;
  audio.controls = true;
  audio.addEventListener("play", () => {
    session.markPlayed();
    render(session, root);
  });
  screen.appendChild(audio);

  const play = el(doc, "button", "play-button",
    session.hasPlayedCurrent() ? "Replay" : "Play");
  play.addEventListener("click", () => {
    const wasPlayed = session.hasPlayedCurrent();
    session.markPlayed();
    // jsdom has no real playback; ignore its rejection
    try {
      void audio.play()?.catch?.(() => undefined);
    } catch {
      /* no playback backend */
    }
    if (!wasPlayed) render(session, root);
  });
  screen.appendChild(play);

  for (const axis of AXES) {
    screen.appendChild(axisRow(session, root, axis));
  }
  screen.appendChild(legendTable(doc));

  const next = el(doc, "button", "next-button",
    session.cursor + 1 === session.sampleCount ? "Finish" : "Next sample");
  next.disabled = !session.canAdvance();
  next.addEventListener("click", () => {
    session.advance();
    render(session, root);
  });
  screen.appendChild(next);

  const pending = session.queue.pendingCount;
  if (pending > 0) {
    screen.appendChild(el(
      doc, "p", "offline-note",
      `${pending} rating(s) waiting to be sent; they will be retried automatically.`,
    ));
  }
  return screen;
}

function axisRow(session: SurveySession, root: HTMLElement, axis: Axis): HTMLElement {
  const doc = root.ownerDocument;
  const row = el(doc, "fieldset", `axis-row axis-${axis}`);
  row.appendChild(el(doc, "legend", undefined, AXIS_TITLES[axis]));
  const chosen = session.scoreFor(axis);
  const locked = !session.hasPlayedCurrent();
  for (const score of [1, 2, 3, 4, 5]) {
    const button = el(doc, "button", "score-button", String(score));
    button.disabled = locked;
    if (chosen === score) button.classList.add("selected");
    button.addEventListener("click", () => {
      void session
        .rateCurrent(axis, score)
        .catch(() => undefined) // queued offline; flush retries later
        .then(() => render(session, root));
    });
    row.appendChild(button);
  }
  if (locked) {
    row.appendChild(el(doc, "span", "locked-note", "listen first"));
  }
  return row;
}

function doneScreen(session: SurveySession, root: HTMLElement): HTMLElement {
  const doc = root.ownerDocument;
  const screen = el(doc, "section", "screen done-screen");
  screen.appendChild(el(doc, "h1", undefined, "All done"));
  screen.appendChild(el(
    doc, "p", undefined,
    `Thank you! You rated ${session.ratedPairs} samples on both axes.`,
  ));
  if (session.queue.pendingCount > 0) {
    screen.appendChild(el(
      doc, "p", "offline-note",
      "Some ratings are still being delivered; keep this page open.",
    ));
  }
  return screen;
}
