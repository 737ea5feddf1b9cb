// @vitest-environment jsdom
import { describe, expect, it } from "vitest";

import { render } from "../src/ui.js";
import { makeSession, waitFor } from "./helpers.js";

function mount() {
  document.body.innerHTML = '<main id="app"></main>';
  return document.getElementById("app") as HTMLElement;
}

function click(root: HTMLElement, selector: string) {
  const node = root.querySelector<HTMLButtonElement>(selector);
  if (!node) throw new Error(`missing ${selector}`);
  node.click();
}

describe("survey UI", () => {
  it("shows the rules and the five-point legend before any sample", () => {
    const root = mount();
    const session = makeSession();
    render(session, root);
    expect(root.querySelector(".rules-screen")).toBeTruthy();
    const legendRows = root.querySelectorAll(".scale-legend tr");
    expect(legendRows.length).toBe(6); // header + 5 scores
    expect(root.textContent).toContain("Excellent");
    expect(root.textContent).toContain("Annoying and unpleasant");
    expect(root.querySelector("audio")).toBeNull();
  });

  it("locks rating buttons until the sample was played", async () => {
    const root = mount();
    const session = makeSession();
    render(session, root);
    click(root, ".start-button");
    expect(root.querySelector(".rating-screen")).toBeTruthy();
    const scoreButton = root.querySelector<HTMLButtonElement>(".score-button");
    expect(scoreButton?.disabled).toBe(true);
    expect(root.querySelector<HTMLButtonElement>(".next-button")?.disabled).toBe(true);

    click(root, ".play-button");
    expect(session.hasPlayedCurrent()).toBe(true);
    expect(root.querySelector<HTMLButtonElement>(".score-button")?.disabled).toBe(false);
  });

  it("enables next only after both axes and walks to the done screen", async () => {
    const root = mount();
    const session = makeSession(2);
    render(session, root);
    click(root, ".start-button");
    for (let i = 0; i < 2; i++) {
      click(root, ".play-button");
      click(root, ".axis-naturalness .score-button:nth-of-type(5)");
      await waitFor(() => session.scoreFor("naturalness") === 5);
      expect(root.querySelector<HTMLButtonElement>(".next-button")?.disabled).toBe(true);
      click(root, ".axis-intelligibility .score-button:nth-of-type(4)");
      await waitFor(() => session.canAdvance());
      await waitFor(
        () => root.querySelector<HTMLButtonElement>(".next-button")?.disabled === false,
      );
      click(root, ".next-button");
    }
    expect(session.phase).toBe("done");
    render(session, root);
    expect(root.textContent).toContain("All done");
  });

  it("audio element points at the blind URL and allows replay", () => {
    const root = mount();
    const session = makeSession();
    render(session, root);
    click(root, ".start-button");
    const audio = root.querySelector("audio");
    expect(audio?.getAttribute("src")).toBe("/audio/s00");
    click(root, ".play-button");
    expect(root.querySelector(".play-button")?.textContent).toBe("Replay");
    click(root, ".play-button"); // replay is always permitted
    expect(session.hasPlayedCurrent()).toBe(true);
  });
});
