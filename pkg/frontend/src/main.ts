import { RatingQueue } from "./api.js";
import { startSession } from "./session.js";
import { render } from "./ui.js";

async function boot(): Promise<void> {
  const root = document.getElementById("app");
  if (!root) throw new Error("missing #app container");
  const params = new URLSearchParams(window.location.search);
  const server = params.get("server") ?? "";
  try {
    const session = await startSession(server);
    (session.queue as RatingQueue).attachToWindow(window);
    render(session, root);
  } catch (error) {
    root.textContent = "";
    const note = document.createElement("p");
    note.className = "error";
    note.textContent = `Could not reach the survey server: ${String(error)}`;
    const retry = document.createElement("button");
    retry.textContent = "Retry";
    retry.addEventListener("click", () => void boot());
    root.appendChild(note);
    root.appendChild(retry);
  }
}

void boot();
