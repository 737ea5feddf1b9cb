import { FetchFn, RatingQueue, SurveyApi, SurveyDoc } from "../src/api.js";
import { SurveySession } from "../src/session.js";

export function fakeDoc(count = 3): SurveyDoc {
  const samples = Array.from({ length: count }, (_, i) => ({
    sampleId: `s${String(i).padStart(2, "0")}`,
    audioUrl: `/audio/s${String(i).padStart(2, "0")}`,
  }));
  return { surveyId: "survey-test", token: "tok-test", samples };
}

export function okFetch(): { fetchFn: FetchFn; calls: Array<{ url: string; body: unknown }> } {
  const calls: Array<{ url: string; body: unknown }> = [];
  const fetchFn: FetchFn = async (url, init) => {
    calls.push({ url, body: init?.body ? JSON.parse(String(init.body)) : undefined });
    return new Response(JSON.stringify({ status: "ok" }), {
      status: 200,
      headers: { "Content-Type": "application/json" },
    });
  };
  return { fetchFn, calls };
}

export function makeSession(count = 3, fetchFn?: FetchFn): SurveySession {
  const api = new SurveyApi("http://test", {
    fetchFn: fetchFn ?? okFetch().fetchFn,
    retries: 1,
    retryDelayMs: 1,
  });
  const doc = fakeDoc(count);
  return new SurveySession(doc, new RatingQueue(api, doc.token));
}

export async function waitFor(
  predicate: () => boolean,
  timeoutMs = 5000,
  stepMs = 10,
): Promise<void> {
  const deadline = Date.now() + timeoutMs;
  while (!predicate()) {
    if (Date.now() > deadline) throw new Error("waitFor timed out");
    await new Promise((resolve) => setTimeout(resolve, stepMs));
  }
}
