/**
 * Survey session state machine: rules screen first, then one sample per
 * screen. A sample can be rated only after its audio was started at
 * least once, and the respondent advances only when both axes carry a
 * score. Nothing in the session ever knows whether a sample is real or
 * synthesized.
 */

import { Axis, RatingQueue, SurveyApi, SurveyDoc } from "./api.js";

export const AXES: readonly Axis[] = ["naturalness", "intelligibility"];

export type Phase = "rules" | "rating" | "done";

export interface ScaleRow {
  score: number;
  quality: string;
  distortions: string;
}

/** The five-point quality/distortion legend shown to respondents. */
export const SCALE_LEGEND: readonly ScaleRow[] = [
  { score: 5, quality: "Excellent", distortions: "Imperceptible" },
  { score: 4, quality: "Good", distortions: "Tangible, but non-irritating" },
  { score: 3, quality: "Fair", distortions: "Sensible and slightly annoying" },
  { score: 2, quality: "Poor", distortions: "Annoying" },
  { score: 1, quality: "Bad", distortions: "Annoying and unpleasant" },
];

export class SurveySession {
  private cursorIndex = 0;
  private started = false;
  private scores = new Map<string, Map<Axis, number>>();
  private playedSamples = new Set<string>();
  private submittedCount = 0;

  constructor(
    readonly doc: SurveyDoc,
    readonly queue: RatingQueue,
  ) {
    queue.onDelivered = () => {
      this.submittedCount += 1;
    };
  }

  get phase(): Phase {
    if (!this.started) return "rules";
    return this.cursorIndex >= this.doc.samples.length ? "done" : "rating";
  }

  get cursor(): number {
    return this.cursorIndex;
  }

  get sampleCount(): number {
    return this.doc.samples.length;
  }

  get currentSample() {
    if (this.phase !== "rating") {
      throw new Error(`no current sample in phase ${this.phase}`);
    }
    return this.doc.samples[this.cursorIndex];
  }

  /** Leave the rules screen; the first sample becomes current. */
  acknowledgeRules(): void {
    this.started = true;
  }

  /** Record that playback of the current sample was started. */
  markPlayed(): void {
    this.playedSamples.add(this.currentSample.sampleId);
  }

  hasPlayedCurrent(): boolean {
    return this.playedSamples.has(this.currentSample.sampleId);
  }

  scoreFor(axis: Axis): number | undefined {
    return this.scores.get(this.currentSample.sampleId)?.get(axis);
  }

  /** Store a score locally and hand it to the submission queue.
   * Re-rating before advancing simply overwrites. */
  async rateCurrent(axis: Axis, score: number): Promise<void> {
    if (!Number.isInteger(score) || score < 1 || score > 5) {
      throw new Error(`score must be an integer in 1..5, got ${score}`);
    }
    if (!AXES.includes(axis)) {
      throw new Error(`unknown axis ${axis}`);
    }
    if (!this.hasPlayedCurrent()) {
      throw new Error("listen to the sample before rating it");
    }
    const sample = this.currentSample;
    let perAxis = this.scores.get(sample.sampleId);
    if (!perAxis) {
      perAxis = new Map();
      this.scores.set(sample.sampleId, perAxis);
    }
    perAxis.set(axis, score);
    await this.queue.enqueue({ sampleId: sample.sampleId, axis, score });
  }

  /** Both axes rated for the current sample? */
  canAdvance(): boolean {
    if (this.phase !== "rating") return false;
    const perAxis = this.scores.get(this.currentSample.sampleId);
    return perAxis !== undefined && AXES.every((axis) => perAxis.has(axis));
  }

  advance(): void {
    if (!this.canAdvance()) {
      throw new Error("rate both axes before moving on");
    }
    this.cursorIndex += 1;
  }

  /** Ratings confirmed by the backend. A finished survey implies at
   * least 2 x sampleCount once the queue is drained. */
  get deliveredRatings(): number {
    return this.submittedCount;
  }

  get ratedPairs(): number {
    let pairs = 0;
    for (const perAxis of this.scores.values()) {
      if (AXES.every((axis) => perAxis.has(axis))) pairs += 1;
    }
    return pairs;
  }

  get progressPercent(): number {
    if (this.sampleCount === 0) return 100;
    return Math.round((100 * this.cursorIndex) / this.sampleCount);
  }
}

export async function startSession(
  serverUrl: string,
  options: { seed?: number; api?: SurveyApi } = {},
): Promise<SurveySession> {
  const api = options.api ?? new SurveyApi(serverUrl);
  const doc = await api.createSurvey(options.seed);
  const queue = new RatingQueue(api, doc.token);
  return new SurveySession(doc, queue);
}
