// Entry point: read the invite URL (?study=...&rater=...) and start the flow.

import { SurveyApi } from "./api.js";
import { DraftStore } from "./drafts.js";
import { SessionFlow } from "./flow.js";
import { renderFatal } from "./render.js";

export function bootstrap(win: Window, doc: Document): SessionFlow | null {
  const root = doc.getElementById("app");
  const banner = doc.getElementById("banner");
  if (!root || !banner) throw new Error("index.html must provide #app and #banner");
  const params = new URLSearchParams(win.location.search);
  const study = params.get("study");
  const rater = params.get("rater");
  if (!study || !rater) {
    renderFatal(
      doc,
      root,
      "This page needs the study and rater parameters from your invite link.",
    );
    return null;
  }
  const api = new SurveyApi(win.location.origin, study, rater);
  const drafts = new DraftStore(win.localStorage, `${study}:${rater}`);
  const flow = new SessionFlow(api, drafts, doc, root, banner);
  void flow.start();
  return flow;
}

declare global {
  interface Window {
    __radsimpBootstrapped?: boolean;
  }
}

if (typeof window !== "undefined" && typeof document !== "undefined" && !window.__radsimpBootstrapped) {
  window.__radsimpBootstrapped = true;
  bootstrap(window, document);
}
