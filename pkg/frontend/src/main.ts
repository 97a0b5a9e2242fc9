/** Browser entry point: reads the base URL and annotator id, then starts
 * the qualification → annotate flow.
 */

import { App } from "./app.js";

function readConfig(): { baseUrl: string; annotatorId: string } {
  const params = new URLSearchParams(window.location.search);
  const baseUrl =
    params.get("base") ??
    document.querySelector<HTMLMetaElement>('meta[name="review-api-base"]')?.content ??
    window.location.origin;
  let annotatorId = params.get("annotator") ?? localStorage.getItem("annotator_id") ?? "";
  if (!annotatorId) {
    annotatorId = `anon-${Math.random().toString(36).slice(2, 10)}`;
  }
  localStorage.setItem("annotator_id", annotatorId);
  return { baseUrl, annotatorId };
}

const root = document.getElementById("app");
if (root) {
  const { baseUrl, annotatorId } = readConfig();
  const app = new App(root, { baseUrl, annotatorId });
  void app.start().catch((error: unknown) => {
    root.textContent = `Failed to start: ${error instanceof Error ? error.message : String(error)}`;
  });
}
