import { ApiClient, Mode } from "./api.js";
import { CompareView } from "./compare.js";
import { renderBanner, renderBars, renderTranscript, renderTree } from "./render.js";
import { ChatSession } from "./session.js";

// same-origin by default; `?api=http://host:port` points the page at a
// service running elsewhere (it sends permissive CORS headers)
const api = new ApiClient(new URLSearchParams(window.location.search).get("api") ?? "");

function el<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (node === null) {
    throw new Error(`missing element #${id}`);
  }
  return node as T;
}

function paintSingle(session: ChatSession): void {
  el("transcript").innerHTML = renderTranscript(session.transcript);
  el("bars").innerHTML = renderBars(session.bars);
  el("tree").innerHTML = renderTree(session.tree);
  el("banner").innerHTML = renderBanner(session.banner, session.notice);
  el("transcript").scrollTop = el("transcript").scrollHeight;
}

function paintCompare(view: CompareView): void {
  for (const [column, prefix] of [
    [view.left, "left"],
    [view.right, "right"],
  ] as const) {
    el(`${prefix}-transcript`).innerHTML = renderTranscript(column.session.transcript);
    el(`${prefix}-bars`).innerHTML = renderBars(column.session.bars);
    el(`${prefix}-tree`).innerHTML = renderTree(column.session.tree);
    el(`${prefix}-panel`).classList.toggle("stale", column.stale);
  }
}

async function boot(): Promise<void> {
  const session = new ChatSession(api);
  const compare = new CompareView(api);
  let view: "single" | "compare" = "single";
  await session.start();

  const input = el<HTMLInputElement>("utterance");
  const form = el<HTMLFormElement>("composer");
  const modeSelect = el<HTMLSelectElement>("mode");
  const viewToggle = el<HTMLButtonElement>("toggle-compare");

  form.addEventListener("submit", (event) => {
    event.preventDefault();
    const text = input.value;
    if (text.trim() === "") {
      return; // rejected client-side: no request
    }
    input.value = "";
    if (view === "single") {
      void session.send(text).then(() => paintSingle(session));
    } else {
      void compare.send(text).then(() => paintCompare(compare));
    }
  });

  modeSelect.addEventListener("change", () => {
    void session.switchMode(modeSelect.value as Mode).then(() => paintSingle(session));
  });

  viewToggle.addEventListener("click", () => {
    view = view === "single" ? "compare" : "single";
    el("single-view").hidden = view !== "single";
    el("compare-view").hidden = view !== "compare";
    if (view === "compare" && compare.left.session.id === null) {
      void compare.start().then(() => paintCompare(compare));
    }
  });

  el<HTMLButtonElement>("retry").addEventListener("click", () => {
    void session.retry().then(() => paintSingle(session));
  });

  paintSingle(session);
}

void boot();
