import { CategoryScore, TreeJson, TreeNodeJson } from "./api.js";
import { Bubble } from "./session.js";

/** Pure HTML-string renderers so view logic is testable without a DOM. */

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function renderTranscript(bubbles: Bubble[]): string {
  return bubbles
    .map(
      (b) =>
        `<div class="bubble ${b.role}"><span class="who">${b.role}</span>` +
        `<span class="text">${escapeHtml(b.text)}</span></div>`,
    )
    .join("");
}

/** Bars show the raw accumulated scores (not normalized): the user watches
 * interest build up across turns. Widths are scaled to the current maximum
 * purely for display; the printed value is the score itself. */
export function renderBars(bars: CategoryScore[]): string {
  if (bars.length === 0) {
    return '<div class="bars empty">no interest signal yet</div>';
  }
  const peak = Math.max(...bars.map((b) => b.score), 0);
  const rows = bars.map((b) => {
    const width = peak > 0 ? Math.max(1, Math.round((b.score / peak) * 100)) : 1;
    return (
      `<div class="bar-row" data-id="${escapeHtml(b.id)}">` +
      `<span class="label">${escapeHtml(b.name)}</span>` +
      `<span class="bar" style="width:${width}%"></span>` +
      `<span class="value">${b.score.toFixed(4)}</span></div>`
    );
  });
  return `<div class="bars">${rows.join("")}</div>`;
}

function renderNode(node: TreeNodeJson): string {
  const score = node.score === null ? "" : ` <span class="score">${node.score.toFixed(3)}</span>`;
  const children =
    node.children.length === 0
      ? ""
      : `<ul>${node.children.map(renderNode).join("")}</ul>`;
  return (
    `<li class="node ${node.layer}" data-id="${escapeHtml(node.id)}">` +
    `${escapeHtml(node.name)}${score}${children}</li>`
  );
}

export function renderTree(tree: TreeJson | null): string {
  if (tree === null) {
    return '<div class="tree empty">no response yet</div>';
  }
  const badge = `<span class="act-badge act-${tree.act.toLowerCase()}">${tree.act}</span>`;
  const flags =
    tree.flags.length === 0
      ? ""
      : `<span class="flags">${tree.flags.map(escapeHtml).join(", ")}</span>`;
  const nodes =
    tree.nodes.length === 0 ? "" : `<ul class="middles">${tree.nodes.map(renderNode).join("")}</ul>`;
  return `<div class="tree">${badge}${flags}${nodes}</div>`;
}

export function renderBanner(banner: string | null, notice: string | null): string {
  const parts: string[] = [];
  if (banner !== null) {
    parts.push(`<div class="banner error">${escapeHtml(banner)}</div>`);
  }
  if (notice !== null) {
    parts.push(`<div class="banner notice">${escapeHtml(notice)}</div>`);
  }
  return parts.join("");
}
