/**
 * Chain DAG rendering: topological column layout emitted as an SVG string.
 * Node colors encode the gateway-reported status; held and suspended
 * branches stand out against the continuing ones.
 */

import type { ChainState } from "./api.js";

export const STATUS_COLORS: Record<string, string> = {
  pending: "#9aa5b1",
  ready: "#3e9c35",
  executing: "#1f7ae0",
  held: "#e0a800",
  suspended: "#e07b00",
  completed: "#2e6b2a",
  rejected: "#c0262d",
  cancelled: "#8b3a3f",
};

export interface LayoutNode {
  id: string;
  column: number;
  row: number;
  status: string;
}

/** Longest-path layering: a node sits one column right of its producers. */
export function layoutChain(chain: ChainState): LayoutNode[] {
  const producers = new Map<string, string[]>();
  for (const id of Object.keys(chain.nodes)) producers.set(id, []);
  for (const [from, to] of chain.edges) producers.get(to)?.push(from);

  const column = new Map<string, number>();
  const depth = (id: string): number => {
    const known = column.get(id);
    if (known !== undefined) return known;
    const ins = producers.get(id) ?? [];
    const value = ins.length === 0 ? 0 : Math.max(...ins.map(depth)) + 1;
    column.set(id, value);
    return value;
  };
  const rows = new Map<number, number>();
  const nodes: LayoutNode[] = [];
  for (const id of Object.keys(chain.nodes).sort()) {
    const col = depth(id);
    const row = rows.get(col) ?? 0;
    rows.set(col, row + 1);
    nodes.push({ id, column: col, row, status: chain.nodes[id]!.status });
  }
  return nodes;
}

const CELL_W = 170;
const CELL_H = 64;
const BOX_W = 140;
const BOX_H = 40;

export function renderChainSvg(chain: ChainState): string {
  const nodes = layoutChain(chain);
  const position = new Map(nodes.map((n) => [n.id, n]));
  const width = (Math.max(0, ...nodes.map((n) => n.column)) + 1) * CELL_W + 20;
  const height = (Math.max(0, ...nodes.map((n) => n.row)) + 1) * CELL_H + 20;

  const edges = chain.edges
    .map(([from, to]) => {
      const a = position.get(from);
      const b = position.get(to);
      if (!a || !b) return "";
      const x1 = a.column * CELL_W + BOX_W + 10;
      const y1 = a.row * CELL_H + BOX_H / 2 + 10;
      const x2 = b.column * CELL_W + 10;
      const y2 = b.row * CELL_H + BOX_H / 2 + 10;
      return `<line x1="${x1}" y1="${y1}" x2="${x2}" y2="${y2}" stroke="#667" marker-end="url(#arrow)"/>`;
    })
    .join("");

  const boxes = nodes
    .map((n) => {
      const x = n.column * CELL_W + 10;
      const y = n.row * CELL_H + 10;
      const color = STATUS_COLORS[n.status] ?? "#444";
      return (
        `<g data-node="${n.id}" data-status="${n.status}">` +
        `<rect x="${x}" y="${y}" width="${BOX_W}" height="${BOX_H}" rx="6" fill="${color}" opacity="0.88"/>` +
        `<text x="${x + BOX_W / 2}" y="${y + 17}" text-anchor="middle" class="dag-label">${escapeXml(n.id)}</text>` +
        `<text x="${x + BOX_W / 2}" y="${y + 32}" text-anchor="middle" class="dag-status">${n.status}</text>` +
        `</g>`
      );
    })
    .join("");

  return (
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">` +
    `<defs><marker id="arrow" markerWidth="8" markerHeight="8" refX="7" refY="3" orient="auto">` +
    `<path d="M0,0 L7,3 L0,6 z" fill="#667"/></marker></defs>` +
    edges +
    boxes +
    `</svg>`
  );
}

export function escapeXml(value: string): string {
  return value
    .replaceAll("&", "&amp;")
    .replaceAll("<", "&lt;")
    .replaceAll(">", "&gt;")
    .replaceAll('"', "&quot;");
}
