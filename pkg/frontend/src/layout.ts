/** Vertex positioning: grid coordinates when the labels encode them,
 * otherwise an even spread on a circle. */

export interface Point {
  x: number;
  y: number;
}

const GRID_LABEL = /^n(\d+)x(\d+)$/;

export const CELL = 90;
export const MARGIN = 60;

export function gridPosition(label: string): { row: number; col: number } | null {
  const match = GRID_LABEL.exec(label);
  if (!match) return null;
  return { row: Number(match[1]), col: Number(match[2]) };
}

export interface Layout {
  points: Map<string, Point>;
  width: number;
  height: number;
}

export function layoutVertices(vertices: string[]): Layout {
  const parsed = vertices.map((v) => ({ v, pos: gridPosition(v) }));
  if (parsed.length > 0 && parsed.every((p) => p.pos !== null)) {
    const points = new Map<string, Point>();
    let maxRow = 0;
    let maxCol = 0;
    for (const { v, pos } of parsed) {
      const { row, col } = pos!;
      maxRow = Math.max(maxRow, row);
      maxCol = Math.max(maxCol, col);
      points.set(v, { x: MARGIN + col * CELL, y: MARGIN + row * CELL });
    }
    return {
      points,
      width: 2 * MARGIN + maxCol * CELL,
      height: 2 * MARGIN + maxRow * CELL,
    };
  }
  // Fallback: a circle, so arbitrary vertex names still render.
  const n = vertices.length;
  const radius = Math.max(CELL, (n * CELL) / (2 * Math.PI));
  const center = MARGIN + radius;
  const points = new Map<string, Point>();
  vertices.forEach((v, i) => {
    const angle = (2 * Math.PI * i) / Math.max(n, 1) - Math.PI / 2;
    points.set(v, {
      x: center + radius * Math.cos(angle),
      y: center + radius * Math.sin(angle),
    });
  });
  const side = 2 * (MARGIN + radius);
  return { points, width: side, height: side };
}
