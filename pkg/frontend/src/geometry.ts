/** Viewport fitting, mirroring the engine's geometry operation for operation
 * so traces line up bit for bit with the compiler's reference output. */

import type { Box } from "./types.js";

export function expand(box: Box, marginFrac: number): Box {
  const mx = box.w * marginFrac;
  const my = box.h * marginFrac;
  return { x: box.x - mx, y: box.y - my, w: box.w + 2 * mx, h: box.h + 2 * my };
}

export function containsPoint(box: Box, px: number, py: number): boolean {
  return box.x <= px && px <= box.x + box.w && box.y <= py && py <= box.y + box.h;
}

export function containsBox(outer: Box, inner: Box, eps = 1e-9): boolean {
  return (
    inner.x >= outer.x - eps &&
    inner.y >= outer.y - eps &&
    inner.x + inner.w <= outer.x + outer.w + eps &&
    inner.y + inner.h <= outer.y + outer.h + eps
  );
}

/** Smallest screen-aspect rectangle framing the margin-expanded target,
 * translated (never shrunk) into the page; oversized dimensions center. */
export function fitRegion(
  target: Box,
  page: { width: number; height: number },
  screenAspect: number,
  marginFrac: number,
): Box {
  if (screenAspect <= 0) throw new Error("screenAspect must be > 0");
  if (marginFrac < 0 || marginFrac >= 0.5) throw new Error("marginFrac must be in [0, 0.5)");
  if (!containsBox({ x: 0, y: 0, w: page.width, h: page.height }, target)) {
    throw new Error("target must lie within the page");
  }

  const expanded = expand(target, marginFrac);
  let w: number;
  let h: number;
  if (expanded.w / expanded.h >= screenAspect) {
    w = expanded.w;
    h = expanded.w / screenAspect;
  } else {
    h = expanded.h;
    w = expanded.h * screenAspect;
  }
  const cx = expanded.x + expanded.w / 2;
  const cy = expanded.y + expanded.h / 2;
  let x = cx - w / 2;
  let y = cy - h / 2;
  x = w >= page.width ? (page.width - w) / 2 : Math.min(Math.max(x, 0), page.width - w);
  y = h >= page.height ? (page.height - h) / 2 : Math.min(Math.max(y, 0), page.height - h);
  return { x, y, w, h };
}

export function clampViewport(viewport: Box, page: { width: number; height: number }): Box {
  const { w, h } = viewport;
  const x =
    w >= page.width ? (page.width - w) / 2 : Math.min(Math.max(viewport.x, 0), page.width - w);
  const y =
    h >= page.height ? (page.height - h) / 2 : Math.min(Math.max(viewport.y, 0), page.height - h);
  return { x, y, w, h };
}
