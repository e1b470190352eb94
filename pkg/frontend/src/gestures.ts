/** Pointer-stream gesture recognizer.
 *
 * Feed it timestamped down/move/up samples (and periodic ticks while a press
 * is held); it emits reader commands:
 *
 *   press-and-hold  >= 500 ms within 10 px      -> press_at (select under point)
 *   horizontal flick >= 60 px within <= 300 ms  -> flick next/prev
 *   double-click: two downs within 400 ms/20 px -> zoom_toggle
 *   sustained circular motion about the center  -> wheel_move deltas
 *   pointer-up after circular motion            -> wheel_release
 */

import type { Command } from "./engine.js";

export interface GestureConfig {
  holdMs: number;
  holdSlopPx: number;
  flickDistancePx: number;
  flickMaxMs: number;
  doubleClickMs: number;
  doubleClickSlopPx: number;
  wheelCenter: { x: number; y: number };
  wheelRadiusMin: number;
  wheelRadiusMax: number;
  wheelLatchDegrees: number;
}

export const DEFAULT_GESTURES: GestureConfig = {
  holdMs: 500,
  holdSlopPx: 10,
  flickDistancePx: 60,
  flickMaxMs: 300,
  doubleClickMs: 400,
  doubleClickSlopPx: 20,
  wheelCenter: { x: 0, y: 0 },
  wheelRadiusMin: 40,
  wheelRadiusMax: 400,
  wheelLatchDegrees: 15,
};

export interface PointerSample {
  type: "down" | "move" | "up";
  x: number;
  y: number;
  t: number; // ms
}

const DEG = 180 / Math.PI;

function wrapDegrees(delta: number): number {
  while (delta > 180) delta -= 360;
  while (delta <= -180) delta += 360;
  return delta;
}

export class GestureRecognizer {
  readonly config: GestureConfig;

  private down: { x: number; y: number; t: number } | null = null;
  private lastDown: { x: number; y: number; t: number } | null = null;
  private moved = false;
  private holdFired = false;
  private wheelLatched = false;
  private wheelAngle = 0;
  private wheelPending = 0;
  private last: { x: number; y: number } | null = null;

  constructor(config: Partial<GestureConfig> = {}) {
    this.config = { ...DEFAULT_GESTURES, ...config };
  }

  feed(sample: PointerSample): Command[] {
    switch (sample.type) {
      case "down":
        return this.onDown(sample);
      case "move":
        return this.onMove(sample);
      case "up":
        return this.onUp(sample);
    }
  }

  /** Call periodically (or from a timer) while a press is held so the hold
   * can fire without waiting for pointer-up. */
  tick(t: number): Command[] {
    if (
      this.down &&
      !this.moved &&
      !this.holdFired &&
      !this.wheelLatched &&
      t - this.down.t >= this.config.holdMs
    ) {
      this.holdFired = true;
      return [{ kind: "press_at", x: this.down.x, y: this.down.y }];
    }
    return [];
  }

  private angleAt(x: number, y: number): number {
    const { wheelCenter } = this.config;
    return Math.atan2(y - wheelCenter.y, x - wheelCenter.x) * DEG;
  }

  private inWheelBand(x: number, y: number): boolean {
    const { wheelCenter, wheelRadiusMin, wheelRadiusMax } = this.config;
    const r = Math.hypot(x - wheelCenter.x, y - wheelCenter.y);
    return r >= wheelRadiusMin && r <= wheelRadiusMax;
  }

  private onDown(sample: PointerSample): Command[] {
    const commands: Command[] = [];
    const prev = this.lastDown;
    if (
      prev &&
      sample.t - prev.t <= this.config.doubleClickMs &&
      Math.hypot(sample.x - prev.x, sample.y - prev.y) <= this.config.doubleClickSlopPx
    ) {
      commands.push({ kind: "zoom_toggle" });
      this.lastDown = null; // a triple click is not two doubles
    } else {
      this.lastDown = { x: sample.x, y: sample.y, t: sample.t };
    }
    this.down = { x: sample.x, y: sample.y, t: sample.t };
    this.moved = false;
    this.holdFired = false;
    this.wheelLatched = false;
    this.wheelAngle = this.angleAt(sample.x, sample.y);
    this.wheelPending = 0;
    this.last = { x: sample.x, y: sample.y };
    return commands;
  }

  private onMove(sample: PointerSample): Command[] {
    if (!this.down || !this.last) return [];
    const commands: Command[] = [];
    const fromStart = Math.hypot(sample.x - this.down.x, sample.y - this.down.y);
    if (fromStart > this.config.holdSlopPx) this.moved = true;

    if (this.wheelLatched) {
      const angle = this.angleAt(sample.x, sample.y);
      const delta = wrapDegrees(angle - this.wheelAngle);
      this.wheelAngle = angle;
      if (delta !== 0) commands.push({ kind: "wheel_move", deltaDegrees: delta });
    } else if (!this.holdFired && this.inWheelBand(this.down.x, this.down.y) && this.inWheelBand(sample.x, sample.y)) {
      const angle = this.angleAt(sample.x, sample.y);
      this.wheelPending += wrapDegrees(angle - this.wheelAngle);
      this.wheelAngle = angle;
      if (Math.abs(this.wheelPending) >= this.config.wheelLatchDegrees) {
        this.wheelLatched = true;
        commands.push({ kind: "wheel_move", deltaDegrees: this.wheelPending });
        this.wheelPending = 0;
      }
    }

    this.last = { x: sample.x, y: sample.y };
    return commands;
  }

  private onUp(sample: PointerSample): Command[] {
    const down = this.down;
    this.down = null;
    this.last = null;
    if (!down) return [];

    if (this.wheelLatched) {
      this.wheelLatched = false;
      return [{ kind: "wheel_release" }];
    }
    if (this.holdFired) return [];

    const dx = sample.x - down.x;
    const dy = sample.y - down.y;
    const duration = sample.t - down.t;
    if (
      Math.abs(dx) >= this.config.flickDistancePx &&
      Math.abs(dx) > Math.abs(dy) &&
      duration <= this.config.flickMaxMs
    ) {
      // content follows the finger: dragging left reveals the next page
      return [{ kind: "flick", direction: dx < 0 ? "next" : "prev" }];
    }
    if (
      !this.moved &&
      Math.hypot(dx, dy) <= this.config.holdSlopPx &&
      duration >= this.config.holdMs
    ) {
      return [{ kind: "press_at", x: down.x, y: down.y }];
    }
    return [];
  }
}
