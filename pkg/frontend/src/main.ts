import { GestureRecognizer } from "./gestures.js";
import { ReaderApp } from "./ui.js";

const params = new URLSearchParams(location.search);
const server = params.get("server") ?? "http://127.0.0.1:8000";

const root = document.getElementById("app") as HTMLElement;
const canvas = document.getElementById("page") as HTMLCanvasElement;
const app = new ReaderApp(root, server);

const recognizer = new GestureRecognizer({
  wheelCenter: { x: canvas.width / 2, y: canvas.height / 2 },
  wheelRadiusMin: 50,
  wheelRadiusMax: 360,
});

// Pointer coordinates arrive in canvas pixels; the engine's press_at expects
// page units, so scale through the current page size when a document is open.
function canvasPoint(event: PointerEvent): { x: number; y: number } {
  const rect = canvas.getBoundingClientRect();
  return {
    x: ((event.clientX - rect.left) / rect.width) * canvas.width,
    y: ((event.clientY - rect.top) / rect.height) * canvas.height,
  };
}

let holdTimer: number | undefined;

canvas.addEventListener("pointerdown", (event) => {
  const p = canvasPoint(event);
  for (const command of recognizer.feed({ type: "down", ...p, t: event.timeStamp })) {
    app.dispatch(command);
  }
  clearTimeout(holdTimer);
  holdTimer = window.setTimeout(() => {
    for (const command of recognizer.tick(event.timeStamp + 500)) app.dispatch(command);
  }, 500);
});

canvas.addEventListener("pointermove", (event) => {
  const p = canvasPoint(event);
  for (const command of recognizer.feed({ type: "move", ...p, t: event.timeStamp })) {
    app.dispatch(command);
  }
});

canvas.addEventListener("pointerup", (event) => {
  clearTimeout(holdTimer);
  const p = canvasPoint(event);
  for (const command of recognizer.feed({ type: "up", ...p, t: event.timeStamp })) {
    app.dispatch(command);
  }
});

document.addEventListener("keydown", (event) => {
  if (event.key === " ") app.dispatch({ kind: "toggle_play" });
  else if (event.key === "ArrowRight") app.dispatch({ kind: "flick", direction: "next" });
  else if (event.key === "ArrowLeft") app.dispatch({ kind: "flick", direction: "prev" });
  else if (event.key === "z") app.dispatch({ kind: "zoom_toggle" });
});

void app.start();
