/** Audio feedback: built-in speech synthesis when available, else a beep.
 * Timing authority stays with the script clock; speech here is best effort. */

let audioCtx: AudioContext | null = null;

export function speak(text: string): void {
  if (typeof speechSynthesis !== "undefined" && typeof SpeechSynthesisUtterance !== "undefined") {
    const utterance = new SpeechSynthesisUtterance(text);
    utterance.rate = 1.2;
    speechSynthesis.cancel();
    speechSynthesis.speak(utterance);
    return;
  }
  beep(440, 120);
}

export function beep(freq = 660, durationMs = 80): void {
  if (typeof AudioContext === "undefined") return;
  audioCtx = audioCtx ?? new AudioContext();
  const osc = audioCtx.createOscillator();
  const gain = audioCtx.createGain();
  osc.frequency.value = freq;
  gain.gain.value = 0.05;
  osc.connect(gain).connect(audioCtx.destination);
  osc.start();
  osc.stop(audioCtx.currentTime + durationMs / 1000);
}

export function vibrate(durationMs: number, fallback: () => void): void {
  if (typeof navigator !== "undefined" && "vibrate" in navigator && navigator.vibrate(durationMs)) {
    return;
  }
  fallback();
}
