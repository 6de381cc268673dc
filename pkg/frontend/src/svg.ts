/**
 * Minimal deterministic SVG plotting primitives: scales, ticks, lines,
 * legend. Output carries no timestamps or random ids, so identical
 * inputs render byte-identical files.
 */

export type Scale = (value: number) => number;

export function linearScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const span = d1 - d0 || 1;
  return (v) => r0 + ((v - d0) / span) * (r1 - r0);
}

export function logScale(d0: number, d1: number, r0: number, r1: number): Scale {
  const l0 = Math.log10(d0);
  const span = Math.log10(d1) - l0 || 1;
  return (v) => r0 + ((Math.log10(v) - l0) / span) * (r1 - r0);
}

/** Round ticks covering [min, max] at a 1/2/5 step. */
export function linearTicks(min: number, max: number, count = 6): number[] {
  if (min === max) return [min];
  const rawStep = (max - min) / Math.max(1, count - 1);
  const power = Math.pow(10, Math.floor(Math.log10(rawStep)));
  const candidates = [1, 2, 5, 10].map((m) => m * power);
  const step = candidates.find((s) => s >= rawStep) ?? candidates[3];
  const ticks: number[] = [];
  for (let t = Math.ceil(min / step) * step; t <= max + step * 1e-9; t += step) {
    ticks.push(Number(t.toPrecision(12)));
  }
  return ticks;
}

/** Powers of ten covering [min, max], for log axes. */
export function decadeTicks(min: number, max: number): number[] {
  const lo = Math.floor(Math.log10(min));
  const hi = Math.ceil(Math.log10(max));
  const ticks: number[] = [];
  for (let p = lo; p <= hi; p += 1) {
    ticks.push(Math.pow(10, p));
  }
  return ticks;
}

export function formatDecade(value: number): string {
  const p = Math.round(Math.log10(value));
  return `1e${p}`;
}

export function formatTick(value: number): string {
  if (value === 0) return "0";
  const abs = Math.abs(value);
  if (abs >= 1e5 || abs < 1e-3) return value.toExponential(0).replace("+", "");
  return String(Number(value.toPrecision(6)));
}

export function escapeXml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;");
}

export function polyline(points: { x: number; y: number }[], color: string): string {
  const coords = points.map((p) => `${p.x.toFixed(2)},${p.y.toFixed(2)}`).join(" ");
  return `<polyline fill="none" stroke="${color}" stroke-width="1.8" points="${coords}"/>`;
}

const PALETTE: Record<string, string> = {
  admm: "#1f77b4",
  censoring: "#ff7f0e",
  oadmm: "#2ca02c",
  soadmm: "#d62728",
};
const FALLBACK = ["#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"];

export function seriesColor(name: string, index: number): string {
  return PALETTE[name] ?? FALLBACK[index % FALLBACK.length];
}

export function svgDocument(width: number, height: number, body: string[]): string {
  return [
    `<svg xmlns="http://www.w3.org/2000/svg" width="${width}" height="${height}" viewBox="0 0 ${width} ${height}">`,
    '<rect width="100%" height="100%" fill="white"/>',
    ...body,
    "</svg>",
    "",
  ].join("\n");
}
