/**
 * Map samples onto SVG polyline points spanning a width x height view box.
 * The y axis is inverted so larger samples sit higher; a constant series
 * draws as a horizontal line through the middle.
 */
export function sparklinePoints(
  samples: readonly number[],
  width: number,
  height: number,
): string {
  if (samples.length === 0) {
    return "";
  }
  let lo = Infinity;
  let hi = -Infinity;
  for (const v of samples) {
    if (v < lo) lo = v;
    if (v > hi) hi = v;
  }
  const span = hi - lo;
  const xStep = samples.length > 1 ? width / (samples.length - 1) : 0;
  const points: string[] = [];
  for (let i = 0; i < samples.length; i += 1) {
    const x = samples.length > 1 ? i * xStep : width / 2;
    const y = span === 0 ? height / 2 : height - (((samples[i] as number) - lo) / span) * height;
    points.push(`${round2(x)},${round2(y)}`);
  }
  return points.join(" ");
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}
