// Reconnect policy: exponential backoff, capped.

export const BASE_DELAY_MS = 500;
export const MAX_DELAY_MS = 8000;

export function reconnectDelay(attempt: number): number {
  const d = BASE_DELAY_MS * 2 ** Math.max(0, attempt);
  return Math.min(d, MAX_DELAY_MS);
}
