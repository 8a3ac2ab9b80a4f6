/** Trailing-edge debounce: the wrapped function runs once the calls go
 * quiet for `waitMs`, with the arguments of the last call. */

export interface Debounced<A extends unknown[]> {
  (...args: A): void;
  cancel(): void;
  /** Run a pending call right now instead of waiting out the timer. */
  flush(): void;
}

export function debounce<A extends unknown[]>(
  fn: (...args: A) => void,
  waitMs: number,
): Debounced<A> {
  let timer: ReturnType<typeof setTimeout> | null = null;
  let lastArgs: A | null = null;

  const debounced = (...args: A): void => {
    lastArgs = args;
    if (timer !== null) clearTimeout(timer);
    timer = setTimeout(() => {
      timer = null;
      const argsNow = lastArgs as A;
      lastArgs = null;
      fn(...argsNow);
    }, waitMs);
  };

  debounced.cancel = (): void => {
    if (timer !== null) clearTimeout(timer);
    timer = null;
    lastArgs = null;
  };

  debounced.flush = (): void => {
    if (timer === null) return;
    clearTimeout(timer);
    timer = null;
    const argsNow = lastArgs as A;
    lastArgs = null;
    fn(...argsNow);
  };

  return debounced;
}
