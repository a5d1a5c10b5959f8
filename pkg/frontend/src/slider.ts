// Time-bar debouncing: dragging fires a stream of raw input events; the
// server sees exactly one set_date per settled change.

export const SLIDER_DEBOUNCE_MS = 150;

export class DebouncedSlider {
  private timer: ReturnType<typeof setTimeout> | null = null;
  private pending: string | null = null;

  constructor(
    private readonly send: (date: string) => void,
    private readonly debounceMs: number = SLIDER_DEBOUNCE_MS,
  ) {}

  /** Raw slider movement; restarts the settle timer. */
  input(date: string): void {
    this.pending = date;
    if (this.timer !== null) {
      clearTimeout(this.timer);
    }
    this.timer = setTimeout(() => this.flush(), this.debounceMs);
  }

  /** Emit the pending date immediately (used on blur/change). */
  flush(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    if (this.pending !== null) {
      const date = this.pending;
      this.pending = null;
      this.send(date);
    }
  }

  cancel(): void {
    if (this.timer !== null) {
      clearTimeout(this.timer);
      this.timer = null;
    }
    this.pending = null;
  }
}
