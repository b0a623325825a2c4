/**
 * Operator input mapping: keys and pointer gestures to impulse
 * magnitudes in [-1, 1].
 *
 * A keyboard has no pressure sensor, so holding the key stands in for
 * pressing harder: magnitude grows linearly with hold time up to
 * FULL_CHARGE_MS. The floor keeps even the quickest tap strong enough
 * to clear the pulse detection threshold on the sensing side.
 */

export const FULL_CHARGE_MS = 600;
export const MIN_MAGNITUDE = 0.25;

/** Fraction of a full press for a key held this long. */
export function chargeFraction(heldMs: number, fullChargeMs: number = FULL_CHARGE_MS): number {
    if (!Number.isFinite(heldMs) || heldMs <= 0) return 0;
    return Math.min(1, heldMs / fullChargeMs);
}

/** Unsigned impulse magnitude for a key held this long. */
export function impulseMagnitude(heldMs: number, fullChargeMs: number = FULL_CHARGE_MS): number {
    return MIN_MAGNITUDE + (1 - MIN_MAGNITUDE) * chargeFraction(heldMs, fullChargeMs);
}

/**
 * Signed magnitude for a click on the tap strip: the horizontal offset
 * from center sets both direction and strength. A small dead zone
 * around center maps to 0 so a sloppy center click sends nothing.
 */
export function stripMagnitude(offsetX: number, width: number, deadZone: number = 0.08): number {
    if (!(width > 0) || !Number.isFinite(offsetX)) return 0;
    const v = Math.min(1, Math.max(-1, (2 * offsetX) / width - 1));
    return Math.abs(v) < deadZone ? 0 : v;
}

export const FORWARD_KEYS = ["w", "W", "ArrowUp"];
export const REVERSE_KEYS = ["s", "S", "ArrowDown"];
export const TURN_LEFT_KEYS = ["a", "A", "ArrowLeft"];
export const TURN_RIGHT_KEYS = ["d", "D", "ArrowRight"];

/** Key to impulse direction: +1 forward, -1 reverse, 0 not a drive key. */
export function driveDirection(key: string): number {
    if (FORWARD_KEYS.includes(key)) return 1;
    if (REVERSE_KEYS.includes(key)) return -1;
    return 0;
}

/** Key to turn rate: +1 right, -1 left, 0 not a turn key. */
export function turnDirection(key: string): number {
    if (TURN_RIGHT_KEYS.includes(key)) return 1;
    if (TURN_LEFT_KEYS.includes(key)) return -1;
    return 0;
}
