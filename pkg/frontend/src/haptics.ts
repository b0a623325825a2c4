/**
 * Haptic channel presentation. The browser cannot vibrate a fingertip,
 * so the rendered waveform is shown as a pulsing indicator and an
 * optional audio buzz, both running at exactly the reported frequency.
 */

/** CSS animation period for the pulse dot, ms; 0 when quiescent. */
export function pulsePeriodMs(hapticHz: number): number {
    if (!Number.isFinite(hapticHz) || hapticHz <= 0) return 0;
    return 1000 / hapticHz;
}

/** Where the frequency sits in the configured band, 0..1. */
export function bandFraction(hapticHz: number, fMin: number, fMax: number): number {
    if (!(fMax > fMin)) return 0;
    return Math.min(1, Math.max(0, (hapticHz - fMin) / (fMax - fMin)));
}

/**
 * Sine buzz at the rendered frequency. Constructed lazily from a user
 * gesture (browsers refuse to start audio without one) and kept at zero
 * gain whenever the haptic channel is idle.
 */
export class AudioBuzz {
    private ctx: AudioContext | null = null;
    private osc: OscillatorNode | null = null;
    private gain: GainNode | null = null;
    enabled = false;

    toggle(): boolean {
        this.enabled = !this.enabled;
        if (this.enabled && this.ctx === null) {
            this.ctx = new AudioContext();
            this.osc = this.ctx.createOscillator();
            this.gain = this.ctx.createGain();
            this.gain.gain.value = 0;
            this.osc.connect(this.gain);
            this.gain.connect(this.ctx.destination);
            this.osc.start();
        }
        if (!this.enabled) this.update(0, false);
        return this.enabled;
    }

    update(hapticHz: number, active: boolean): void {
        if (this.ctx === null || this.osc === null || this.gain === null) return;
        const on = this.enabled && active && hapticHz > 0;
        const t = this.ctx.currentTime;
        if (on) this.osc.frequency.setTargetAtTime(hapticHz, t, 0.02);
        this.gain.gain.setTargetAtTime(on ? 0.08 : 0, t, 0.02);
    }
}
