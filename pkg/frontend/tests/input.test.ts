import { describe, expect, it } from "vitest";

import {
    chargeFraction,
    driveDirection,
    FULL_CHARGE_MS,
    impulseMagnitude,
    MIN_MAGNITUDE,
    stripMagnitude,
    turnDirection,
} from "../src/input.js";

describe("chargeFraction", () => {
    it("grows linearly and saturates at a full charge", () => {
        expect(chargeFraction(0)).toBe(0);
        expect(chargeFraction(FULL_CHARGE_MS / 2)).toBeCloseTo(0.5);
        expect(chargeFraction(FULL_CHARGE_MS)).toBe(1);
        expect(chargeFraction(10 * FULL_CHARGE_MS)).toBe(1);
    });

    it("treats garbage timing as an empty charge", () => {
        expect(chargeFraction(-50)).toBe(0);
        expect(chargeFraction(NaN)).toBe(0);
    });
});

describe("impulseMagnitude", () => {
    it("keeps the quickest tap above the detection floor", () => {
        expect(impulseMagnitude(0)).toBe(MIN_MAGNITUDE);
        expect(impulseMagnitude(1)).toBeGreaterThanOrEqual(MIN_MAGNITUDE);
    });

    it("reaches full scale at a full charge", () => {
        expect(impulseMagnitude(FULL_CHARGE_MS)).toBe(1);
        expect(impulseMagnitude(60_000)).toBe(1);
    });

    it("is monotone in hold time", () => {
        let prev = -1;
        for (const held of [0, 50, 150, 300, 450, 600, 900]) {
            const m = impulseMagnitude(held);
            expect(m).toBeGreaterThanOrEqual(prev);
            prev = m;
        }
    });
});

describe("stripMagnitude", () => {
    it("maps the center to zero through the dead zone", () => {
        expect(stripMagnitude(50, 100)).toBe(0);
        expect(stripMagnitude(51, 100)).toBe(0);
        expect(stripMagnitude(49, 100)).toBe(0);
    });

    it("maps the edges to full scale", () => {
        expect(stripMagnitude(0, 100)).toBe(-1);
        expect(stripMagnitude(100, 100)).toBe(1);
    });

    it("scales linearly between center and edge", () => {
        expect(stripMagnitude(75, 100)).toBeCloseTo(0.5);
        expect(stripMagnitude(25, 100)).toBeCloseTo(-0.5);
    });

    it("clamps clicks reported outside the strip", () => {
        expect(stripMagnitude(140, 100)).toBe(1);
        expect(stripMagnitude(-40, 100)).toBe(-1);
    });

    it("returns zero for a degenerate strip", () => {
        expect(stripMagnitude(10, 0)).toBe(0);
        expect(stripMagnitude(NaN, 100)).toBe(0);
    });
});

describe("key maps", () => {
    it("classifies drive keys with sign", () => {
        expect(driveDirection("w")).toBe(1);
        expect(driveDirection("ArrowUp")).toBe(1);
        expect(driveDirection("S")).toBe(-1);
        expect(driveDirection("ArrowDown")).toBe(-1);
        expect(driveDirection("x")).toBe(0);
    });

    it("classifies turn keys with sign", () => {
        expect(turnDirection("d")).toBe(1);
        expect(turnDirection("ArrowLeft")).toBe(-1);
        expect(turnDirection("w")).toBe(0);
    });
});
