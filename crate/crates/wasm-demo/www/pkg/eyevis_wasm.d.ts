/* tslint:disable */
/* eslint-disable */

/**
 * An RGBA picture plus the area ratios it was derived from.
 */
export class Rendering {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly black_ratio: number;
    /**
     * For threshold renderings, the in-threshold share.
     */
    readonly pink_ratio: number;
    readonly rgba: Uint8Array;
}

export function binary_threshold(rgba: Uint8Array, width: number, height: number, lo: number, hi: number, config: string): Rendering;

export function hsv_uv(rgba: Uint8Array, width: number, height: number, config: string): Rendering;

export function illumination_distance(a: Uint8Array, b: Uint8Array, width: number, height: number): string;

export function sample_scene(width: number, height: number, painted: boolean): Uint8Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_rendering_free: (a: number, b: number) => void;
    readonly binary_threshold: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
    readonly hsv_uv: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly illumination_distance: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly rendering_black_ratio: (a: number) => number;
    readonly rendering_pink_ratio: (a: number) => number;
    readonly rendering_rgba: (a: number) => [number, number];
    readonly sample_scene: (a: number, b: number, c: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __wbindgen_start: () => void;
}

export type SyncInitInput = BufferSource | WebAssembly.Module;

/**
 * Instantiates the given `module`, which can either be bytes or
 * a precompiled `WebAssembly.Module`.
 *
 * @param {{ module: SyncInitInput }} module - Passing `SyncInitInput` directly is deprecated.
 *
 * @returns {InitOutput}
 */
export function initSync(module: { module: SyncInitInput } | SyncInitInput): InitOutput;

/**
 * If `module_or_path` is {RequestInfo} or {URL}, makes a request and
 * for everything else, calls `WebAssembly.instantiate` directly.
 *
 * @param {{ module_or_path: InitInput | Promise<InitInput> }} module_or_path - Passing `InitInput` directly is deprecated.
 *
 * @returns {Promise<InitOutput>}
 */
export default function __wbg_init (module_or_path?: { module_or_path: InitInput | Promise<InitInput> } | InitInput | Promise<InitInput>): Promise<InitOutput>;
