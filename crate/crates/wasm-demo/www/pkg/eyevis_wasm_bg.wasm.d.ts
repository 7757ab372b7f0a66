/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_rendering_free: (a: number, b: number) => void;
export const binary_threshold: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number];
export const hsv_uv: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const illumination_distance: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
export const rendering_black_ratio: (a: number) => number;
export const rendering_pink_ratio: (a: number) => number;
export const rendering_rgba: (a: number) => [number, number];
export const sample_scene: (a: number, b: number, c: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
