/* tslint:disable */
/* eslint-disable */

/**
 * Real part of a two-dimensional cutoff on `[0, t_max]^2`.
 */
export function cutoff_heatmap(name: string, resolution: number, t_max: number): Float64Array;

/**
 * Names of the built-in cutoffs.
 */
export function cutoff_names(): string[];

/**
 * `|Lambda_n(x, y)|` over `x` in `[-1, 1]^2` for fixed `y`, with `alpha`, `beta` shared by
 * both coordinates.
 */
export function kernel_heatmap(name: string, n: number, alpha: number, beta: number, y1: number, y2: number, resolution: number): Float64Array;

/**
 * Synthesis needlet of the tight sin-splice frame at level `j`, centred at the cubature node
 * whose tile contains `(x1, x2)`. The first two entries are the node, the rest the grid.
 */
export function needlet_heatmap(j: number, alpha: number, beta: number, x1: number, x2: number, resolution: number): Float64Array;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly cutoff_heatmap: (a: number, b: number, c: number, d: number) => [number, number, number, number];
    readonly cutoff_names: () => [number, number];
    readonly kernel_heatmap: (a: number, b: number, c: number, d: number, e: number, f: number, g: number, h: number) => [number, number, number, number];
    readonly needlet_heatmap: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
    readonly __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
    readonly __externref_table_dealloc: (a: number) => void;
    readonly __wbindgen_free: (a: number, b: number, c: number) => void;
    readonly __externref_drop_slice: (a: number, b: number) => void;
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
