/* tslint:disable */
/* eslint-disable */

/**
 * Samples configuration-model `d`-regular multigraphs on `n` vertices and
 * compares the fraction with girth at least `g` to its limiting value.
 */
export function girth_experiment(n: number, d: number, g: number, trials: number, seed: number): string;

/**
 * Fraction of permutations of `n` points with no `k`-cycle for each `n` up
 * to `n_max`, with the local-lemma bracket where its hypotheses hold.
 */
export function permutation_bracket(k: number, n_max: number): string;

/**
 * Exact probability that a uniform perfect matching of `K_N` has no edge
 * inside a fixed `s`-set, against `exp(-s^2 / 2N)`, for `s <= N/2`.
 */
export function traversal_curve(n: number): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly girth_experiment: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly permutation_bracket: (a: number, b: number) => [number, number, number, number];
    readonly traversal_curve: (a: number) => [number, number, number, number];
    readonly __wbindgen_externrefs: WebAssembly.Table;
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
