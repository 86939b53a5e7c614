/* tslint:disable */
/* eslint-disable */

export class Model {
    free(): void;
    [Symbol.dispose](): void;
    /**
     * JSON ego network of `word`, split into `k` clusters.
     */
    egoNetwork(word: string, k: number, exclude_query: boolean): string;
    /**
     * JSON list of every basis with its top `count` words.
     */
    topics(count: number): string;
    /**
     * Tokenizes `text` (one document per line) and trains DIVE with `dims` bases.
     */
    constructor(text: string, dims: number, epochs: number, seed: bigint);
    vocabSize(): number;
}

/**
 * Synthetic corpus text with roughly `tokens` raw tokens.
 */
export function sampleCorpus(tokens: number, seed: bigint): string;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_model_free: (a: number, b: number) => void;
    readonly model_egoNetwork: (a: number, b: number, c: number, d: number, e: number) => [number, number, number, number];
    readonly model_topics: (a: number, b: number) => [number, number];
    readonly model_train: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
    readonly model_vocabSize: (a: number) => number;
    readonly sampleCorpus: (a: number, b: bigint) => [number, number];
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
