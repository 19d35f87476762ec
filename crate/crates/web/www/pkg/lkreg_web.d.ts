/* tslint:disable */
/* eslint-disable */

export class Denoised {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    image(): Float64Array;
    readonly gapRel: number;
    readonly iterations: number;
    readonly tv: number;
}

/**
 * Image in row-major order with its shape.
 */
export class Image {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    data(): Float64Array;
    readonly cols: number;
    readonly rows: number;
}

export class Reconstruction {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    image(): Float64Array;
    relErrors(): Float64Array;
    residuals(): Float64Array;
    readonly nFinal: number;
    /**
     * `"discrepancy"`, `"cap"` or `"inner-failure"`.
     */
    readonly terminatedBy: string;
}

export class Scene {
    free(): void;
    [Symbol.dispose](): void;
    constructor(q: number, angles: number, noise: number, seed: number);
    /**
     * `accelerated` selects the Nesterov variant.
     */
    reconstruct(accelerated: boolean, n_max: number): Reconstruction;
    /**
     * Noisy sinogram, one row per angle.
     */
    sinogram(): Image;
    truth(): Image;
}

/**
 * TV denoising of a `rows × cols` image with fidelity weight `1/mu`.
 */
export function denoise(data: Float64Array, rows: number, cols: number, mu: number, nonneg: boolean): Denoised;

/**
 * Phantom with relative Gaussian noise `level`.
 */
export function noisyPhantom(q: number, level: number, seed: number): Image;

/**
 * Clean phantom of side `q`.
 */
export function phantom(q: number): Image;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_denoised_free: (a: number, b: number) => void;
    readonly __wbg_image_free: (a: number, b: number) => void;
    readonly __wbg_reconstruction_free: (a: number, b: number) => void;
    readonly __wbg_scene_free: (a: number, b: number) => void;
    readonly denoise: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
    readonly denoised_gapRel: (a: number) => number;
    readonly denoised_image: (a: number) => [number, number];
    readonly denoised_iterations: (a: number) => number;
    readonly denoised_tv: (a: number) => number;
    readonly image_cols: (a: number) => number;
    readonly image_data: (a: number) => [number, number];
    readonly image_rows: (a: number) => number;
    readonly noisyPhantom: (a: number, b: number, c: number) => [number, number, number];
    readonly phantom: (a: number) => [number, number, number];
    readonly reconstruction_image: (a: number) => [number, number];
    readonly reconstruction_nFinal: (a: number) => number;
    readonly reconstruction_relErrors: (a: number) => [number, number];
    readonly reconstruction_residuals: (a: number) => [number, number];
    readonly reconstruction_terminatedBy: (a: number) => [number, number];
    readonly scene_new: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly scene_reconstruct: (a: number, b: number, c: number) => [number, number, number];
    readonly scene_sinogram: (a: number) => number;
    readonly scene_truth: (a: number) => number;
    readonly __wbindgen_externrefs: WebAssembly.Table;
    readonly __wbindgen_malloc: (a: number, b: number) => number;
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
