/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_denoised_free: (a: number, b: number) => void;
export const __wbg_image_free: (a: number, b: number) => void;
export const __wbg_reconstruction_free: (a: number, b: number) => void;
export const __wbg_scene_free: (a: number, b: number) => void;
export const denoise: (a: number, b: number, c: number, d: number, e: number, f: number) => [number, number, number];
export const denoised_gapRel: (a: number) => number;
export const denoised_image: (a: number) => [number, number];
export const denoised_iterations: (a: number) => number;
export const denoised_tv: (a: number) => number;
export const image_cols: (a: number) => number;
export const image_data: (a: number) => [number, number];
export const image_rows: (a: number) => number;
export const noisyPhantom: (a: number, b: number, c: number) => [number, number, number];
export const phantom: (a: number) => [number, number, number];
export const reconstruction_image: (a: number) => [number, number];
export const reconstruction_nFinal: (a: number) => number;
export const reconstruction_relErrors: (a: number) => [number, number];
export const reconstruction_residuals: (a: number) => [number, number];
export const reconstruction_terminatedBy: (a: number) => [number, number];
export const scene_new: (a: number, b: number, c: number, d: number) => [number, number, number];
export const scene_reconstruct: (a: number, b: number, c: number) => [number, number, number];
export const scene_sinogram: (a: number) => number;
export const scene_truth: (a: number) => number;
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
