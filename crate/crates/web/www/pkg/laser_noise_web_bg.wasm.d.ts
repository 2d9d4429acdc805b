/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const device_summary: (a: number, b: number, c: number, d: number) => [number, number, number, number];
export const light_current_curve: (a: number, b: number, c: number, d: number, e: number, f: number, g: number) => [number, number, number, number];
export const material_device: (a: number) => [number, number, number, number];
export const noise_threshold_map: (a: number) => [number, number, number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
