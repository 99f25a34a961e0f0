/* tslint:disable */
/* eslint-disable */
export const memory: WebAssembly.Memory;
export const __wbg_detectiontrace_free: (a: number, b: number) => void;
export const __wbg_torqueslip_free: (a: number, b: number) => void;
export const __wbg_waveforms_free: (a: number, b: number) => void;
export const detect: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
export const detectiontrace_cost: (a: number) => [number, number];
export const detectiontrace_dof: (a: number) => number;
export const detectiontrace_fault_windows: (a: number) => number;
export const detectiontrace_p: (a: number) => [number, number];
export const detectiontrace_t_start: (a: number) => [number, number];
export const detectiontrace_threshold_cost: (a: number) => number;
export const detectiontrace_verdict: (a: number) => [number, number];
export const torque_slip: (a: number, b: number, c: number, d: number) => [number, number, number];
export const torqueslip_load: (a: number) => [number, number];
export const torqueslip_operating_slip: (a: number) => number;
export const torqueslip_slip: (a: number) => [number, number];
export const torqueslip_torque: (a: number) => [number, number];
export const waveforms: (a: number, b: number, c: number) => [number, number, number];
export const waveforms_ia: (a: number) => [number, number];
export const waveforms_ib: (a: number) => [number, number];
export const waveforms_ic: (a: number) => [number, number];
export const waveforms_speed: (a: number) => [number, number];
export const waveforms_t: (a: number) => [number, number];
export const waveforms_va: (a: number) => [number, number];
export const waveforms_vb: (a: number) => [number, number];
export const waveforms_vc: (a: number) => [number, number];
export const __wbindgen_externrefs: WebAssembly.Table;
export const __wbindgen_malloc: (a: number, b: number) => number;
export const __wbindgen_realloc: (a: number, b: number, c: number, d: number) => number;
export const __externref_table_dealloc: (a: number) => void;
export const __wbindgen_free: (a: number, b: number, c: number) => void;
export const __wbindgen_start: () => void;
