/* tslint:disable */
/* eslint-disable */

export class DetectionTrace {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly cost: Float64Array;
    readonly dof: number;
    readonly fault_windows: number;
    readonly p: Float64Array;
    readonly t_start: Float64Array;
    readonly threshold_cost: number;
    readonly verdict: Float64Array;
}

export class TorqueSlip {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly load: Float64Array;
    readonly operating_slip: number;
    readonly slip: Float64Array;
    readonly torque: Float64Array;
}

export class Waveforms {
    private constructor();
    free(): void;
    [Symbol.dispose](): void;
    readonly ia: Float64Array;
    readonly ib: Float64Array;
    readonly ic: Float64Array;
    readonly speed: Float64Array;
    readonly t: Float64Array;
    readonly va: Float64Array;
    readonly vb: Float64Array;
    readonly vc: Float64Array;
}

export function detect(kind: string, load_torque: number, window: number, seed: bigint): DetectionTrace;

export function torque_slip(v_ll: number, r_src: number, load_torque: number, points: number): TorqueSlip;

export function waveforms(kind: string, load_torque: number): Waveforms;

export type InitInput = RequestInfo | URL | Response | BufferSource | WebAssembly.Module;

export interface InitOutput {
    readonly memory: WebAssembly.Memory;
    readonly __wbg_detectiontrace_free: (a: number, b: number) => void;
    readonly __wbg_torqueslip_free: (a: number, b: number) => void;
    readonly __wbg_waveforms_free: (a: number, b: number) => void;
    readonly detect: (a: number, b: number, c: number, d: number, e: bigint) => [number, number, number];
    readonly detectiontrace_cost: (a: number) => [number, number];
    readonly detectiontrace_dof: (a: number) => number;
    readonly detectiontrace_fault_windows: (a: number) => number;
    readonly detectiontrace_p: (a: number) => [number, number];
    readonly detectiontrace_t_start: (a: number) => [number, number];
    readonly detectiontrace_threshold_cost: (a: number) => number;
    readonly detectiontrace_verdict: (a: number) => [number, number];
    readonly torque_slip: (a: number, b: number, c: number, d: number) => [number, number, number];
    readonly torqueslip_load: (a: number) => [number, number];
    readonly torqueslip_operating_slip: (a: number) => number;
    readonly torqueslip_slip: (a: number) => [number, number];
    readonly torqueslip_torque: (a: number) => [number, number];
    readonly waveforms: (a: number, b: number, c: number) => [number, number, number];
    readonly waveforms_ia: (a: number) => [number, number];
    readonly waveforms_ib: (a: number) => [number, number];
    readonly waveforms_ic: (a: number) => [number, number];
    readonly waveforms_speed: (a: number) => [number, number];
    readonly waveforms_t: (a: number) => [number, number];
    readonly waveforms_va: (a: number) => [number, number];
    readonly waveforms_vb: (a: number) => [number, number];
    readonly waveforms_vc: (a: number) => [number, number];
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
