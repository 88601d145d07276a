// Wire types for the session service. Field names match the JSON payloads
// exactly; all angles on the wire are degrees.

export type AlgorithmName = 'compromise' | 'round_robin' | 'aggressive';
export type FacingPolicy = 'centroid' | 'at_least_one' | 'random';
export type PlacementPolicy = 'uniform' | 'pairs';
export type CoverageLevel = 'main' | 'wide' | 'excluded';
export type ClassLabel = 'C11' | 'C12' | 'C21' | 'C22';
export type RunState = 'paused' | 'running';

export const ALGORITHMS: readonly AlgorithmName[] = ['compromise', 'round_robin', 'aggressive'];
export const CLASS_LABELS: readonly ClassLabel[] = ['C11', 'C12', 'C21', 'C22'];

export interface ViewerPose {
  x: number;
  y: number;
  heading_deg: number;
  main_fov_deg: number;
  wide_fov_deg: number;
}

export interface ParticipantView {
  id: number;
  x: number;
  y: number;
  heading_deg: number;
  first_level: CoverageLevel;
}

export interface StreamRow {
  site: number;
  camera: number;
  class: ClassLabel;
  priority: number;
  full_mbps: number;
  adapted_mbps: number;
  factor: number;
}

export interface FrameTotals {
  full_bandwidth_mbps: number;
  budget_mbps: number;
  minimum_budget_mbps: number;
  total_bandwidth_mbps: number;
  quality_before: number;
  total_quality: number;
  adaptation_ratio: number;
  per_class_ratio: Partial<Record<ClassLabel, number>>;
}

export interface Frame {
  tick: number;
  algorithm: AlgorithmName;
  infeasible: boolean;
  viewer: ViewerPose;
  participants: ParticipantView[];
  streams: StreamRow[];
  totals: FrameTotals;
}

export interface MobilitySettings {
  p_stay: number;
  p_walk: number;
  p_turn: number;
  step_length: number;
  turn_step_deg: number;
  tick_seconds: number;
}

export interface LadderSettings {
  base: number;
  depth: number;
}

export interface SessionParams {
  session_id: string;
  tick: number;
  run_state: RunState;
  seed: number;
  algorithm: AlgorithmName;
  budget_mbps: number;
  tick_rate: number;
  facing: FacingPolicy;
  triple: [number, number, number];
  ladder: LadderSettings;
  viewer: ViewerPose;
  mobility: MobilitySettings;
  n_participants: number;
  room_diameter: number;
  pending_patches: number;
}

export interface CreateSessionRequest {
  seed?: number;
  n_participants?: number;
  cameras_per_site?: number;
  room_diameter?: number;
  placement?: PlacementPolicy;
  pair_distance?: number;
  facing?: FacingPolicy;
  bandwidth_range?: [number, number];
  viewer?: Partial<ViewerPose>;
  mobility?: Partial<MobilitySettings>;
  ladder?: Partial<LadderSettings>;
  triple?: [number, number, number];
  algorithm?: AlgorithmName;
  budget_mbps?: number;
  budget_fraction?: number;
  tick_rate?: number;
}

export interface SessionPatch {
  budget_mbps?: number;
  algorithm?: AlgorithmName;
  facing?: FacingPolicy;
  triple?: [number, number, number];
  ladder?: LadderSettings;
  tick_rate?: number;
  viewer?: Partial<ViewerPose>;
  mobility?: Partial<MobilitySettings>;
}

export interface CreateSessionResponse {
  session_id: string;
  frame: Frame;
}

export interface PatchTicket {
  applied_at_tick: number;
  queued: number;
}

export interface ReplayExport {
  config: CreateSessionRequest;
  seed: number;
  tick: number;
}
