/** Wire formats of the diagnosis service, as plain JSON shapes. */

export type VerdictValue = "calculable" | "not_calculable" | "undetermined";

export interface ArcInfo {
  tail: string;
  head: string;
  /** Exact rational as text, e.g. "1/3". */
  ratio: string;
}

export interface NetworkInfo {
  vertices: string[];
  arcs: ArcInfo[];
  centroids: string[];
  monitored: string[];
  has_observations: boolean;
}

/** Smallest vertex set separating a component's centroids from its border,
 * together with one maximal family of vertex-disjoint routes. Each route
 * starts at a centroid and ends at a border vertex; a single-vertex route
 * is a centroid that is itself on the border. */
export interface CutWitnessInfo {
  size: number;
  cut: string[];
  paths: string[][];
}

export interface RankSummaryInfo {
  rows: number;
  columns: number;
  rank: number;
  full_column_rank: boolean;
}

export interface ComponentReportInfo {
  index: number;
  vertices: string[];
  border: string[];
  centroids: string[];
  legacy_count_ok: boolean;
  cut: CutWitnessInfo;
  disjoint_paths_ok: boolean;
  tree: boolean;
  verdict: VerdictValue;
  reason: string;
  /** Centroids left without a disjoint route to the border. */
  blocked_centroids: string[];
  rank?: RankSummaryInfo;
}

export interface DiagnosisInfo {
  monitored: string[];
  overall: VerdictValue;
  components: ComponentReportInfo[];
  rank_fallback_used: boolean;
  notes: string[];
}

/** Submatrix certificate showing why a separator caps the rank. */
export interface ObstructionInfo {
  cut: string[];
  partition: Record<string, string[]>;
  rows: string[];
  columns: string[];
  matrix: string[][];
  zero_rows: string[];
  column_count: number;
  rank_bound: number;
  obstructed: boolean;
}

export interface ExplainInfo {
  component: ComponentReportInfo;
  obstruction?: ObstructionInfo;
}

export interface FlowInfo {
  tail: string;
  head: string;
  /** Exact rational as text. */
  flow: string;
}

export interface SolutionInfo {
  flows: FlowInfo[];
  balancing: Record<string, string>;
  unknowns: Record<string, string>;
}

export interface ServiceErrorInfo {
  error: string;
  violations?: string[];
  diagnosis?: DiagnosisInfo;
}
