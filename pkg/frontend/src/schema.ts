/** Shared shapes for the network viewer. */

export type GraphKind = "file-dependency" | "coordination-needs";

export interface GraphNode {
  id: string;
  label: string;
}

export interface GraphEdge {
  from: string;
  to: string;
  weight: number;
}

export interface GraphDocument {
  nodes: GraphNode[];
  edges: GraphEdge[];
  kind: GraphKind;
}

export class SchemaError extends Error {
  constructor(message: string) {
    super(message);
    this.name = "SchemaError";
  }
}

export const GRAPH_KINDS: readonly GraphKind[] = [
  "file-dependency",
  "coordination-needs",
];

// A dependency count below 1 or a normalized need below 0.1 is noise by
// default; both cutoffs can be overridden per build.
export const DEFAULT_MIN_WEIGHT: Record<GraphKind, number> = {
  "file-dependency": 1,
  "coordination-needs": 0.1,
};

export function isPlainObject(value: unknown): value is Record<string, unknown> {
  return typeof value === "object" && value !== null && !Array.isArray(value);
}

/** Order ids numerically when both parse as numbers, else as strings. */
export function compareIds(a: string, b: string): number {
  const na = Number(a);
  const nb = Number(b);
  if (Number.isFinite(na) && Number.isFinite(nb) && na !== nb) {
    return na - nb;
  }
  return a < b ? -1 : a > b ? 1 : 0;
}
