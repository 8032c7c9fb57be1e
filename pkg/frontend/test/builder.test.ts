import { readFileSync } from "node:fs";
import { describe, expect, it } from "vitest";

import { buildGraphDocument } from "../src/builder.js";
import { SchemaError } from "../src/schema.js";

const FILES = { "0": "src/a.py", "1": "src/b.py", "2": "docs/c.md" };

function fixture(name: string): unknown {
  const url = new URL(`fixtures/${name}`, import.meta.url);
  return JSON.parse(readFileSync(url, "utf8"));
}

describe("buildGraphDocument", () => {
  it("turns one dependency pair into two labeled nodes and an edge", () => {
    const doc = buildGraphDocument({ "0": { "1": 3 } }, FILES, "file-dependency");
    expect(doc).toEqual({
      kind: "file-dependency",
      nodes: [
        { id: "0", label: "src/a.py" },
        { id: "1", label: "src/b.py" },
      ],
      edges: [{ from: "0", to: "1", weight: 3 }],
    });
  });

  it("drops everything when the cutoff exceeds all weights", () => {
    const doc = buildGraphDocument({ "0": { "1": 3 } }, FILES, "file-dependency", 5);
    expect(doc.nodes).toEqual([]);
    expect(doc.edges).toEqual([]);
  });

  it("filters coordination needs below the cutoff", () => {
    const users = { "0": "a@x", "1": "b@x", "2": "c@x" };
    const needs = {
      "0": { "1": 1.0 },
      "1": { "0": 1.0, "2": 0.4 },
      "2": { "1": 0.4 },
    };
    const doc = buildGraphDocument(needs, users, "coordination-needs", 0.5);
    expect(doc.nodes.map((n) => n.id)).toEqual(["0", "1"]);
    expect(doc.edges).toEqual([{ from: "0", to: "1", weight: 1.0 }]);
  });

  it("keeps an edge sitting exactly on the cutoff", () => {
    const users = { "0": "a@x", "1": "b@x", "2": "c@x" };
    const needs = { "0": { "1": 0.1, "2": 0.05 } };
    const doc = buildGraphDocument(needs, users, "coordination-needs");
    expect(doc.edges).toEqual([{ from: "0", to: "1", weight: 0.1 }]);
  });

  it("applies the per-kind default cutoffs", () => {
    expect(
      buildGraphDocument({ "0": { "1": 1 } }, FILES, "file-dependency").edges,
    ).toHaveLength(1);
    expect(
      buildGraphDocument({ "0": { "1": 0.99 } }, FILES, "file-dependency").edges,
    ).toHaveLength(0);
  });

  it("collapses both orientations of a symmetric matrix", () => {
    const both = { "1": { "0": 2 }, "0": { "1": 2 } };
    const doc = buildGraphDocument(both, FILES, "file-dependency");
    expect(doc.edges).toEqual([{ from: "0", to: "1", weight: 2 }]);
  });

  it("rejects a pair whose two orientations disagree", () => {
    const both = { "0": { "1": 2 }, "1": { "0": 3 } };
    expect(() => buildGraphDocument(both, FILES, "file-dependency")).toThrow(
      SchemaError,
    );
  });

  it("drops isolated ids even when the id map knows them", () => {
    const doc = buildGraphDocument({ "0": { "1": 3 } }, FILES, "file-dependency");
    expect(doc.nodes.find((n) => n.id === "2")).toBeUndefined();
  });

  it("orders nodes and edges numerically", () => {
    const ids = Object.fromEntries(
      Array.from({ length: 12 }, (_, i) => [String(i), `f${i}`]),
    );
    const matrix = { "10": { "2": 1 }, "2": { "1": 4 }, "0": { "10": 2 } };
    const doc = buildGraphDocument(matrix, ids, "file-dependency");
    expect(doc.nodes.map((n) => n.id)).toEqual(["0", "1", "2", "10"]);
    expect(doc.edges).toEqual([
      { from: "0", to: "10", weight: 2 },
      { from: "1", to: "2", weight: 4 },
      { from: "2", to: "10", weight: 1 },
    ]);
  });

  it.each([
    ["matrix is an array", [1, 2], FILES],
    ["matrix is a string", "nope", FILES],
    ["row is not an object", { "0": 3 }, FILES],
    ["weight is a string", { "0": { "1": "3" } }, FILES],
    ["weight is zero", { "0": { "1": 0 } }, FILES],
    ["weight is negative", { "0": { "1": -1 } }, FILES],
    ["weight is infinite", { "0": { "1": Infinity } }, FILES],
    ["self pair", { "0": { "0": 1 } }, FILES],
    ["row id missing from map", { "9": { "1": 1 } }, FILES],
    ["column id missing from map", { "0": { "9": 1 } }, FILES],
    ["id map is an array", { "0": { "1": 1 } }, ["a"]],
    ["id map value not a string", { "0": { "1": 1 } }, { "0": 5, "1": "b" }],
  ])("rejects malformed input: %s", (_name, matrix, idMap) => {
    expect(() =>
      buildGraphDocument(matrix, idMap, "file-dependency"),
    ).toThrow(SchemaError);
  });

  it("rejects an unknown kind and a bad cutoff", () => {
    expect(() =>
      buildGraphDocument({}, {}, "word-cloud" as never),
    ).toThrow(SchemaError);
    expect(() =>
      buildGraphDocument({}, {}, "file-dependency", -0.5),
    ).toThrow(SchemaError);
    expect(() =>
      buildGraphDocument({}, {}, "file-dependency", NaN),
    ).toThrow(SchemaError);
  });

  it("handles real miner output", () => {
    const dep = buildGraphDocument(
      fixture("FileDependencyMatrix.json"),
      fixture("idToFile.json"),
      "file-dependency",
    );
    expect(dep.nodes.length).toBeGreaterThan(2);
    expect(dep.edges.length).toBeGreaterThan(2);
    const ids = new Set(dep.nodes.map((n) => n.id));
    for (const edge of dep.edges) {
      expect(ids.has(edge.from)).toBe(true);
      expect(ids.has(edge.to)).toBe(true);
      expect(edge.weight).toBeGreaterThan(0);
    }
    for (const node of dep.nodes) {
      expect(node.label).not.toBe("");
    }

    const needs = buildGraphDocument(
      fixture("CoordinationNeeds.json"),
      fixture("idToUser.json"),
      "coordination-needs",
    );
    expect(needs.edges.length).toBeGreaterThan(0);
    expect(needs.nodes.every((n) => n.label.includes("@"))).toBe(true);
  });
});
