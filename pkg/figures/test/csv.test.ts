import { describe, expect, it } from "vitest";
import { CsvError, distinct, parseCsv } from "../src/csv.js";

const HEADER = ["phi_rad", "walkoff_fs", "f1max"];

describe("parseCsv", () => {
  it("parses a valid table", () => {
    const t = parseCsv("phi_rad,walkoff_fs,f1max\n0,1,0.5\n0,2,0.6\n", HEADER);
    expect(t.columns).toEqual(HEADER);
    expect(t.rows).toEqual([
      [0, 1, 0.5],
      [0, 2, 0.6],
    ]);
  });

  it("names expected and found columns on header mismatch", () => {
    expect(() => parseCsv("a,b,c\n1,2,3\n", HEADER)).toThrowError(
      /expected "phi_rad,walkoff_fs,f1max", found "a,b,c"/,
    );
  });

  it("rejects an empty file", () => {
    expect(() => parseCsv("", HEADER)).toThrowError(CsvError);
    expect(() => parseCsv("", HEADER)).toThrowError(/empty CSV/);
  });

  it("rejects a header-only file", () => {
    expect(() => parseCsv("phi_rad,walkoff_fs,f1max\n", HEADER)).toThrowError(
      /no data rows/,
    );
  });

  it("rejects non-numeric values with the row number", () => {
    expect(() =>
      parseCsv("phi_rad,walkoff_fs,f1max\n0,1,0.5\n0,x,0.6\n", HEADER),
    ).toThrowError(/row 3/);
  });

  it("allows NaN only in designated columns", () => {
    const text = "phi_rad,walkoff_fs,f1max\n0,1,nan\n";
    expect(() => parseCsv(text, HEADER)).toThrowError(CsvError);
    const t = parseCsv(text, HEADER, { nanColumns: [2] });
    expect(Number.isNaN(t.rows[0][2])).toBe(true);
  });

  it("skips comments and blank lines", () => {
    const t = parseCsv(
      "# comment\nphi_rad,walkoff_fs,f1max\n\n0,1,0.5\n",
      HEADER,
    );
    expect(t.rows.length).toBe(1);
  });
});

describe("distinct", () => {
  it("keeps first-appearance order", () => {
    expect(distinct([3, 1, 3, 2, 1])).toEqual([3, 1, 2]);
  });
});
