import { describe, expect, it } from "vitest";

import { classifyDiff } from "../src/diffview";

describe("diff line classification", () => {
  it("tags hunk headers, adds, dels, and context", () => {
    const diff = "@@ -1,2 +1,3 @@\n ctx\n-gone\n+new\n+also\n";
    expect(classifyDiff(diff)).toEqual([
      { kind: "hunk", text: "@@ -1,2 +1,3 @@" },
      { kind: "context", text: " ctx" },
      { kind: "del", text: "-gone" },
      { kind: "add", text: "+new" },
      { kind: "add", text: "+also" },
    ]);
  });

  it("tags no-newline markers as meta", () => {
    const lines = classifyDiff("@@ -1,1 +1,1 @@\n-a\n\\ No newline at end of file\n+b\n");
    expect(lines.map((l) => l.kind)).toEqual(["hunk", "del", "meta", "add"]);
  });

  it("keeps text verbatim and drops only the trailing empty split", () => {
    const lines = classifyDiff("@@ -1,1 +1,1 @@\n old  spacing \n");
    expect(lines[1]).toEqual({ kind: "context", text: " old  spacing " });
    expect(lines).toHaveLength(2);
  });
});
