import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "node",
    include: ["test/**/*.test.ts"],
    testTimeout: 20000,
    // The live-loop test paces to the wall clock; run files sequentially so
    // parallel workers cannot starve its command timing.
    fileParallelism: false,
  },
});
