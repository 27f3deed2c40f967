import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    globalSetup: ["./tests/globalSetup.ts"],
    // the shared mock-backed server consumes scripted LLM replies in order,
    // so test files must not interleave their pipeline runs
    fileParallelism: false,
    testTimeout: 30000,
    hookTimeout: 60000,
  },
});
