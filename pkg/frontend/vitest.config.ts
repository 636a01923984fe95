import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    environment: "jsdom",
    testTimeout: 180_000,
    hookTimeout: 120_000,
    include: ["tests/**/*.test.ts"],
  },
});
