import { defineConfig } from "vitest/config";

export default defineConfig({
  test: {
    include: ["tests/**/*.test.ts"],
    globalSetup: ["tests/integration/global-setup.ts"],
    testTimeout: 20000,
    // the integration suite shares one live server; keep files sequential
    fileParallelism: false,
  },
});
