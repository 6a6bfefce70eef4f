import { defineConfig } from "vite";

export default defineConfig({
  build: { outDir: "dist" },
  test: {
    environment: "jsdom",
    testTimeout: 30000,
    hookTimeout: 30000,
  },
});
