import { defineConfig } from "vite";

export default defineConfig({
  build: {
    outDir: "dist",
    emptyOutDir: true,
  },
  server: {
    port: 5173,
    proxy: {
      // forward API calls to the annotation service during development
      "/api": {
        target: "http://127.0.0.1:8321",
        changeOrigin: true,
      },
    },
  },
});
