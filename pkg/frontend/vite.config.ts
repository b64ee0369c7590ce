/// <reference types="vitest/config" />
import react from "@vitejs/plugin-react";
import { defineConfig } from "vite";

// Two-process dev shape: this dev server proxies API and WebSocket routes to
// the backend on port 8000.
export default defineConfig({
  plugins: [react()],
  server: {
    port: 5173,
    proxy: {
      "/ws": { target: "ws://localhost:8000", ws: true },
      "/health": { target: "http://localhost:8000" },
      "/config": { target: "http://localhost:8000" },
    },
  },
  test: {
    environment: "jsdom",
    globals: true,
  },
});
