import { defineConfig } from 'vitest/config'

export default defineConfig({
  test: {
    include: ['test/**/*.test.ts'],
    fileParallelism: false, // CPU-bound training; run files one at a time
    testTimeout: 900_000,
    hookTimeout: 600_000,
  },
})
