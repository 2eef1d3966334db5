import { defineConfig } from 'vitest/config';

export default defineConfig({
  test: {
    environment: 'node',
    // The integration suite spawns the review service and the curation
    // engine; generous timeouts keep slow cold starts from flaking.
    testTimeout: 120_000,
    hookTimeout: 120_000,
  },
});
