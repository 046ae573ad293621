/**
 * Spot checks against the real TFHE core. These run only when the binary
 * has been built (npm run build:core); the full protocol surface is covered
 * hermetically in adapter.test.ts.
 */

import { existsSync } from 'node:fs';
import { fileURLToPath } from 'node:url';

import { afterAll, beforeAll, describe, expect, it } from 'vitest';

import { AdapterClient } from './driver';

const CORE_BIN =
  process.env.OCWC_FHE_CORE ??
  fileURLToPath(new URL('../core/target/release/ocwc-fhe-core', import.meta.url));

describe.skipIf(!existsSync(CORE_BIN))('tfhe core engine', () => {
  let owner: AdapterClient;
  const extra: AdapterClient[] = [];

  beforeAll(async () => {
    owner = new AdapterClient([]);
    expect((await owner.call('hello')).scheme).toBe('tfhe-boolean');
    await owner.ok('keygen');
  }, 120_000);

  afterAll(async () => {
    await owner?.stop();
    for (const client of extra) await client.stop();
  });

  it('computes the gate truth tables on real ciphertexts', { timeout: 60_000 }, async () => {
    for (const a of [0, 1]) {
      for (const b of [0, 1]) {
        const ha = (await owner.ok('encrypt', { value: a })).handle;
        const hb = (await owner.ok('encrypt', { value: b })).handle;
        const x = (await owner.ok('gate', { kind: 'XOR', a: ha, b: hb })).handle;
        const n = (await owner.ok('gate', { kind: 'AND', a: ha, b: hb })).handle;
        expect((await owner.ok('decrypt', { handle: x })).value).toBe(a ^ b);
        expect((await owner.ok('decrypt', { handle: n })).value).toBe(a & b);
      }
    }
    const one = (await owner.ok('const', { value: 1 })).handle;
    const flip = (await owner.ok('gate', { kind: 'NOT', a: one })).handle;
    expect((await owner.ok('decrypt', { handle: flip })).value).toBe(0);
  });

  it('reports unknown handles instead of crashing', { timeout: 30_000 }, async () => {
    expect((await owner.call('decrypt', { handle: 424242 })).error).toMatch(/unknown handle/);
  });

  it(
    'moves a ciphertext and the secret key to another session',
    { timeout: 240_000 },
    async () => {
      const ct = (
        await owner.ok('export', { handle: (await owner.ok('encrypt', { value: 1 })).handle })
      ).data as string;
      const keys = await owner.ok('export_keys');
      expect((keys.secret as string).length).toBeGreaterThan(0);
      expect((keys.eval as string).length).toBeGreaterThan(0);

      const reader = new AdapterClient([]);
      extra.push(reader);
      await reader.ok('import_keys', { secret: keys.secret });
      const imported = (await reader.ok('import', { data: ct })).handle;
      expect((await reader.ok('decrypt', { handle: imported })).value).toBe(1);
      // secret half alone cannot evaluate gates
      expect((await reader.call('gate', { kind: 'NOT', a: imported })).error).toMatch(
        /no evaluation key/,
      );
    },
  );
});
