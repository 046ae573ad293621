import { describe, expect, it } from 'vitest';

import { checkBit, EngineError, PlainEngine } from '../src/engine';

async function keyed(): Promise<PlainEngine> {
  const engine = new PlainEngine();
  await engine.keygen();
  return engine;
}

describe('checkBit', () => {
  it('passes bits through and rejects everything else', () => {
    expect(checkBit(0)).toBe(0);
    expect(checkBit(1)).toBe(1);
    for (const bad of [2, -1, '1', true, null, undefined, 1.5]) {
      expect(() => checkBit(bad)).toThrow(EngineError);
    }
  });
});

describe('PlainEngine', () => {
  it('evaluates the three gate truth tables', async () => {
    const engine = await keyed();
    for (const a of [0, 1] as const) {
      for (const b of [0, 1] as const) {
        const ha = await engine.encrypt(a);
        const hb = await engine.encrypt(b);
        expect(await engine.decrypt(await engine.gate('XOR', ha, hb))).toBe(a ^ b);
        expect(await engine.decrypt(await engine.gate('AND', ha, hb))).toBe(a & b);
      }
      const ha = await engine.encrypt(a);
      expect(await engine.decrypt(await engine.gate('NOT', ha))).toBe(a ? 0 : 1);
    }
  });

  it('treats constants like any other handle', async () => {
    const engine = await keyed();
    const one = await engine.constant(1);
    const bit = await engine.encrypt(1);
    expect(await engine.decrypt(await engine.gate('AND', one, bit))).toBe(1);
  });

  it('refuses secret-key operations without the secret key', async () => {
    const engine = new PlainEngine();
    await expect(engine.encrypt(1)).rejects.toThrow('no secret key');
    await expect(engine.exportKeys()).rejects.toThrow('no keys');
  });

  it('refuses evaluation without the evaluation key', async () => {
    const engine = new PlainEngine();
    await expect(engine.constant(0)).rejects.toThrow('no evaluation key');
    await expect(engine.gate('XOR', 1, 2)).rejects.toThrow('no evaluation key');
  });

  it('rejects unknown handles', async () => {
    const engine = await keyed();
    await expect(engine.decrypt(99)).rejects.toThrow('unknown handle 99');
    const real = await engine.encrypt(0);
    await expect(engine.gate('AND', real, 99)).rejects.toThrow('unknown handle 99');
  });

  it('round-trips bits through export and import', async () => {
    const engine = await keyed();
    for (const value of [0, 1] as const) {
      const data = await engine.exportBit(await engine.encrypt(value));
      expect(await engine.decrypt(await engine.importBit(data))).toBe(value);
    }
    await expect(engine.importBit('AAAA')).rejects.toThrow('bad ciphertext');
    await expect(engine.importBit(Buffer.from([7]).toString('base64'))).rejects.toThrow(
      'bad ciphertext',
    );
  });

  it('accepts only its own key blobs on import', async () => {
    const donor = await keyed();
    const keys = await donor.exportKeys();

    const half = new PlainEngine();
    await half.importKeys(keys.secret, undefined);
    const handle = await half.encrypt(1);
    expect(await half.decrypt(handle)).toBe(1);
    await expect(half.gate('NOT', handle)).rejects.toThrow('no evaluation key');

    const other = new PlainEngine();
    await expect(other.importKeys(undefined, undefined)).rejects.toThrow(
      'needs secret and/or eval',
    );
    await expect(other.importKeys('bm90IGEga2V5', undefined)).rejects.toThrow('bad secret key');
    await expect(other.importKeys(undefined, 'bm90IGEga2V5')).rejects.toThrow('bad eval key');
  });
});
