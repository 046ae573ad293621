/**
 * Gate engines behind the stdio adapter.
 *
 * An engine owns key material and a table of ciphertext handles and
 * evaluates XOR/AND/NOT on them. PlainEngine keeps every bit in the clear
 * and exists so the protocol layer can be tested without key generation;
 * the real engine (core.ts) forwards to the compiled TFHE core and is what
 * the adapter runs by default.
 */

export type GateKind = 'XOR' | 'AND' | 'NOT';

export interface EngineInfo {
  name: string;
  scheme: string;
}

export interface KeyPair {
  /** base64 of the decryption key blob */
  secret: string;
  /** base64 of the evaluation key blob */
  eval: string;
}

export interface Engine {
  info(): EngineInfo;
  keygen(): Promise<void>;
  importKeys(secret?: string, evalKey?: string): Promise<void>;
  exportKeys(): Promise<KeyPair>;
  encrypt(value: 0 | 1): Promise<number>;
  constant(value: 0 | 1): Promise<number>;
  gate(kind: GateKind, a: number, b?: number): Promise<number>;
  decrypt(handle: number): Promise<0 | 1>;
  exportBit(handle: number): Promise<string>;
  importBit(data: string): Promise<number>;
  close(): Promise<void>;
}

/** Anything the requester did wrong; the adapter turns it into ok:false. */
export class EngineError extends Error {}

export function checkBit(value: unknown): 0 | 1 {
  if (value !== 0 && value !== 1) {
    throw new EngineError('value must be 0 or 1');
  }
  return value;
}

// Stand-in key blobs. Importing anything else is rejected so that tests of
// the resume flow exercise the same failure path the TFHE core has.
const PLAIN_SECRET = Buffer.from('plain-secret-key').toString('base64');
const PLAIN_EVAL = Buffer.from('plain-eval-key').toString('base64');

/**
 * Clear-text engine with the same handle discipline and key gating as the
 * TFHE core: encrypt/decrypt need the secret key, const/gate need the
 * evaluation key, exported ciphertexts are one byte.
 */
export class PlainEngine implements Engine {
  private bits = new Map<number, 0 | 1>();
  private nextHandle = 1;
  private haveSecret = false;
  private haveEval = false;

  info(): EngineInfo {
    return { name: 'ocwc-frontend', scheme: 'plaintext' };
  }

  async keygen(): Promise<void> {
    this.haveSecret = true;
    this.haveEval = true;
  }

  async importKeys(secret?: string, evalKey?: string): Promise<void> {
    if (secret === undefined && evalKey === undefined) {
      throw new EngineError('import_keys needs secret and/or eval');
    }
    if (secret !== undefined) {
      if (secret !== PLAIN_SECRET) throw new EngineError('bad secret key');
      this.haveSecret = true;
    }
    if (evalKey !== undefined) {
      if (evalKey !== PLAIN_EVAL) throw new EngineError('bad eval key');
      this.haveEval = true;
    }
  }

  async exportKeys(): Promise<KeyPair> {
    if (!this.haveSecret || !this.haveEval) throw new EngineError('no keys in session');
    return { secret: PLAIN_SECRET, eval: PLAIN_EVAL };
  }

  async encrypt(value: 0 | 1): Promise<number> {
    if (!this.haveSecret) throw new EngineError('no secret key in session');
    return this.store(value);
  }

  async constant(value: 0 | 1): Promise<number> {
    if (!this.haveEval) throw new EngineError('no evaluation key in session');
    return this.store(value);
  }

  async gate(kind: GateKind, a: number, b?: number): Promise<number> {
    if (!this.haveEval) throw new EngineError('no evaluation key in session');
    const left = this.fetch(a);
    switch (kind) {
      case 'XOR':
        return this.store((left ^ this.fetch(b)) as 0 | 1);
      case 'AND':
        return this.store((left & this.fetch(b)) as 0 | 1);
      case 'NOT':
        return this.store(left ? 0 : 1);
    }
  }

  async decrypt(handle: number): Promise<0 | 1> {
    if (!this.haveSecret) throw new EngineError('no secret key in session');
    return this.fetch(handle);
  }

  async exportBit(handle: number): Promise<string> {
    return Buffer.from([this.fetch(handle)]).toString('base64');
  }

  async importBit(data: string): Promise<number> {
    const raw = Buffer.from(data, 'base64');
    if (raw.length !== 1 || (raw[0] !== 0 && raw[0] !== 1)) {
      throw new EngineError('bad ciphertext');
    }
    return this.store(raw[0] as 0 | 1);
  }

  async close(): Promise<void> {
    this.bits.clear();
  }

  private store(bit: 0 | 1): number {
    const handle = this.nextHandle++;
    this.bits.set(handle, bit);
    return handle;
  }

  private fetch(handle: number | undefined): 0 | 1 {
    const bit = handle === undefined ? undefined : this.bits.get(handle);
    if (bit === undefined) throw new EngineError(`unknown handle ${handle}`);
    return bit;
  }
}
