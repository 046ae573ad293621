/**
 * Engine that forwards to the compiled TFHE core.
 *
 * The core (core/ in this package, `npm run build:core`) is a Rust binary
 * holding the actual key material and ciphertexts; every gate is a real
 * bootstrapped TFHE boolean operation. It speaks the same newline-delimited
 * JSON shapes as the outer protocol but without ids: responses come back
 * strictly in request order, so correlation is positional. Its stderr is
 * passed through for diagnostics.
 */

import { spawn, type ChildProcessByStdio } from 'node:child_process';
import { existsSync } from 'node:fs';
import { createInterface, type Interface } from 'node:readline';
import type { Readable, Writable } from 'node:stream';
import { fileURLToPath } from 'node:url';

import {
  checkBit,
  EngineError,
  type Engine,
  type EngineInfo,
  type GateKind,
  type KeyPair,
} from './engine.js';

export const CORE_ENV_VAR = 'OCWC_FHE_CORE';

/** Binary location: the env override, else the sibling cargo release build. */
export function coreBinaryPath(): string {
  const fromEnv = process.env[CORE_ENV_VAR];
  if (fromEnv) return fromEnv;
  return fileURLToPath(new URL('../core/target/release/ocwc-fhe-core', import.meta.url));
}

interface CoreResponse {
  ok: boolean;
  error?: string;
  handle?: number;
  value?: number;
  data?: string;
  secret?: string;
  eval?: string;
}

interface Waiter {
  resolve: (response: CoreResponse) => void;
  reject: (err: Error) => void;
}

export class CoreEngine implements Engine {
  private child: ChildProcessByStdio<Writable, Readable, null>;
  private lines: Interface;
  private pending: Waiter[] = [];
  private exited = false;

  constructor(binary: string = coreBinaryPath()) {
    if (!existsSync(binary)) {
      throw new Error(`TFHE core not found at ${binary} (run: npm run build:core)`);
    }
    this.child = spawn(binary, [], { stdio: ['pipe', 'pipe', 'inherit'] });
    this.lines = createInterface({ input: this.child.stdout, crlfDelay: Infinity });
    this.lines.on('line', (line) => this.onLine(line));
    this.child.on('close', () => {
      this.exited = true;
      // anything still waiting will never get a line
      for (const waiter of this.pending.splice(0)) {
        waiter.reject(new EngineError('TFHE core exited unexpectedly'));
      }
    });
  }

  info(): EngineInfo {
    return { name: 'ocwc-frontend', scheme: 'tfhe-boolean' };
  }

  async keygen(): Promise<void> {
    await this.call({ op: 'keygen' });
  }

  async importKeys(secret?: string, evalKey?: string): Promise<void> {
    const request: Record<string, unknown> = { op: 'import_keys' };
    if (secret !== undefined) request.secret = secret;
    if (evalKey !== undefined) request.eval = evalKey;
    await this.call(request);
  }

  async exportKeys(): Promise<KeyPair> {
    const response = await this.call({ op: 'export_keys' });
    return { secret: response.secret ?? '', eval: response.eval ?? '' };
  }

  async encrypt(value: 0 | 1): Promise<number> {
    const response = await this.call({ op: 'encrypt', value: checkBit(value) });
    return response.handle!;
  }

  async constant(value: 0 | 1): Promise<number> {
    const response = await this.call({ op: 'const', value: checkBit(value) });
    return response.handle!;
  }

  async gate(kind: GateKind, a: number, b?: number): Promise<number> {
    const request: Record<string, unknown> = { op: 'gate', kind, a };
    if (b !== undefined) request.b = b;
    const response = await this.call(request);
    return response.handle!;
  }

  async decrypt(handle: number): Promise<0 | 1> {
    const response = await this.call({ op: 'decrypt', handle });
    return response.value === 1 ? 1 : 0;
  }

  async exportBit(handle: number): Promise<string> {
    const response = await this.call({ op: 'export', handle });
    return response.data ?? '';
  }

  async importBit(data: string): Promise<number> {
    const response = await this.call({ op: 'import', data });
    return response.handle!;
  }

  async close(): Promise<void> {
    if (this.exited) return;
    try {
      await this.call({ op: 'shutdown' });
    } catch {
      // already gone is fine; we are tearing down either way
    }
    this.child.stdin.end();
  }

  private onLine(line: string): void {
    const waiter = this.pending.shift();
    if (!waiter) return;
    try {
      waiter.resolve(JSON.parse(line) as CoreResponse);
    } catch (err) {
      waiter.reject(new EngineError(`TFHE core sent malformed output: ${String(err)}`));
    }
  }

  private call(request: Record<string, unknown>): Promise<CoreResponse> {
    if (this.exited) {
      return Promise.reject(new EngineError('TFHE core exited unexpectedly'));
    }
    return new Promise<CoreResponse>((resolve, reject) => {
      this.pending.push({ resolve, reject });
      this.child.stdin.write(JSON.stringify(request) + '\n');
    }).then((response) => {
      if (!response.ok) throw new EngineError(response.error ?? 'TFHE core error');
      return response;
    });
  }
}
