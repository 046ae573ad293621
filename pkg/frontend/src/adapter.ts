#!/usr/bin/env node
/**
 * stdio adapter process: one JSON request per line in, one response per
 * line out, request ids echoed back. This is what the Python fhe backend
 * launches via OCWC_FHE_ADAPTER; the request catalogue lives in its module
 * docstring and in README.md here.
 *
 *   node dist/adapter.js                 # TFHE engine (build core/ first)
 *   node dist/adapter.js --engine plain  # clear-text engine, for tests
 *
 * Responses are {"id": ..., "ok": true, ...fields} on success and
 * {"id": ..., "ok": false, "error": "..."} on failure. The adapter never
 * exits on a bad request; only shutdown, stdin EOF or a broken engine end
 * the process.
 */

import { createInterface } from 'node:readline';

import { CoreEngine } from './core.js';
import { EngineError, PlainEngine, checkBit, type Engine, type GateKind } from './engine.js';

const GATE_KINDS: ReadonlySet<string> = new Set(['XOR', 'AND', 'NOT']);

type Request = Record<string, unknown>;

function bitField(request: Request): 0 | 1 {
  return checkBit(request.value);
}

function handleField(request: Request, field: string): number {
  const value = request[field];
  if (typeof value !== 'number' || !Number.isInteger(value)) {
    throw new EngineError(`missing or non-integer ${JSON.stringify(field)}`);
  }
  return value;
}

function stringField(request: Request, field: string): string {
  const value = request[field];
  if (typeof value !== 'string') {
    throw new EngineError(`missing field ${JSON.stringify(field)}`);
  }
  return value;
}

function optionalString(request: Request, field: string): string | undefined {
  if (!(field in request)) return undefined;
  return stringField(request, field);
}

async function dispatch(engine: Engine, request: Request): Promise<Request> {
  const op = request.op;
  switch (op) {
    case 'hello': {
      const info = engine.info();
      return { name: info.name, scheme: info.scheme };
    }
    case 'keygen':
      await engine.keygen();
      return {};
    case 'import_keys':
      await engine.importKeys(optionalString(request, 'secret'), optionalString(request, 'eval'));
      return {};
    case 'export_keys': {
      const keys = await engine.exportKeys();
      return { secret: keys.secret, eval: keys.eval };
    }
    case 'encrypt':
      return { handle: await engine.encrypt(bitField(request)) };
    case 'const':
      return { handle: await engine.constant(bitField(request)) };
    case 'gate': {
      const kind = request.kind;
      if (typeof kind !== 'string' || !GATE_KINDS.has(kind)) {
        throw new EngineError(`unknown gate kind ${JSON.stringify(kind)}`);
      }
      const a = handleField(request, 'a');
      const b = kind === 'NOT' ? undefined : handleField(request, 'b');
      return { handle: await engine.gate(kind as GateKind, a, b) };
    }
    case 'decrypt':
      return { value: await engine.decrypt(handleField(request, 'handle')) };
    case 'export':
      return { data: await engine.exportBit(handleField(request, 'handle')) };
    case 'import':
      return { handle: await engine.importBit(stringField(request, 'data')) };
    default:
      throw new EngineError(`unknown op ${JSON.stringify(op)}`);
  }
}

function writeLine(payload: unknown): Promise<void> {
  return new Promise((resolve, reject) => {
    process.stdout.write(JSON.stringify(payload) + '\n', (err) =>
      err ? reject(err) : resolve(),
    );
  });
}

function parseArgs(argv: string[]): { engine: 'tfhe' | 'plain' } {
  let engine: 'tfhe' | 'plain' = 'tfhe';
  for (let i = 0; i < argv.length; i++) {
    const arg = argv[i];
    const value = arg === '--engine' ? argv[++i] : arg.startsWith('--engine=') ? arg.slice(9) : null;
    if (value === null) {
      throw new Error(`unknown argument ${arg} (expected --engine tfhe|plain)`);
    }
    if (value !== 'tfhe' && value !== 'plain') {
      throw new Error(`unknown engine ${value} (expected tfhe or plain)`);
    }
    engine = value;
  }
  return { engine };
}

async function main(): Promise<number> {
  let engine: Engine;
  try {
    const options = parseArgs(process.argv.slice(2));
    engine = options.engine === 'plain' ? new PlainEngine() : new CoreEngine();
  } catch (err) {
    console.error(`ocwc-adapter: ${err instanceof Error ? err.message : String(err)}`);
    return 2;
  }

  const lines = createInterface({ input: process.stdin, crlfDelay: Infinity });
  for await (const line of lines) {
    if (!line.trim()) continue;
    let request: unknown;
    try {
      request = JSON.parse(line);
    } catch (err) {
      await writeLine({ id: null, ok: false, error: `bad json: ${String(err)}` });
      continue;
    }
    if (typeof request !== 'object' || request === null || Array.isArray(request)) {
      await writeLine({ id: null, ok: false, error: 'request must be a JSON object' });
      continue;
    }
    const req = request as Request;
    const id = 'id' in req ? req.id : null;
    if (req.op === 'shutdown') {
      await writeLine({ id, ok: true });
      break;
    }
    try {
      const fields = await dispatch(engine, req);
      await writeLine({ id, ok: true, ...fields });
    } catch (err) {
      const message = err instanceof Error ? err.message : String(err);
      await writeLine({ id, ok: false, error: message });
    }
  }
  await engine.close();
  return 0;
}

main().then(
  (code) => process.exit(code),
  (err) => {
    console.error(`ocwc-adapter: ${err instanceof Error ? err.stack ?? err.message : String(err)}`);
    process.exit(1);
  },
);
