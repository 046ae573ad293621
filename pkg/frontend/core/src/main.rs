//! Gate-evaluation core for the adapter: real TFHE boolean ciphertexts.
//!
//! Speaks newline-delimited JSON on stdio, strictly one response per
//! request, in order. The TypeScript adapter in front of this process owns
//! request ids, handle hygiene and error mapping; this side only holds key
//! material and ciphertexts and evaluates gates.
//!
//! Requests (no id field; ordering is the correlation):
//!   {"op":"keygen"}
//!   {"op":"import_keys","secret":"<b64>"?,"eval":"<b64>"?}
//!   {"op":"export_keys"}                       -> {"secret","eval"}
//!   {"op":"encrypt","value":0|1}               -> {"handle":n}
//!   {"op":"const","value":0|1}                 -> {"handle":n}
//!   {"op":"gate","kind":"XOR","a":n,"b":n}     -> {"handle":n}
//!   {"op":"decrypt","handle":n}                -> {"value":0|1}
//!   {"op":"export","handle":n}                 -> {"data":"<b64>"}
//!   {"op":"import","data":"<b64>"}             -> {"handle":n}
//!   {"op":"shutdown"}
//!
//! Every response carries "ok": true/false; failures add "error".

use std::collections::HashMap;
use std::io::{self, BufRead, Write};

use base64::engine::general_purpose::STANDARD as B64;
use base64::Engine as _;
use serde_json::{json, Value};
use tfhe::boolean::prelude::*;

struct Session {
    client_key: Option<ClientKey>,
    server_key: Option<ServerKey>,
    bits: HashMap<u64, Ciphertext>,
    next_handle: u64,
}

impl Session {
    fn new() -> Self {
        Session {
            client_key: None,
            server_key: None,
            bits: HashMap::new(),
            next_handle: 1,
        }
    }

    fn store(&mut self, ct: Ciphertext) -> u64 {
        let handle = self.next_handle;
        self.next_handle += 1;
        self.bits.insert(handle, ct);
        handle
    }

    fn fetch(&self, request: &Value, field: &str) -> Result<&Ciphertext, String> {
        let handle = request
            .get(field)
            .and_then(Value::as_u64)
            .ok_or_else(|| format!("missing or non-integer {field:?}"))?;
        self.bits
            .get(&handle)
            .ok_or_else(|| format!("unknown handle {handle}"))
    }

    fn server_key(&self) -> Result<&ServerKey, String> {
        self.server_key
            .as_ref()
            .ok_or_else(|| "no evaluation key in session".to_string())
    }

    fn client_key(&self) -> Result<&ClientKey, String> {
        self.client_key
            .as_ref()
            .ok_or_else(|| "no secret key in session".to_string())
    }
}

fn bit_value(request: &Value) -> Result<bool, String> {
    match request.get("value").and_then(Value::as_u64) {
        Some(0) => Ok(false),
        Some(1) => Ok(true),
        _ => Err("value must be 0 or 1".to_string()),
    }
}

fn b64_field(request: &Value, field: &str) -> Result<Vec<u8>, String> {
    let text = request
        .get(field)
        .and_then(Value::as_str)
        .ok_or_else(|| format!("missing field {field:?}"))?;
    B64.decode(text).map_err(|e| format!("bad base64 in {field:?}: {e}"))
}

fn handle_request(session: &mut Session, request: &Value) -> Result<Value, String> {
    let op = request
        .get("op")
        .and_then(Value::as_str)
        .ok_or_else(|| "missing op".to_string())?;
    match op {
        "keygen" => {
            let (ck, sk) = gen_keys();
            session.client_key = Some(ck);
            session.server_key = Some(sk);
            Ok(json!({}))
        }
        "import_keys" => {
            let mut any = false;
            if request.get("secret").is_some() {
                let blob = b64_field(request, "secret")?;
                session.client_key = Some(
                    bincode::deserialize(&blob).map_err(|e| format!("bad secret key: {e}"))?,
                );
                any = true;
            }
            if request.get("eval").is_some() {
                let blob = b64_field(request, "eval")?;
                session.server_key = Some(
                    bincode::deserialize(&blob).map_err(|e| format!("bad eval key: {e}"))?,
                );
                any = true;
            }
            if !any {
                return Err("import_keys needs secret and/or eval".to_string());
            }
            Ok(json!({}))
        }
        "export_keys" => {
            let ck = session.client_key()?;
            let sk = session.server_key()?;
            let secret = bincode::serialize(ck).map_err(|e| e.to_string())?;
            let eval = bincode::serialize(sk).map_err(|e| e.to_string())?;
            Ok(json!({"secret": B64.encode(secret), "eval": B64.encode(eval)}))
        }
        "encrypt" => {
            let value = bit_value(request)?;
            let ct = session.client_key()?.encrypt(value);
            Ok(json!({"handle": session.store(ct)}))
        }
        "const" => {
            let value = bit_value(request)?;
            let ct = session.server_key()?.trivial_encrypt(value);
            Ok(json!({"handle": session.store(ct)}))
        }
        "gate" => {
            let kind = request
                .get("kind")
                .and_then(Value::as_str)
                .ok_or_else(|| "missing gate kind".to_string())?;
            let out = match kind {
                "XOR" => {
                    let (a, b) = (session.fetch(request, "a")?, session.fetch(request, "b")?);
                    session.server_key()?.xor(a, b)
                }
                "AND" => {
                    let (a, b) = (session.fetch(request, "a")?, session.fetch(request, "b")?);
                    session.server_key()?.and(a, b)
                }
                "NOT" => {
                    let a = session.fetch(request, "a")?;
                    session.server_key()?.not(a)
                }
                other => return Err(format!("unknown gate kind {other:?}")),
            };
            Ok(json!({"handle": session.store(out)}))
        }
        "decrypt" => {
            let ct = session.fetch(request, "handle")?;
            let value = session.client_key()?.decrypt(ct);
            Ok(json!({"value": if value { 1 } else { 0 }}))
        }
        "export" => {
            let ct = session.fetch(request, "handle")?;
            let blob = bincode::serialize(ct).map_err(|e| e.to_string())?;
            Ok(json!({"data": B64.encode(blob)}))
        }
        "import" => {
            let blob = b64_field(request, "data")?;
            let ct: Ciphertext =
                bincode::deserialize(&blob).map_err(|e| format!("bad ciphertext: {e}"))?;
            Ok(json!({"handle": session.store(ct)}))
        }
        other => Err(format!("unknown op {other:?}")),
    }
}

fn main() -> io::Result<()> {
    let stdin = io::stdin();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    let mut session = Session::new();

    for line in stdin.lock().lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let request: Value = match serde_json::from_str(&line) {
            Ok(v) => v,
            Err(e) => {
                writeln!(out, "{}", json!({"ok": false, "error": format!("bad json: {e}")}))?;
                out.flush()?;
                continue;
            }
        };
        if request.get("op").and_then(Value::as_str) == Some("shutdown") {
            writeln!(out, "{}", json!({"ok": true}))?;
            out.flush()?;
            return Ok(());
        }
        let response = match handle_request(&mut session, &request) {
            Ok(mut fields) => {
                fields["ok"] = json!(true);
                fields
            }
            Err(message) => json!({"ok": false, "error": message}),
        };
        writeln!(out, "{response}")?;
        out.flush()?;
    }
    Ok(())
}
