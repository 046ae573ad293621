"""
The two-message exchange, through actual files
==============================================

One message each way: the owner ships an encrypted dataset file, the
analyst returns an encrypted mask file. The files double as the wire
format, so this demo is the whole outsourcing story minus the network.
The analyst side never holds a secret key and never calls decrypt.
"""

import tempfile
from pathlib import Path

from ocwc import (
    SimBackend,
    decode_dataset_message,
    decode_mask_message,
    encode_dataset_message,
    encode_mask_message,
    encrypt_dataset,
    gen_dataset,
    improved_select,
    keygen,
    pad,
    select,
)

workdir = Path(tempfile.mkdtemp(prefix="ocwc-demo-"))
ds = gen_dataset(n=8, k=4, seed=11, planted=2)

# --- owner side -----------------------------------------------------------
key_paths = keygen(workdir / "keys", backend="sim", seed=0)
print("keygen wrote:", ", ".join(p.name for p in key_paths))

owner = SimBackend()
request = encode_dataset_message(encrypt_dataset(owner, pad(ds)))
(workdir / "dataset.enc").write_bytes(request)
print(f"owner -> analyst: dataset.enc ({len(request)} bytes)")

# --- analyst side (no secret key, no decrypting) ---------------------------
analyst = SimBackend()
state = decode_dataset_message(analyst, (workdir / "dataset.enc").read_bytes())
mask_cipher = select(state, "improved")
response = encode_mask_message(analyst, mask_cipher)
(workdir / "mask.enc").write_bytes(response)
print(f"analyst -> owner: mask.enc ({len(response)} bytes)")
print("analyst decrypt calls:", analyst.decrypt_count)
print("analyst gates:", analyst.transcript.total_gates)

# --- owner side again -------------------------------------------------------
received = decode_mask_message(owner, (workdir / "mask.enc").read_bytes(),
                               expected_k=ds.k)
mask = received.decrypt()
kept = [name for name, bit in zip(ds.feature_names, mask) if bit]
print()
print("owner decrypts mask:", "".join(str(b) for b in mask))
print("selected features:", " ".join(kept))

# The same flow is scriptable from the shell:
#   ocwc keygen --out keys
#   ocwc encrypt data.csv --out dataset.enc
#   ocwc select --input dataset.enc --out mask.enc
#   ocwc decrypt --input mask.enc --dataset data.csv
