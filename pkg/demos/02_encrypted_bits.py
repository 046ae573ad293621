"""
Encrypted bits, words, and the gate transcript
==============================================

The whole package runs on one tiny contract: encrypted single bits and the
gates XOR, AND, NOT, plus constants. Everything else (adders, comparators,
multiplexers) is built from those, so any backend that provides the contract
runs the same circuits. The simulation backend holds plain bits but records
every gate in a transcript; the digest of that transcript is how the tests
prove data-obliviousness.
"""

from ocwc import (
    SimBackend,
    add,
    cmp_gt,
    decrypt_word,
    encrypt_word,
    eq,
    mux,
)

be = SimBackend()

# Single gates first.
a, b = be.encrypt_bit(1), be.encrypt_bit(0)
print("XOR(1,0) =", be.decrypt_bit(be.gate_xor(a, b)))
print("AND(1,0) =", be.decrypt_bit(be.gate_and(a, b)))
print("NOT(1)   =", be.decrypt_bit(be.gate_not(a)))

# Words are little-endian lists of encrypted bits. The helpers never look
# at values, only wire bits together, so their gate counts are fixed.
x = encrypt_word(be, 6, 4)
y = encrypt_word(be, 7, 4)
print()
print("6 + 7       =", decrypt_word(be, add(x, y)))
print("6 > 7       =", be.decrypt_bit(cmp_gt(x, y)))
print("6 == 6      =", be.decrypt_bit(eq(x, encrypt_word(be, 6, 4))))
swap = cmp_gt(x, y)
print("max(6, 7)   =", decrypt_word(be, mux(swap, x, y)))

print()
print("gates so far:", dict(be.transcript.counts))
print("encrypts:", be.encrypt_count, " decrypts:", be.decrypt_count)

# The digest covers gate kinds and wiring, never plaintext values: run the
# same computation on different inputs and the digest cannot change.
digests = set()
for u, v in ((6, 7), (0, 15), (9, 9)):
    fresh = SimBackend()
    mux(cmp_gt(encrypt_word(fresh, u, 4), encrypt_word(fresh, v, 4)),
        encrypt_word(fresh, u, 4), encrypt_word(fresh, v, 4))
    digests.add(fresh.transcript.digest())
print()
print("distinct digests across three inputs:", len(digests))
