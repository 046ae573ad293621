"""
Sorting without looking at the data
===================================

A comparator network fixes, ahead of time, which pairs of positions get a
compare-and-swap. The wiring depends only on the input size, so running it
over encrypted records leaks nothing about their order. Stability is not
built in; appending each record's original position as low-order key bits
buys it for one extra bit-width per doubling.
"""

from ocwc import (
    KeyedRecord,
    KeyedRecordSet,
    SimBackend,
    decrypt_word,
    encrypt_word,
    generate_network,
    oblivious_sort,
    with_stability_suffix,
)

# Comparator counts follow the odd-even merge recurrence.
for size in (2, 4, 8, 16, 32):
    net = generate_network(size)
    print(f"size {size:>2}: {len(net.comparators):>3} comparators,"
          f" {len(net.layers)} layers")

# Sort eight 3-bit keys carrying a payload word. Keys contain duplicates on
# purpose; the stability suffix keeps their original relative order.
be = SimBackend()
keys = [3, 1, 3, 0, 1, 3, 0, 1]
records = [
    KeyedRecord(
        key=encrypt_word(be, key, 3),
        payload=(encrypt_word(be, pos, 3),),
    )
    for pos, key in enumerate(keys)
]
suffixed = with_stability_suffix(KeyedRecordSet(tuple(records)))
result = oblivious_sort(suffixed, generate_network(8))

print()
print("input keys: ", keys)
print("sorted     :", [decrypt_word(be, r.key) >> 3 for r in result.records])
print("came from  :", [decrypt_word(be, r.payload[0]) for r in result.records])
print()
print("gates used :", be.transcript.total_gates)
