"""Pure-Python pattern-growth kernel.

Works on integer-encoded endpoint sequences (code = 2 * service + is_end).
A prefix is extended one endpoint at a time under the alternation rule: a
start is legal only while the service is closed, an end only while it is
open. Patterns are reported when every start has been closed.

The compiled twin in _growth_cy.pyx must return bit-identical results.
"""

from __future__ import annotations


def mine_sequences(seqs, n_codes, minsup, max_len):
    """Grow frequent closed endpoint patterns over encoded sequences.

    Returns a dict mapping each pattern (tuple of codes) to the ascending
    list of indices of the sequences that contain it.
    """
    results = {}
    open_state = bytearray(n_codes // 2 + 1)

    def grow(prefix, open_count, entries):
        if len(prefix) >= max_len:
            return
        counts = {}
        firsts = {}
        for si, pos in entries:
            seq = seqs[si]
            seen = set()
            for j in range(pos, len(seq)):
                c = seq[j]
                if c not in seen:
                    seen.add(c)
                    counts[c] = counts.get(c, 0) + 1
                    firsts[si, c] = j
        for code in sorted(counts):
            if counts[code] < minsup:
                continue
            svc = code >> 1
            if (code & 1) != open_state[svc]:
                continue
            new_entries = [
                (si, firsts[si, code] + 1) for si, _ in entries if (si, code) in firsts
            ]
            prefix.append(code)
            open_state[svc] ^= 1
            new_open = open_count + (1 if not code & 1 else -1)
            if new_open == 0:
                results[tuple(prefix)] = [si for si, _ in new_entries]
            grow(prefix, new_open, new_entries)
            open_state[svc] ^= 1
            prefix.pop()

    grow([], 0, [(i, 0) for i in range(len(seqs))])
    return results
