# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pattern-growth kernel; mirrors _growth_py.mine_sequences.

Same contract, same output, typed C loops for the suffix scans that
dominate mining time.
"""

from libc.stdlib cimport malloc, free


cdef struct Scratch:
    int* data        # all sequences, flattened
    int* offs        # nseq + 1 offsets into data
    int* cnt         # per-code distinct-sequence count
    int* seen        # per-code stamp marking "seen in current entry"
    char* open_state # per-service 0/1
    int n_codes
    int minsup
    int max_len
    int stamp


cdef void _grow(Scratch* sc, list prefix, int open_count,
                int* eseq, int* epos, int n_entries, dict results):
    cdef int i, j, c, svc, code, n_new, end, first, n_cand, k
    cdef int* data = sc.data
    cdef int* offs = sc.offs
    cdef int* new_eseq
    cdef int* new_epos
    cdef int* cand_code
    cdef int* cand_cnt

    if len(prefix) >= sc.max_len:
        return

    for c in range(sc.n_codes):
        sc.cnt[c] = 0
    for i in range(n_entries):
        sc.stamp += 1
        end = offs[eseq[i] + 1]
        for j in range(epos[i], end):
            c = data[j]
            if sc.seen[c] != sc.stamp:
                sc.seen[c] = sc.stamp
                sc.cnt[c] += 1

    # snapshot candidates: sc.cnt is scratch shared with the recursion below
    cand_code = <int*> malloc((sc.n_codes if sc.n_codes else 1) * sizeof(int))
    cand_cnt = <int*> malloc((sc.n_codes if sc.n_codes else 1) * sizeof(int))
    if cand_code == NULL or cand_cnt == NULL:
        free(cand_code)
        free(cand_cnt)
        raise MemoryError()
    n_cand = 0
    for code in range(sc.n_codes):
        if sc.cnt[code] < sc.minsup:
            continue
        if (code & 1) != sc.open_state[code >> 1]:
            continue
        cand_code[n_cand] = code
        cand_cnt[n_cand] = sc.cnt[code]
        n_cand += 1

    try:
        for k in range(n_cand):
            code = cand_code[k]
            svc = code >> 1
            new_eseq = <int*> malloc(cand_cnt[k] * sizeof(int))
            new_epos = <int*> malloc(cand_cnt[k] * sizeof(int))
            if new_eseq == NULL or new_epos == NULL:
                free(new_eseq)
                free(new_epos)
                raise MemoryError()
            n_new = 0
            for i in range(n_entries):
                end = offs[eseq[i] + 1]
                first = -1
                for j in range(epos[i], end):
                    if data[j] == code:
                        first = j
                        break
                if first >= 0:
                    new_eseq[n_new] = eseq[i]
                    new_epos[n_new] = first + 1
                    n_new += 1
            prefix.append(code)
            sc.open_state[svc] ^= 1
            if code & 1:
                open_count -= 1
            else:
                open_count += 1
            if open_count == 0:
                results[tuple(prefix)] = [new_eseq[i] for i in range(n_new)]
            _grow(sc, prefix, open_count, new_eseq, new_epos, n_new, results)
            if code & 1:
                open_count += 1
            else:
                open_count -= 1
            sc.open_state[svc] ^= 1
            prefix.pop()
            free(new_eseq)
            free(new_epos)
    finally:
        free(cand_code)
        free(cand_cnt)


def mine_sequences(seqs, int n_codes, int minsup, int max_len):
    """Grow frequent closed endpoint patterns over encoded sequences.

    Returns a dict mapping each pattern (tuple of codes) to the ascending
    list of indices of the sequences that contain it.
    """
    cdef int nseq = len(seqs)
    cdef int total = 0
    cdef int i, j, ts
    cdef Scratch sc
    cdef int* eseq = NULL
    cdef int* epos = NULL
    results = {}

    for s in seqs:
        total += len(s)

    sc.n_codes = n_codes
    sc.minsup = minsup
    sc.max_len = max_len
    sc.stamp = 0
    sc.data = <int*> malloc((total if total else 1) * sizeof(int))
    sc.offs = <int*> malloc((nseq + 1) * sizeof(int))
    sc.cnt = <int*> malloc((n_codes if n_codes else 1) * sizeof(int))
    sc.seen = <int*> malloc((n_codes if n_codes else 1) * sizeof(int))
    sc.open_state = <char*> malloc(n_codes // 2 + 1)
    eseq = <int*> malloc((nseq if nseq else 1) * sizeof(int))
    epos = <int*> malloc((nseq if nseq else 1) * sizeof(int))

    try:
        if (sc.data == NULL or sc.offs == NULL or sc.cnt == NULL
                or sc.seen == NULL or sc.open_state == NULL
                or eseq == NULL or epos == NULL):
            raise MemoryError()
        for i in range(n_codes):
            sc.seen[i] = 0
        for i in range(n_codes // 2 + 1):
            sc.open_state[i] = 0
        ts = 0
        for i, s in enumerate(seqs):
            sc.offs[i] = ts
            for c in s:
                sc.data[ts] = c
                ts += 1
        sc.offs[nseq] = ts
        for i in range(nseq):
            eseq[i] = i
            epos[i] = sc.offs[i]
        _grow(&sc, [], 0, eseq, epos, nseq, results)
    finally:
        free(sc.data)
        free(sc.offs)
        free(sc.cnt)
        free(sc.seen)
        free(sc.open_state)
        free(eseq)
        free(epos)
    return results
