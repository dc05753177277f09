# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels over fixed-width bitset rows (64 points per word)."""
from libc.stdint cimport uint64_t
from libc.stdlib cimport malloc, free
from libc.string cimport memset

cdef extern from *:
    int __builtin_ctzll(unsigned long long x) nogil

cdef enum:
    BOT = 0
    VAR = 1
    AND = 2
    OR = 3
    IMP = 4


cdef class _FrameWords:
    cdef int n, w
    cdef uint64_t *down
    cdef uint64_t *full

    def __cinit__(self, frame):
        cdef int i
        self.n = frame.size
        self.w = (self.n + 63) // 64
        self.down = <uint64_t *> malloc(sizeof(uint64_t) * self.n * self.w)
        self.full = <uint64_t *> malloc(sizeof(uint64_t) * self.w)
        for i in range(self.n):
            _load(frame.down[i], self.down + i * self.w, self.w)
        _load(frame.all, self.full, self.w)

    def __dealloc__(self):
        free(self.down)
        free(self.full)


cdef inline void _load(object x, uint64_t *dst, int w):
    cdef bytes raw = (<object> x).to_bytes(w * 8, "little")
    cdef const unsigned char *p = raw
    cdef int i, j
    cdef uint64_t v
    for i in range(w):
        v = 0
        for j in range(8):
            v |= (<uint64_t> p[i * 8 + j]) << (8 * j)
        dst[i] = v


cdef inline object _store(uint64_t *src, int w):
    cdef bytearray raw = bytearray(w * 8)
    cdef int i, j
    for i in range(w):
        for j in range(8):
            raw[i * 8 + j] = (src[i] >> (8 * j)) & 0xFF
    return int.from_bytes(raw, "little")


cdef _FrameWords _words(frame):
    fw = getattr(frame, "_kernel_words", None)
    if fw is None:
        fw = _FrameWords(frame)
        frame._kernel_words = fw
    return <_FrameWords> fw


cdef inline void _complement_downclose(uint64_t *bad, _FrameWords fw, uint64_t *out):
    """out = full & ~down_closure(bad); ``bad`` is clobbered."""
    cdef int w = fw.w, i, k, bit
    cdef uint64_t word
    cdef uint64_t *row
    for i in range(w):
        out[i] = 0  # accumulate the hit set first
    for i in range(w):
        word = bad[i] & ~out[i]
        while word:
            bit = __builtin_ctzll(word)
            row = fw.down + (i * 64 + bit) * w
            for k in range(w):
                out[k] |= row[k]
            word = bad[i] & ~out[i]
    for i in range(w):
        out[i] = fw.full[i] & ~out[i]


cdef void _run(int size, int *kinds, int *lefts, int *rights, int *vars_,
               uint64_t *lo_vals, uint64_t *hi_vals, _FrameWords fw,
               uint64_t *lo, uint64_t *hi, uint64_t *tmp, char *preset):
    cdef int w = fw.w, i, k, a, b, v
    cdef uint64_t *L
    cdef uint64_t *H
    for i in range(size):
        if preset != NULL and preset[i]:
            continue
        k = kinds[i]
        L = lo + i * w
        H = hi + i * w
        if k == VAR:
            v = vars_[i]
            for a in range(w):
                L[a] = lo_vals[v * w + a]
                H[a] = hi_vals[v * w + a]
        elif k == BOT:
            for a in range(w):
                L[a] = 0
                H[a] = 0
        elif k == AND:
            a = lefts[i]
            b = rights[i]
            for v in range(w):
                L[v] = lo[a * w + v] & lo[b * w + v]
                H[v] = hi[a * w + v] & hi[b * w + v]
        elif k == OR:
            a = lefts[i]
            b = rights[i]
            for v in range(w):
                L[v] = lo[a * w + v] | lo[b * w + v]
                H[v] = hi[a * w + v] | hi[b * w + v]
        else:
            a = lefts[i]
            b = rights[i]
            for v in range(w):
                tmp[v] = hi[a * w + v] & ~lo[b * w + v]
            _complement_downclose(tmp, fw, L)
            if lo == hi:
                continue
            for v in range(w):
                tmp[v] = lo[a * w + v] & ~hi[b * w + v]
            _complement_downclose(tmp, fw, H)


def formula_bounds(prog, frame, lo_vals, hi_vals):
    cdef _FrameWords fw = _words(frame)
    cdef int w = fw.w, size = prog.size, nv = len(lo_vals), i
    cdef int[:] kinds = prog.kinds
    cdef int[:] lefts = prog.lefts
    cdef int[:] rights = prog.rights
    cdef int[:] vars_ = prog.vars
    cdef uint64_t *lov = <uint64_t *> malloc(sizeof(uint64_t) * (nv + 1) * w)
    cdef uint64_t *hiv = <uint64_t *> malloc(sizeof(uint64_t) * (nv + 1) * w)
    cdef uint64_t *lo = <uint64_t *> malloc(sizeof(uint64_t) * size * w)
    cdef uint64_t *hi = <uint64_t *> malloc(sizeof(uint64_t) * size * w)
    cdef uint64_t *tmp = <uint64_t *> malloc(sizeof(uint64_t) * w)
    try:
        for i in range(nv):
            _load(lo_vals[i], lov + i * w, w)
            _load(hi_vals[i], hiv + i * w, w)
        _run(size, &kinds[0], &lefts[0], &rights[0], &vars_[0], lov, hiv, fw, lo, hi, tmp, NULL)
        return _store(lo + (size - 1) * w, w), _store(hi + (size - 1) * w, w)
    finally:
        free(lov); free(hiv); free(lo); free(hi); free(tmp)


def extend_extensions(todo, ext, frame, valuation):
    """Same contract as the pure-Python kernel: fill ``ext`` for ``todo`` (post-order)."""
    cdef _FrameWords fw = _words(frame)
    cdef int w = fw.w
    cdef int size, i, nv
    # nodes needed: todo plus their already-known children
    index = {}
    order = []
    for n in todo:
        for c in ((n.left, n.right) if n.kind >= AND else ()):
            if c not in index and c in ext:
                index[c] = len(order)
                order.append(c)
    known = len(order)
    for n in todo:
        index[n] = len(order)
        order.append(n)
    size = len(order)
    names = sorted({n.name for n in todo if n.kind == VAR})
    slot = {nm: k for k, nm in enumerate(names)}
    nv = len(names)
    cdef int *kinds = <int *> malloc(sizeof(int) * size)
    cdef int *lefts = <int *> malloc(sizeof(int) * size)
    cdef int *rights = <int *> malloc(sizeof(int) * size)
    cdef int *vars_ = <int *> malloc(sizeof(int) * size)
    cdef char *preset = <char *> malloc(size)
    cdef uint64_t *vals = <uint64_t *> malloc(sizeof(uint64_t) * (nv + 1) * w)
    cdef uint64_t *buf = <uint64_t *> malloc(sizeof(uint64_t) * size * w)
    cdef uint64_t *tmp = <uint64_t *> malloc(sizeof(uint64_t) * w)
    try:
        memset(preset, 0, size)
        for i in range(size):
            n = order[i]
            kinds[i] = n.kind
            lefts[i] = rights[i] = vars_[i] = -1
            if i < known:  # value already known; its children are irrelevant
                preset[i] = 1
                _load(ext[n], buf + i * w, w)
                continue
            if n.kind >= AND:
                lefts[i] = index[n.left]
                rights[i] = index[n.right]
            elif n.kind == VAR:
                vars_[i] = slot[n.name]
        for i in range(nv):
            _load(valuation.get(names[i], 0), vals + i * w, w)
        _run(size, kinds, lefts, rights, vars_, vals, vals, fw, buf, buf, tmp, preset)
        for i in range(known, size):
            ext[order[i]] = _store(buf + i * w, w)
    finally:
        free(kinds); free(lefts); free(rights); free(vars_); free(preset)
        free(vals); free(buf); free(tmp)
