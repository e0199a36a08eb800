# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled passage search. Same semantics and queue order as ``_search.search_py``."""

import numpy as np
cimport numpy as cnp
from libc.stdlib cimport malloc, realloc, free
from libc.stdint cimport uint64_t, int64_t, int32_t, uint32_t

cnp.import_array()

cdef uint64_t GOLDEN = 0x9E3779B97F4A7C15ULL
cdef uint64_t TAG_MARK = 0x4D41524B4D41524BULL
cdef uint64_t TAG_WALK = 0x57414C4B57414C4BULL
cdef double INV_2_53 = 1.0 / 9007199254740992.0
DEF MAXD = 4
DEF OFFSET = 32768


cdef inline uint64_t mix64(uint64_t z) nogil:
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL
    return z ^ (z >> 31)


cdef inline int64_t pack(int64_t* c, int d) nogil:
    cdef int64_t p = 0
    cdef int i
    for i in range(d):
        p |= (c[i] + OFFSET) << (16 * i)
    return p


cdef inline void unpack(int64_t p, int64_t* c, int d) nogil:
    cdef int i
    for i in range(d):
        c[i] = ((p >> (16 * i)) & 0xFFFF) - OFFSET


cdef class Workspace:
    """Dense scratch arrays over the window box, reused across searches."""
    cdef public int d, W
    cdef int64_t side
    cdef int64_t size
    cdef uint32_t* stamp
    cdef int32_t* index
    cdef uint32_t epoch

    def __cinit__(self, int d, int W):
        cdef int i
        self.d = d
        self.W = W
        self.side = 2 * W + 1
        self.size = 1
        for i in range(d):
            self.size *= self.side
        self.stamp = <uint32_t*> malloc(self.size * sizeof(uint32_t))
        self.index = <int32_t*> malloc(self.size * sizeof(int32_t))
        if self.stamp == NULL or self.index == NULL:
            raise MemoryError()
        for i in range(self.size):
            self.stamp[i] = 0
        self.epoch = 0

    def __dealloc__(self):
        free(self.stamp)
        free(self.index)

    cdef inline int64_t cell(self, int64_t* c) nogil:
        cdef int64_t idx = 0
        cdef int i
        for i in range(self.d):
            idx = idx * self.side + (c[i] + self.W)
        return idx

    cdef uint32_t next_epoch(self):
        cdef int64_t i
        self.epoch += 1
        if self.epoch == 0:
            for i in range(self.size):
                self.stamp[i] = 0
            self.epoch = 1
        return self.epoch


_workspaces = {}


def get_workspace(int d, int W):
    key = (d, W)
    ws = _workspaces.get(key)
    if ws is None:
        if len(_workspaces) >= 4:
            _workspaces.clear()
        ws = Workspace(d, W)
        _workspaces[key] = ws
    return ws


cdef struct Buf:
    # finalized sites
    int64_t* fpos
    int64_t* flab
    int64_t* fpred
    int64_t* fhop
    uint64_t* fwalk
    int64_t ncap
    int64_t n
    # events
    int32_t* eo
    int32_t* ek
    int64_t* epos
    int32_t* enext
    int64_t ecap
    int64_t ne


cdef int grow_sites(Buf* b) nogil:
    cdef int64_t cap = b.ncap * 2
    b.fpos = <int64_t*> realloc(b.fpos, cap * sizeof(int64_t))
    b.flab = <int64_t*> realloc(b.flab, cap * sizeof(int64_t))
    b.fpred = <int64_t*> realloc(b.fpred, cap * sizeof(int64_t))
    b.fhop = <int64_t*> realloc(b.fhop, cap * sizeof(int64_t))
    b.fwalk = <uint64_t*> realloc(b.fwalk, cap * sizeof(uint64_t))
    if b.fpos == NULL or b.flab == NULL or b.fpred == NULL or b.fhop == NULL or b.fwalk == NULL:
        return -1
    b.ncap = cap
    return 0


cdef int grow_events(Buf* b) nogil:
    cdef int64_t cap = b.ecap * 2
    b.eo = <int32_t*> realloc(b.eo, cap * sizeof(int32_t))
    b.ek = <int32_t*> realloc(b.ek, cap * sizeof(int32_t))
    b.epos = <int64_t*> realloc(b.epos, cap * sizeof(int64_t))
    b.enext = <int32_t*> realloc(b.enext, cap * sizeof(int32_t))
    if b.eo == NULL or b.ek == NULL or b.epos == NULL or b.enext == NULL:
        return -1
    b.ecap = cap
    return 0


cdef class _Params:
    cdef int d
    cdef uint64_t base_key
    cdef int64_t gperm[MAXD]
    cdef int64_t gsign[MAXD]
    cdef int64_t dax[2 * MAXD]
    cdef int64_t dsg[2 * MAXD]
    cdef double r
    cdef int64_t nforced
    cdef int64_t* fcoords
    cdef int64_t* fvals
    cdef int hkind
    cdef int64_t hc[MAXD]
    cdef int64_t hr
    cdef int tkind
    cdef int64_t tc[MAXD]
    cdef int64_t tr

    def __dealloc__(self):
        free(self.fcoords)
        free(self.fvals)


cdef inline void site_keys(_Params P, int64_t* c, uint64_t* mk, uint64_t* wk) nogil:
    # keys of the base site g^{-1} c, where (g^{-1} c)[i] = signs[i] * c[perm[i]]
    cdef int64_t base[MAXD]
    cdef int i
    cdef uint64_t h = P.base_key
    for i in range(P.d):
        base[i] = P.gsign[i] * c[P.gperm[i]]
    for i in range(P.d):
        h = mix64(h ^ <uint64_t> base[i])
    mk[0] = mix64(h ^ TAG_MARK)
    wk[0] = mix64(h ^ TAG_WALK)


cdef inline bint occupied(_Params P, int64_t* c, uint64_t mk) nogil:
    cdef int64_t j
    cdef int i
    cdef bint same
    for j in range(P.nforced):
        same = True
        for i in range(P.d):
            if P.fcoords[j * P.d + i] != c[i]:
                same = False
                break
        if same:
            return P.fvals[j] == 1
    return ((mk >> 11) * INV_2_53) < P.r


cdef inline int64_t heur(_Params P, int64_t* c) nogil:
    cdef int64_t dist = 0
    cdef int i
    if P.hkind == 0:
        return 0
    for i in range(P.d):
        dist += c[i] - P.hc[i] if c[i] >= P.hc[i] else P.hc[i] - c[i]
    if P.hkind == 1:
        return dist
    return P.hr - dist if P.hr >= dist else dist - P.hr


cdef inline bint is_target(_Params P, int64_t* c, const unsigned char* mask, Workspace ws) nogil:
    cdef int64_t dist = 0
    cdef int i
    if P.tkind == 0:
        return False
    if P.tkind == 4:
        return mask[ws.cell(c)] != 0
    if P.tkind == 1:
        for i in range(P.d):
            if c[i] != P.tc[i]:
                return False
        return True
    for i in range(P.d):
        dist += c[i] - P.tc[i] if c[i] >= P.tc[i] else P.tc[i] - c[i]
    if P.tkind == 2:
        return dist == P.tr
    for i in range(P.d):
        if c[i] < 0:
            return False
    return dist == P.tr


cdef inline uint64_t step_dir(uint64_t wk, int64_t k, int twod) nogil:
    cdef uint64_t v = mix64(wk + <uint64_t> k * GOLDEN)
    return ((v >> 32) * <uint64_t> twod) >> 32


def search_c(uint64_t base_key, int d, int W, int H, double r,
             cnp.int64_t[:, ::1] forced_coords, cnp.int64_t[::1] forced_vals,
             cnp.int64_t[::1] perm, cnp.int64_t[::1] signs,
             cnp.int64_t[::1] source, long g0, long cutoff,
             int hkind, cnp.int64_t[::1] hcenter, long hradius,
             int tkind, cnp.int64_t[::1] tcenter, long tradius,
             const unsigned char[::1] tmask, int stop_mode):
    if d > MAXD:
        raise ValueError("compiled kernel supports d <= 4")
    cdef Workspace ws = get_workspace(d, W)
    cdef _Params P = _Params()
    cdef int i, a
    cdef int64_t j
    P.d = d
    P.base_key = base_key
    P.r = r
    for i in range(d):
        P.gperm[i] = perm[i]
        P.gsign[i] = signs[i]
    # base direction index -> conjugated (axis, sign)
    for a in range(d):
        P.dax[2 * a] = perm[a]
        P.dsg[2 * a] = signs[a]
        P.dax[2 * a + 1] = perm[a]
        P.dsg[2 * a + 1] = -signs[a]
    P.nforced = forced_vals.shape[0]
    P.fcoords = <int64_t*> malloc((P.nforced * d + 1) * sizeof(int64_t))
    P.fvals = <int64_t*> malloc((P.nforced + 1) * sizeof(int64_t))
    for j in range(P.nforced):
        P.fvals[j] = forced_vals[j]
        for i in range(d):
            P.fcoords[j * d + i] = forced_coords[j, i]
    P.hkind = hkind
    P.hr = hradius
    P.tkind = tkind
    P.tr = tradius
    for i in range(d):
        P.hc[i] = hcenter[i] if hcenter.shape[0] > i else 0
        P.tc[i] = tcenter[i] if tcenter.shape[0] > i else 0
    cdef const unsigned char* mask = &tmask[0] if tmask.shape[0] > 0 else NULL
    if tkind == 4 and mask == NULL:
        raise ValueError("set target requires a mask")

    cdef uint32_t epoch = ws.next_epoch()
    cdef int twod = 2 * d
    cdef long nb = cutoff + 2 if cutoff >= 0 else 1
    cdef int32_t* bhead = <int32_t*> malloc(nb * sizeof(int32_t))
    cdef int32_t* btail = <int32_t*> malloc(nb * sizeof(int32_t))
    cdef Buf b
    b.ncap = 256
    b.n = 0
    b.ecap = 1024
    b.ne = 0
    b.fpos = <int64_t*> malloc(b.ncap * sizeof(int64_t))
    b.flab = <int64_t*> malloc(b.ncap * sizeof(int64_t))
    b.fpred = <int64_t*> malloc(b.ncap * sizeof(int64_t))
    b.fhop = <int64_t*> malloc(b.ncap * sizeof(int64_t))
    b.fwalk = <uint64_t*> malloc(b.ncap * sizeof(uint64_t))
    b.eo = <int32_t*> malloc(b.ecap * sizeof(int32_t))
    b.ek = <int32_t*> malloc(b.ecap * sizeof(int32_t))
    b.epos = <int64_t*> malloc(b.ecap * sizeof(int64_t))
    b.enext = <int32_t*> malloc(b.ecap * sizeof(int32_t))

    cdef int64_t c[MAXD]
    cdef int64_t c2[MAXD]
    cdef uint64_t mk, wk, dirn
    cdef int64_t found = -1
    cdef int64_t events = 0
    cdef long cur, f, g
    cdef int64_t o, k, pos, npos, n, cell, e, norm
    cdef bint done = False
    cdef long last = -1
    cdef int err = 0

    for j in range(nb):
        bhead[j] = -1
        btail[j] = -1

    with nogil:
        for i in range(d):
            c[i] = source[i]
        site_keys(P, c, &mk, &wk)
        b.fpos[0] = pack(c, d)
        b.flab[0] = g0
        b.fpred[0] = -1
        b.fhop[0] = 0
        b.fwalk[0] = wk
        b.n = 1
        cell = ws.cell(c)
        ws.stamp[cell] = epoch
        ws.index[cell] = 0
        if is_target(P, c, mask, ws):
            found = 0
            if stop_mode != 0:
                done = True
        if not done and H >= 1 and occupied(P, c, mk):
            dirn = step_dir(wk, 1, twod)
            c[P.dax[dirn]] += P.dsg[dirn]
            g = g0 + 1
            f = g + heur(P, c)
            if f <= cutoff:
                b.eo[0] = 0
                b.ek[0] = 1
                b.epos[0] = pack(c, d)
                b.enext[0] = -1
                b.ne = 1
                bhead[f] = 0
                btail[f] = 0

        cur = 0
        while not done and cur <= cutoff:
            e = bhead[cur]
            while e >= 0:
                o = b.eo[e]
                k = b.ek[e]
                pos = b.epos[e]
                events += 1
                unpack(pos, c, d)
                norm = 0
                for i in range(d):
                    norm += c[i] if c[i] >= 0 else -c[i]
                if norm <= W:
                    cell = ws.cell(c)
                    if ws.stamp[cell] != epoch:
                        if b.n == b.ncap:
                            if grow_sites(&b) != 0:
                                err = 1
                                done = True
                                break
                        n = b.n
                        site_keys(P, c, &mk, &wk)
                        b.fpos[n] = pos
                        b.flab[n] = b.flab[o] + k
                        b.fpred[n] = o
                        b.fhop[n] = k
                        b.fwalk[n] = wk
                        b.n = n + 1
                        ws.stamp[cell] = epoch
                        ws.index[cell] = <int32_t> n
                        if found < 0 and is_target(P, c, mask, ws):
                            found = n
                            if stop_mode == 1:
                                done = True
                                break
                            if stop_mode == 2:
                                last = cur
                        if H >= 1 and occupied(P, c, mk):
                            g = b.flab[n] + 1
                            if g - g0 <= H:
                                dirn = step_dir(wk, 1, twod)
                                for i in range(d):
                                    c2[i] = c[i]
                                c2[P.dax[dirn]] += P.dsg[dirn]
                                f = g + heur(P, c2)
                                if f <= cutoff:
                                    if b.ne == b.ecap:
                                        if grow_events(&b) != 0:
                                            err = 1
                                            done = True
                                            break
                                    b.eo[b.ne] = <int32_t> n
                                    b.ek[b.ne] = 1
                                    b.epos[b.ne] = pack(c2, d)
                                    b.enext[b.ne] = -1
                                    if btail[f] >= 0:
                                        b.enext[btail[f]] = <int32_t> b.ne
                                    else:
                                        bhead[f] = <int32_t> b.ne
                                    btail[f] = <int32_t> b.ne
                                    b.ne += 1
                if k < H:
                    g = b.flab[o] + k + 1
                    if g - g0 <= H:
                        dirn = step_dir(b.fwalk[o], k + 1, twod)
                        c[P.dax[dirn]] += P.dsg[dirn]
                        f = g + heur(P, c)
                        if f <= cutoff:
                            if b.ne == b.ecap:
                                if grow_events(&b) != 0:
                                    err = 1
                                    done = True
                                    break
                            b.eo[b.ne] = <int32_t> o
                            b.ek[b.ne] = <int32_t> (k + 1)
                            b.epos[b.ne] = pack(c, d)
                            b.enext[b.ne] = -1
                            if btail[f] >= 0:
                                b.enext[btail[f]] = <int32_t> b.ne
                            else:
                                bhead[f] = <int32_t> b.ne
                            btail[f] = <int32_t> b.ne
                            b.ne += 1
                e = b.enext[e]
            if cur == last:
                done = True
            cur += 1

    free(bhead)
    free(btail)
    if err:
        free(b.fpos); free(b.flab); free(b.fpred); free(b.fhop); free(b.fwalk)
        free(b.eo); free(b.ek); free(b.epos); free(b.enext)
        raise MemoryError()

    sites = np.empty((b.n, d), dtype=np.int64)
    labels = np.empty(b.n, dtype=np.int64)
    pred = np.empty(b.n, dtype=np.int64)
    hop = np.empty(b.n, dtype=np.int64)
    cdef cnp.int64_t[:, ::1] sv = sites
    cdef cnp.int64_t[::1] lv = labels, pv = pred, hv = hop
    for j in range(b.n):
        unpack(b.fpos[j], c, d)
        for i in range(d):
            sv[j, i] = c[i]
        lv[j] = b.flab[j]
        pv[j] = b.fpred[j]
        hv[j] = b.fhop[j]
    free(b.fpos); free(b.flab); free(b.fpred); free(b.fhop); free(b.fwalk)
    free(b.eo); free(b.ek); free(b.epos); free(b.enext)
    return sites, labels, pred, hop, found, events
