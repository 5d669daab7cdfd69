# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Incremental CDCL engine, compiled backend.

Same algorithm and interface as ``_pysolver``; per-variable state lives in
C arrays, clauses and watch lists stay Python lists of ints.
"""

import heapq
import random

from libc.stdlib cimport free, realloc

BACKEND = "cython"


cdef long _luby(long i):
    cdef long size = 1, seq = 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


cdef class Solver:
    cdef public int nvars
    cdef int cap
    cdef signed char *value
    cdef int *level
    cdef int *reason
    cdef signed char *phase
    cdef double *activity
    cdef signed char *seen
    cdef int *trail
    cdef int trail_size
    cdef int *trail_lim
    cdef int n_lim
    cdef int qhead
    cdef public list watches
    cdef public list clauses
    cdef public bint proof
    cdef public object original
    cdef public object chains
    cdef public object final_chain
    cdef list heap
    cdef double var_inc
    cdef double var_decay
    cdef public bint unsat
    cdef object rng
    cdef public long conflicts
    cdef public long decisions
    cdef public long propagations
    cdef public long num_learnt

    def __cinit__(self, seed=0, proof=False):
        self.cap = 0
        self.value = NULL
        self.level = NULL
        self.reason = NULL
        self.phase = NULL
        self.activity = NULL
        self.seen = NULL
        self.trail = NULL
        self.trail_lim = NULL

    def __init__(self, seed=0, proof=False):
        self.nvars = 0
        self.trail_size = 0
        self.n_lim = 0
        self.qhead = 0
        self.watches = [[], []]
        self.clauses = []
        self.proof = bool(proof)
        self.original = [] if proof else None
        self.chains = {} if proof else None
        self.final_chain = None
        self.heap = []
        self.var_inc = 1.0
        self.var_decay = 0.95
        self.unsat = False
        self.rng = random.Random(seed)
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        self.num_learnt = 0
        self._grow(16)

    def __dealloc__(self):
        free(self.value)
        free(self.level)
        free(self.reason)
        free(self.phase)
        free(self.activity)
        free(self.seen)
        free(self.trail)
        free(self.trail_lim)

    cdef void _grow(self, int need) except *:
        cdef int cap = self.cap if self.cap > 0 else 16
        cdef int v
        while cap < need:
            cap *= 2
        if cap == self.cap:
            return
        self.value = <signed char *> realloc(self.value, 2 * (cap + 1) * sizeof(signed char))
        self.level = <int *> realloc(self.level, (cap + 1) * sizeof(int))
        self.reason = <int *> realloc(self.reason, (cap + 1) * sizeof(int))
        self.phase = <signed char *> realloc(self.phase, (cap + 1) * sizeof(signed char))
        self.activity = <double *> realloc(self.activity, (cap + 1) * sizeof(double))
        self.seen = <signed char *> realloc(self.seen, (cap + 1) * sizeof(signed char))
        self.trail = <int *> realloc(self.trail, (cap + 1) * sizeof(int))
        self.trail_lim = <int *> realloc(self.trail_lim, 2 * (cap + 1) * sizeof(int))
        if (self.value == NULL or self.level == NULL or self.reason == NULL or self.phase == NULL
                or self.activity == NULL or self.seen == NULL or self.trail == NULL or self.trail_lim == NULL):
            raise MemoryError()
        for v in range(self.cap + 1 if self.cap > 0 else 0, cap + 1):
            self.value[2 * v] = 0
            self.value[2 * v + 1] = 0
            self.level[v] = 0
            self.reason[v] = -1
            self.phase[v] = 0
            self.activity[v] = 0.0
            self.seen[v] = 0
        self.cap = cap

    # -- variables and clauses -------------------------------------------

    def new_var(self):
        self.nvars += 1
        cdef int v = self.nvars
        if v > self.cap:
            self._grow(v)
        self.value[2 * v] = 0
        self.value[2 * v + 1] = 0
        self.level[v] = 0
        self.reason[v] = -1
        self.phase[v] = 0
        self.seen[v] = 0
        act = self.rng.random() * 1e-5
        self.activity[v] = act
        self.watches.append([])
        self.watches.append([])
        heapq.heappush(self.heap, (-act, v))
        return v

    def ensure_vars(self, int n):
        while self.nvars < n:
            self.new_var()

    def add_clause(self, lits):
        """Add a clause of DIMACS literals at decision level 0; returns its id."""
        cdef int l, v, il
        cdef bint taut = False
        if self.n_lim:
            self._backtrack(0)
        ilits = []
        mark = set()
        for l in lits:
            if l == 0:
                raise ValueError("literal 0 is not allowed")
            v = l if l > 0 else -l
            if v > self.nvars:
                self.ensure_vars(v)
            il = 2 * v + (l < 0)
            if il in mark:
                continue
            if (il ^ 1) in mark:
                taut = True
            mark.add(il)
            ilits.append(il)
        cid = len(self.clauses)
        self.clauses.append(ilits)
        if self.proof:
            self.original.append(frozenset(lits))
        if taut or self.unsat:
            return cid
        for il in ilits:
            if self.value[il] == 1:
                return cid
        live = [il for il in ilits if self.value[il] == 0]
        if not live:
            self.unsat = True
            if self.proof:
                self._final_refutation(cid)
            return cid
        dead = [il for il in ilits if self.value[il] != 0]
        ilits[:] = live + dead
        if len(ilits) >= 2:
            self.watches[ilits[0]].append(cid)
            self.watches[ilits[1]].append(cid)
        if len(live) == 1:
            self._enqueue(ilits[0], cid)
        return cid

    # -- assignment ----------------------------------------------------------

    cdef inline void _enqueue(self, int lit, int cid):
        self.value[lit] = 1
        self.value[lit ^ 1] = -1
        cdef int v = lit >> 1
        self.level[v] = self.n_lim
        self.reason[v] = cid
        self.trail[self.trail_size] = lit
        self.trail_size += 1

    cdef void _backtrack(self, int lvl):
        if self.n_lim <= lvl:
            return
        cdef int stop = self.trail_lim[lvl]
        cdef int idx, lit, v
        heap = self.heap
        for idx in range(self.trail_size - 1, stop - 1, -1):
            lit = self.trail[idx]
            v = lit >> 1
            self.value[lit] = 0
            self.value[lit ^ 1] = 0
            self.phase[v] = 0 if (lit & 1) else 1
            self.reason[v] = -1
            heapq.heappush(heap, (-self.activity[v], v))
        self.trail_size = stop
        self.n_lim = lvl
        self.qhead = stop

    cdef int _propagate(self):
        cdef signed char *value = self.value
        cdef list watches = self.watches
        cdef list clauses = self.clauses
        cdef list ws, c
        cdef int p, false_lit, i, j, n, cid, first, k, q, v, nc
        cdef bint found
        cdef int dl = self.n_lim
        while self.qhead < self.trail_size:
            p = self.trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            false_lit = p ^ 1
            ws = <list> watches[false_lit]
            i = 0
            j = 0
            n = len(ws)
            while i < n:
                cid = ws[i]
                i += 1
                c = <list> clauses[cid]
                if <int> c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if value[first] == 1:
                    ws[j] = cid
                    j += 1
                    continue
                found = False
                nc = len(c)
                for k in range(2, nc):
                    q = c[k]
                    if value[q] != -1:
                        c[1] = q
                        c[k] = false_lit
                        (<list> watches[q]).append(cid)
                        found = True
                        break
                if found:
                    continue
                ws[j] = cid
                j += 1
                if value[first] == -1:
                    while i < n:
                        ws[j] = ws[i]
                        j += 1
                        i += 1
                    del ws[j:]
                    self.qhead = self.trail_size
                    return cid
                value[first] = 1
                value[first ^ 1] = -1
                v = first >> 1
                self.level[v] = dl
                self.reason[v] = cid
                self.trail[self.trail_size] = first
                self.trail_size += 1
            del ws[j:]
        return -1

    # -- conflict analysis -------------------------------------------------

    cdef void _bump(self, int v):
        cdef int u
        self.activity[v] += self.var_inc
        if self.activity[v] > 1e100:
            for u in range(1, self.nvars + 1):
                self.activity[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-self.activity[u], u) for u in range(1, self.nvars + 1) if self.value[2 * u] == 0]
            heapq.heapify(self.heap)

    cdef tuple _analyze(self, int confl):
        cdef signed char *seen = self.seen
        cdef int *level = self.level
        cdef int dl = self.n_lim
        cdef bint keep_root = self.proof
        cdef int path = 0, p = -1, idx = self.trail_size - 1, cid = confl
        cdef int k, q, v, start, best, bt
        cdef list c
        learnt = [0]
        chain = [confl] if keep_root else None
        touched = []
        while True:
            c = <list> self.clauses[cid]
            start = 0 if p == -1 else 1
            for k in range(start, len(c)):
                q = c[k]
                v = q >> 1
                if not seen[v] and (level[v] > 0 or keep_root):
                    seen[v] = 1
                    touched.append(v)
                    self._bump(v)
                    if level[v] >= dl:
                        path += 1
                    else:
                        learnt.append(q)
            while not seen[self.trail[idx] >> 1]:
                idx -= 1
            p = self.trail[idx]
            idx -= 1
            v = p >> 1
            seen[v] = 0
            path -= 1
            if path == 0:
                break
            cid = self.reason[v]
            if keep_root:
                chain.append((v, cid))
        learnt[0] = p ^ 1
        for v in touched:
            seen[v] = 0
        bt = 0
        if len(learnt) > 1:
            best = 1
            for k in range(2, len(learnt)):
                if level[<int> learnt[k] >> 1] > level[<int> learnt[best] >> 1]:
                    best = k
            learnt[1], learnt[best] = learnt[best], learnt[1]
            bt = level[<int> learnt[1] >> 1]
        self.var_inc /= self.var_decay
        return learnt, bt, chain

    cdef list _analyze_final(self, int lit):
        cdef list core = [lit]
        cdef int idx, q, v, r, u, k
        cdef list c
        if self.n_lim == 0:
            return core
        cdef signed char *seen = self.seen
        cdef int v0 = lit >> 1
        seen[v0] = 1
        touched = [v0]
        for idx in range(self.trail_size - 1, self.trail_lim[0] - 1, -1):
            q = self.trail[idx]
            v = q >> 1
            if not seen[v]:
                continue
            r = self.reason[v]
            if r == -1:
                core.append(q)
            else:
                c = <list> self.clauses[r]
                for k in range(1, len(c)):
                    u = (<int> c[k]) >> 1
                    if self.level[u] > 0 and not seen[u]:
                        seen[u] = 1
                        touched.append(u)
        for v in touched:
            seen[v] = 0
        return core

    cdef void _final_refutation(self, int confl):
        cdef signed char *seen = self.seen
        cdef int idx, v, r, q, u
        chain = [confl]
        touched = []
        for q in self.clauses[confl]:
            v = q >> 1
            if not seen[v]:
                seen[v] = 1
                touched.append(v)
        for idx in range(self.trail_size - 1, -1, -1):
            v = self.trail[idx] >> 1
            if not seen[v]:
                continue
            r = self.reason[v]
            chain.append((v, r))
            for q in self.clauses[r]:
                u = q >> 1
                if not seen[u]:
                    seen[u] = 1
                    touched.append(u)
        for v in touched:
            seen[v] = 0
        self.final_chain = chain

    cdef int _pick(self):
        cdef int v
        heap = self.heap
        while heap:
            v = heapq.heappop(heap)[1]
            if self.value[2 * v] == 0:
                return 2 * v + (0 if self.phase[v] else 1)
        return -1

    # -- search ----------------------------------------------------------------

    def solve(self, assumptions=(), conflict_budget=None):
        """Return ``(status, payload)``; see the pure-Python backend."""
        cdef int l, v, confl, bt, p, nxt, n_assume
        cdef long restart_idx = 0, restart_limit, local_conflicts = 0, budget_start
        cdef long budget = -1 if conflict_budget is None else conflict_budget
        if self.unsat:
            return False, []
        assume = []
        for l in assumptions:
            v = l if l > 0 else -l
            if v > self.nvars:
                self.ensure_vars(v)
            assume.append(2 * v + (l < 0))
        n_assume = len(assume)
        if n_assume > self.cap:
            self._grow(n_assume)  # decision levels are bounded by assumptions + variables
        self._backtrack(0)
        if len(self.heap) > 4 * self.nvars + 64:
            self.heap = [(-self.activity[v], v) for v in range(1, self.nvars + 1) if self.value[2 * v] == 0]
            heapq.heapify(self.heap)
        restart_limit = 100 * _luby(0)
        budget_start = self.conflicts
        while True:
            confl = self._propagate()
            if confl != -1:
                self.conflicts += 1
                local_conflicts += 1
                if self.n_lim == 0:
                    self.unsat = True
                    if self.proof:
                        self._final_refutation(confl)
                    return False, []
                learnt, bt, chain = self._analyze(confl)
                self._backtrack(bt)
                cid = len(self.clauses)
                self.clauses.append(learnt)
                self.num_learnt += 1
                if self.proof:
                    self.original.append(None)
                    self.chains[cid] = chain
                if len(learnt) >= 2:
                    self.watches[learnt[0]].append(cid)
                    self.watches[learnt[1]].append(cid)
                self._enqueue(learnt[0], cid)
                if budget >= 0 and self.conflicts - budget_start >= budget:
                    self._backtrack(0)
                    return None, None
                continue
            if local_conflicts >= restart_limit:
                restart_idx += 1
                restart_limit = 100 * _luby(restart_idx)
                local_conflicts = 0
                self._backtrack(0)
                continue
            nxt = -1
            while self.n_lim < n_assume:
                p = assume[self.n_lim]
                if self.value[p] == 1:
                    self.trail_lim[self.n_lim] = self.trail_size
                    self.n_lim += 1
                elif self.value[p] == -1:
                    core = self._analyze_final(p)
                    self._backtrack(0)
                    return False, [-(q >> 1) if q & 1 else q >> 1 for q in core]
                else:
                    nxt = p
                    break
            if nxt == -1:
                nxt = self._pick()
                if nxt == -1:
                    model = [False] * (self.nvars + 1)
                    for v in range(1, self.nvars + 1):
                        model[v] = self.value[2 * v] == 1
                    self._backtrack(0)
                    return True, model
                self.decisions += 1
            self.trail_lim[self.n_lim] = self.trail_size
            self.n_lim += 1
            self._enqueue(nxt, -1)
