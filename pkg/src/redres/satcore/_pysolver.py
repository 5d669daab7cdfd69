"""Incremental CDCL engine, pure-Python backend.

Internal literal encoding: ``2*v`` for ``v`` and ``2*v+1`` for ``-v``.
Per-literal value array: 1 true, -1 false, 0 unassigned.
"""

import heapq
import random

BACKEND = "python"


def _luby(i):
    # i-th element (0-based) of the Luby sequence
    size, seq = 1, 0
    while size < i + 1:
        seq += 1
        size = 2 * size + 1
    while size - 1 != i:
        size = (size - 1) >> 1
        seq -= 1
        i = i % size
    return 1 << seq


class Solver:
    def __init__(self, seed=0, proof=False):
        self.nvars = 0
        self.value = [0, 0]
        self.level = [0]
        self.reason = [-1]
        self.phase = [False]
        self.activity = [0.0]
        self.seen = [0]
        self.watches = [[], []]
        self.clauses = []
        self.proof = proof
        self.original = [] if proof else None
        self.chains = {} if proof else None
        self.final_chain = None
        self.trail = []
        self.trail_lim = []
        self.qhead = 0
        self.heap = []
        self.var_inc = 1.0
        self.var_decay = 0.95
        self.unsat = False
        self.rng = random.Random(seed)
        self.conflicts = 0
        self.decisions = 0
        self.propagations = 0
        self.num_learnt = 0

    # -- variables and clauses -------------------------------------------

    def new_var(self):
        self.nvars += 1
        v = self.nvars
        self.value.append(0)
        self.value.append(0)
        self.level.append(0)
        self.reason.append(-1)
        self.phase.append(False)
        act = self.rng.random() * 1e-5
        self.activity.append(act)
        self.seen.append(0)
        self.watches.append([])
        self.watches.append([])
        heapq.heappush(self.heap, (-act, v))
        return v

    def ensure_vars(self, n):
        while self.nvars < n:
            self.new_var()

    def add_clause(self, lits):
        """Add a clause of DIMACS literals at decision level 0; returns its id."""
        if self.trail_lim:
            self._backtrack(0)
        ilits = []
        mark = set()
        taut = False
        for l in lits:
            if l == 0:
                raise ValueError("literal 0 is not allowed")
            v = l if l > 0 else -l
            if v > self.nvars:
                self.ensure_vars(v)
            il = 2 * v + (l < 0)
            if il in mark:
                continue
            if il ^ 1 in mark:
                taut = True
            mark.add(il)
            ilits.append(il)
        cid = len(self.clauses)
        self.clauses.append(ilits)
        if self.proof:
            self.original.append(frozenset(lits))
        if taut or self.unsat:
            return cid
        value = self.value
        if any(value[il] == 1 for il in ilits):
            return cid
        live = [il for il in ilits if value[il] == 0]
        if not live:
            self.unsat = True
            if self.proof:
                self._final_refutation(cid)
            return cid
        dead = [il for il in ilits if value[il] != 0]
        ilits[:] = live + dead
        if len(ilits) >= 2:
            self.watches[ilits[0]].append(cid)
            self.watches[ilits[1]].append(cid)
        if len(live) == 1:
            self._enqueue(ilits[0], cid)
        return cid

    # -- assignment ----------------------------------------------------------

    def _enqueue(self, lit, cid):
        value = self.value
        value[lit] = 1
        value[lit ^ 1] = -1
        v = lit >> 1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = cid
        self.trail.append(lit)

    def _backtrack(self, lvl):
        if len(self.trail_lim) <= lvl:
            return
        value = self.value
        phase = self.phase
        reason = self.reason
        activity = self.activity
        heap = self.heap
        trail = self.trail
        stop = self.trail_lim[lvl]
        for idx in range(len(trail) - 1, stop - 1, -1):
            lit = trail[idx]
            v = lit >> 1
            value[lit] = 0
            value[lit ^ 1] = 0
            phase[v] = not (lit & 1)
            reason[v] = -1
            heapq.heappush(heap, (-activity[v], v))
        del trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = len(trail)

    def _propagate(self):
        value = self.value
        watches = self.watches
        clauses = self.clauses
        trail = self.trail
        level = self.level
        reason = self.reason
        dl = len(self.trail_lim)
        while self.qhead < len(trail):
            p = trail[self.qhead]
            self.qhead += 1
            self.propagations += 1
            false_lit = p ^ 1
            ws = watches[false_lit]
            i = j = 0
            n = len(ws)
            while i < n:
                cid = ws[i]
                i += 1
                c = clauses[cid]
                if c[0] == false_lit:
                    c[0] = c[1]
                    c[1] = false_lit
                first = c[0]
                if value[first] == 1:
                    ws[j] = cid
                    j += 1
                    continue
                found = False
                for k in range(2, len(c)):
                    q = c[k]
                    if value[q] != -1:
                        c[1] = q
                        c[k] = false_lit
                        watches[q].append(cid)
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
                    self.qhead = len(trail)
                    return cid
                value[first] = 1
                value[first ^ 1] = -1
                v = first >> 1
                level[v] = dl
                reason[v] = cid
                trail.append(first)
            del ws[j:]
        return -1

    # -- conflict analysis -------------------------------------------------

    def _bump(self, v):
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for u in range(1, self.nvars + 1):
                act[u] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[u], u) for u in range(1, self.nvars + 1) if self.value[2 * u] == 0]
            heapq.heapify(self.heap)

    def _analyze(self, confl):
        seen = self.seen
        level = self.level
        trail = self.trail
        reason = self.reason
        clauses = self.clauses
        dl = len(self.trail_lim)
        keep_root = self.proof
        learnt = [0]
        chain = [confl] if keep_root else None
        path = 0
        p = -1
        idx = len(trail) - 1
        cid = confl
        touched = []
        while True:
            c = clauses[cid]
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
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            v = p >> 1
            seen[v] = 0
            path -= 1
            if path == 0:
                break
            cid = reason[v]
            if keep_root:
                chain.append((v, cid))
        learnt[0] = p ^ 1
        for v in touched:
            seen[v] = 0
        bt = 0
        if len(learnt) > 1:
            best = 1
            for k in range(2, len(learnt)):
                if level[learnt[k] >> 1] > level[learnt[best] >> 1]:
                    best = k
            learnt[1], learnt[best] = learnt[best], learnt[1]
            bt = level[learnt[1] >> 1]
        self.var_inc /= self.var_decay
        return learnt, bt, chain

    def _analyze_final(self, lit):
        """Assumptions responsible for assumption ``lit`` being false (``lit`` included)."""
        core = [lit]
        if not self.trail_lim:
            return core
        seen = self.seen
        v0 = lit >> 1
        seen[v0] = 1
        touched = [v0]
        trail = self.trail
        for idx in range(len(trail) - 1, self.trail_lim[0] - 1, -1):
            q = trail[idx]
            v = q >> 1
            if not seen[v]:
                continue
            r = self.reason[v]
            if r == -1:
                core.append(q)
            else:
                for x in self.clauses[r][1:]:
                    u = x >> 1
                    if self.level[u] > 0 and not seen[u]:
                        seen[u] = 1
                        touched.append(u)
        for v in touched:
            seen[v] = 0
        return core

    def _final_refutation(self, confl):
        seen = self.seen
        chain = [confl]
        touched = []
        for q in self.clauses[confl]:
            v = q >> 1
            if not seen[v]:
                seen[v] = 1
                touched.append(v)
        for idx in range(len(self.trail) - 1, -1, -1):
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

    def _pick(self):
        heap = self.heap
        value = self.value
        while heap:
            _, v = heapq.heappop(heap)
            if value[2 * v] == 0:
                return 2 * v + (0 if self.phase[v] else 1)
        return -1

    # -- search ----------------------------------------------------------------

    def solve(self, assumptions=(), conflict_budget=None):
        """Return ``(status, payload)``.

        status True: payload is the model as a list of bools indexed by var.
        status False: payload is the failed-assumption core (DIMACS literals).
        status None: budget exhausted.
        """
        if self.unsat:
            return False, []
        assume = []
        for l in assumptions:
            v = l if l > 0 else -l
            if v > self.nvars:
                self.ensure_vars(v)
            assume.append(2 * v + (l < 0))
        self._backtrack(0)
        if len(self.heap) > 4 * self.nvars + 64:
            act = self.activity
            self.heap = [(-act[u], u) for u in range(1, self.nvars + 1) if self.value[2 * u] == 0]
            heapq.heapify(self.heap)
        value = self.value
        restart_idx = 0
        restart_limit = 100 * _luby(0)
        local_conflicts = 0
        budget_start = self.conflicts
        while True:
            confl = self._propagate()
            if confl != -1:
                self.conflicts += 1
                local_conflicts += 1
                if not self.trail_lim:
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
                if conflict_budget is not None and self.conflicts - budget_start >= conflict_budget:
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
            while len(self.trail_lim) < len(assume):
                p = assume[len(self.trail_lim)]
                if value[p] == 1:
                    self.trail_lim.append(len(self.trail))
                elif value[p] == -1:
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
                        model[v] = value[2 * v] == 1
                    self._backtrack(0)
                    return True, model
                self.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(nxt, -1)
