"""Pure-Python placement engine: per-UAV committed timelines with exact
integer battery projection.

Battery levels are tracked in scaled units of 1/gamma battery-seconds, so
both consumption (gamma units per second airborne) and charging (alpha units
per second on the pad, capped at alpha*gamma) stay exact integers.

Idle time between two committed tasks is disposed of by one deterministic
rule, shared with the schedule emitter:

* if the gap fits a station round trip plus at least the minimum recharge
  fragment, and the battery can reach the station, the UAV flies to the
  nearest station, charges, and flies on;
* otherwise it waits on the ground when it is already at a station, and
  hovers (burning battery) when it is not.

Feasibility of a prospective placement is decided exactly: within one
insertion slot the battery constraints are piecewise linear in the start
time, so the solver enumerates the (at most four) disposition regimes and
solves integer linear bounds in each, instead of scanning candidate starts.

The compiled extension (``uavsched._speed``) mirrors this module function
for function; ``uavsched.engine`` picks one at import time.
"""

from __future__ import annotations

from .mapgraph import INF

#: battery threshold meaning "suffix cannot be made feasible at any level"
def _impossible(cap: int) -> int:
    return cap + 1


def _ceildiv(p: int, q: int) -> int:
    # q > 0
    return -((-p) // q)


class PyEngine:
    def __init__(self, route, st_time, st_idx, init_pos, alpha: int, gamma: int,
                 min_frag: int):
        self.route = [list(map(int, row)) for row in route]
        self.st_time = list(map(int, st_time))
        self.st_idx = list(map(int, st_idx))
        self.gamma = int(gamma)
        self.alpha = int(alpha)
        self.min_frag = int(min_frag)
        self.cap = self.alpha * self.gamma
        self.res = [max(t * self.gamma, 1) if t < INF else INF for t in self.st_time]
        self.init_pos = list(map(int, init_pos))
        n = len(self.init_pos)
        self.a = [[] for _ in range(n)]   # committed start times
        self.z = [[] for _ in range(n)]   # committed end times
        self.s = [[] for _ in range(n)]   # start position index
        self.e = [[] for _ in range(n)]   # end position index
        self.tid = [[] for _ in range(n)]
        self.endlev = [[] for _ in range(n)]  # level after each committed task
        self.thr = [[] for _ in range(n)]     # min level at task start for the suffix

    # -- committed-state caches ------------------------------------------------

    def count(self, k: int) -> int:
        return len(self.a[k])

    def entries(self, k: int) -> list[tuple[int, int, int]]:
        """Committed (start, end, task id) triples in time order."""
        return list(zip(self.a[k], self.z[k], self.tid[k]))

    def end_levels(self, k: int) -> list[int]:
        """Scaled battery level right after each committed task."""
        return list(self.endlev[k])

    def workload(self, k: int) -> int:
        """Occupied seconds on the UAV: executions plus direct connecting
        flights (the construction-time occupation fragments)."""
        total = 0
        prev = self.init_pos[k]
        for i in range(len(self.a[k])):
            total += (self.z[k][i] - self.a[k][i]) + self.route[prev][self.s[k][i]]
            prev = self.e[k][i]
        return total

    def _gap_exit(self, level: int, t0: int, p0: int, a_n: int, s_n: int):
        """Level at ``a_n`` after disposing the idle range [t0, a_n) per the
        shared rule, or None when a boundary check fails. ``level`` is the
        scaled battery at t0 (UAV just finished a task at p0, or grounded at
        its initial station)."""
        G, A, cap = self.gamma, self.alpha, self.cap
        gap = a_n - t0
        f = self.route[p0][s_n]
        if f >= INF or gap < f:
            return None
        c1 = self.st_time[p0]
        st = self.st_idx[p0]
        c2 = self.route[st][s_n] if st >= 0 else INF
        usable = gap - c1 - c2 if c2 < INF else -1
        if usable >= self.min_frag and level - c1 * G >= 1:
            out = min(cap, level - c1 * G + usable * A) - c2 * G
        elif c1 == 0:
            out = level - f * G  # grounded wait, then fly
        else:
            if level - (gap - f) * G < self.res[p0]:  # end-of-hover boundary
                return None
            out = level - gap * G
        return out if out >= 1 else None

    def _recompute(self, k: int) -> None:
        G = self.gamma
        a, z, s, e = self.a[k], self.z[k], self.s[k], self.e[k]
        n = len(a)
        endlev = [0] * n
        level, t0, p0 = self.cap, 0, self.init_pos[k]
        for i in range(n):
            lv = self._gap_exit(level, t0, p0, a[i], s[i])
            if lv is None or lv < self.res[s[i]]:
                raise AssertionError(f"committed timeline of UAV {k} became infeasible")
            lv -= (z[i] - a[i]) * G
            if lv < self.res[e[i]]:
                raise AssertionError(f"committed timeline of UAV {k} became infeasible")
            endlev[i] = lv
            level, t0, p0 = lv, z[i], e[i]
        self.endlev[k] = endlev
        thr = [0] * n
        for i in range(n - 1, -1, -1):
            w = z[i] - a[i]
            own = max(self.res[s[i]], w * G + self.res[e[i]])
            if i < n - 1:
                minz = self._invgap(z[i], e[i], a[i + 1], s[i + 1], thr[i + 1])
                own = max(own, w * G + minz)
            thr[i] = min(own, _impossible(self.cap))
        self.thr[k] = thr

    def _invgap(self, t0: int, p0: int, a_n: int, s_n: int, need: int) -> int:
        """Minimal level at t0 so the gap disposition passes and the level at
        a_n reaches ``need``. Returns cap+1 when impossible."""
        G, A, cap = self.gamma, self.alpha, self.cap
        bad = _impossible(cap)
        if need > cap:
            return bad
        gap = a_n - t0
        f = self.route[p0][s_n]
        if f >= INF or gap < f:
            return bad
        c1 = self.st_time[p0]
        st = self.st_idx[p0]
        c2 = self.route[st][s_n] if st >= 0 else INF
        usable = gap - c1 - c2 if c2 < INF else -1
        if usable >= self.min_frag:
            if cap - c2 * G < need:
                return bad
            z = max(c1 * G + 1, need + (c1 + c2) * G - usable * A)
            return z if z <= cap else bad
        if c1 == 0:
            z = need + f * G
            return z if z <= cap else bad
        z = max(need + gap * G, self.res[p0] + (gap - f) * G)
        return z if z <= cap else bad

    # -- placement -------------------------------------------------------------

    def insert(self, k: int, tid: int, start: int, w: int, s: int, e: int) -> int:
        a = self.a[k]
        i = 0
        while i < len(a) and a[i] < start:
            i += 1
        a.insert(i, start)
        self.z[k].insert(i, start + w)
        self.s[k].insert(i, s)
        self.e[k].insert(i, e)
        self.tid[k].insert(i, tid)
        self._recompute(k)
        return i

    def solve_latest(self, k, w, s, e, lo, hi, occ1, occ2):
        """Latest feasible integer start on UAV ``k`` for a task of duration
        ``w`` from position ``s`` to ``e``, within the trimmed window
        [lo, hi], with start times restricted to the interval unions ``occ1``
        (and ``occ2`` unless None). Returns -1 when no placement exists.

        Insertion slots are strictly ordered in time, so the scan returns at
        the first slot (from the right) admitting any start."""
        n = len(self.a[k])
        for i in range(n, -1, -1):
            cand = self._solve_slot(k, i, w, s, e, lo, hi, occ1, occ2, latest=True)
            if cand is not None:
                return cand
        return -1

    def solve_earliest(self, k, w, s, e, lo, hi, occ1, occ2):
        n = len(self.a[k])
        for i in range(n + 1):
            cand = self._solve_slot(k, i, w, s, e, lo, hi, occ1, occ2, latest=False)
            if cand is not None:
                return cand
        return -1

    def solve_slot_earliest(self, k, i, w, s, e, lo, hi, occ1, occ2):
        """Earliest feasible start inside one insertion slot (used by the
        left-of-a-scheduled-task search). Slot ``i`` inserts before committed
        entry ``i``; ``i == count(k)`` appends after the last one."""
        cand = self._solve_slot(k, i, w, s, e, lo, hi, occ1, occ2, latest=False)
        return -1 if cand is None else cand

    def _solve_slot(self, k, i, w, s, e, lo, hi, occ1, occ2, latest):
        G, A, cap = self.gamma, self.alpha, self.cap
        n = len(self.a[k])
        if i > 0:
            t0, p0, L0 = self.z[k][i - 1], self.e[k][i - 1], self.endlev[k][i - 1]
        else:
            t0, p0, L0 = 0, self.init_pos[k], cap
        f1 = self.route[p0][s]
        if f1 >= INF:
            return None
        l = max(lo, t0 + f1)
        if i < n:
            a_n, s_n, need = self.a[k][i], self.s[k][i], self.thr[k][i]
            f2 = self.route[e][s_n]
            if f2 >= INF:
                return None
            u = min(hi, a_n - f2) - w
        else:
            a_n = s_n = need = f2 = -1
            u = hi - w
        if l > u:
            return None

        c1 = self.st_time[p0]
        st1 = self.st_idx[p0]
        c2p = self.route[st1][s] if st1 >= 0 else INF
        # start of the pre-gap recharge regime, +inf when unavailable
        if c2p < INF and L0 - c1 * G >= 1:
            a_chg = t0 + c1 + c2p + self.min_frag
        else:
            a_chg = u + 1  # regime never reached
        if i < n:
            c1t = self.st_time[e]
            st2 = self.st_idx[e]
            c2t = self.route[st2][s_n] if st2 >= 0 else INF
            # end of the post-gap recharge regime, -inf when unavailable
            a_post = a_n - w - c1t - c2t - self.min_frag if c2t < INF else l - 1
        else:
            c1t = c2t = a_post = 0

        # regions: (pre recharge?, post recharge?) -> candidate a-interval
        regions = []
        if i < n:
            regions.append((True, False, max(l, a_chg, a_post + 1), u))
            regions.append((True, True, max(l, a_chg), min(u, a_post)))
            regions.append((False, False, max(l, a_post + 1), min(u, a_chg - 1)))
            regions.append((False, True, l, min(u, a_chg - 1, a_post)))
        else:
            regions.append((True, None, max(l, a_chg), u))
            regions.append((False, None, l, min(u, a_chg - 1)))

        best = None
        for pre_chg, post_chg, rlo, rhi in regions:
            if rlo > rhi:
                continue
            # S(a) = min(Scap, sS*a + iS): level at task start
            if pre_chg:
                sS = A
                iS = L0 - c1 * G - (t0 + c1 + c2p) * A - c2p * G
                scap = cap - c2p * G
                cons = []
            else:
                if c1 == 0:
                    sS, iS = 0, L0 - f1 * G
                else:
                    sS, iS = -G, L0 + t0 * G
                scap = None
                cons = []
                if c1 != 0:
                    # end-of-hover boundary at p0
                    cons.append((-G, L0 + (t0 + f1) * G - self.res[p0]))

            # every requirement "S + q*a + r >= 0" expands over the min()
            def add_s(q, r, cons=cons, sS=sS, iS=iS, scap=scap):
                cons.append((sS + q, iS + r))
                if scap is not None:
                    cons.append((q, scap + r))

            add_s(0, -self.res[s])                    # start boundary
            add_s(0, -w * G - self.res[e])            # end boundary / homing
            if i < n:
                if post_chg:
                    if cap - c2t * G < need:
                        continue
                    add_s(0, -w * G - c1t * G - 1)    # reach the station
                    # charge: Z - c1t*G + usable_post(a)*A >= need + c2t*G
                    add_s(-A, -w * G - c1t * G + (a_n - w - c1t - c2t) * A
                          - need - c2t * G)
                else:
                    if c1t == 0:
                        add_s(0, -w * G - f2 * G - need)
                    else:
                        # hover to the next task
                        add_s(G, -w * G - (a_n - w) * G - need)
                        # end-of-hover boundary at e
                        add_s(G, -w * G - (a_n - w - f2) * G - self.res[e])

            alo, ahi = rlo, rhi
            ok = True
            for q, r in cons:
                if q > 0:
                    alo = max(alo, _ceildiv(-r, q))
                elif q < 0:
                    ahi = min(ahi, r // (-q))
                elif r < 0:
                    ok = False
                    break
            if not ok or alo > ahi:
                continue
            cand = (_latest_in(alo, ahi, occ1, occ2) if latest
                    else _earliest_in(alo, ahi, occ1, occ2))
            if cand is None:
                continue
            if best is None or (cand > best if latest else cand < best):
                best = cand
        return best


def _latest_in(alo, ahi, u1, u2):
    if u2 is None:
        for flo, fhi in reversed(u1):
            if flo > ahi:
                continue
            if fhi < alo:
                return None
            top = min(fhi, ahi)
            if top >= max(flo, alo):
                return top
        return None
    i, j = len(u1) - 1, len(u2) - 1
    while i >= 0 and j >= 0:
        lo1, hi1 = u1[i]
        lo2, hi2 = u2[j]
        if lo1 > ahi:
            i -= 1
            continue
        if lo2 > ahi:
            j -= 1
            continue
        if hi1 < alo or hi2 < alo:
            return None
        lo = max(lo1, lo2, alo)
        hi = min(hi1, hi2, ahi)
        if lo <= hi:
            return hi
        if lo1 > hi2:
            i -= 1
        else:
            j -= 1
    return None


def _earliest_in(alo, ahi, u1, u2):
    if u2 is None:
        for flo, fhi in u1:
            if fhi < alo:
                continue
            if flo > ahi:
                return None
            bot = max(flo, alo)
            if bot <= min(fhi, ahi):
                return bot
        return None
    i, j = 0, 0
    while i < len(u1) and j < len(u2):
        lo1, hi1 = u1[i]
        lo2, hi2 = u2[j]
        if hi1 < alo:
            i += 1
            continue
        if hi2 < alo:
            j += 1
            continue
        if lo1 > ahi or lo2 > ahi:
            return None
        lo = max(lo1, lo2, alo)
        hi = min(hi1, hi2, ahi)
        if lo <= hi:
            return lo
        if hi1 < lo2:
            i += 1
        else:
            j += 1
    return None
