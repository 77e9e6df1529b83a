"""Shared test utilities: a deliberately naive timeline simulator used as the
ground truth for the placement engine's algebraic slot solver."""

from uavsched.mapgraph import INF


def sim_timeline(entries, init_pos, route, st_time, st_idx, alpha, gamma, min_frag):
    """Simulate a committed timeline ((a, z, s, e) in time order) under the
    shared idle-disposition rule. Returns the list of end levels, or None on
    any violated boundary check."""
    cap = alpha * gamma
    res = [max(t * gamma, 1) if t < INF else INF for t in st_time]
    level, t0, p0 = cap, 0, init_pos
    out = []
    for a, z, s, e in entries:
        f = route[p0][s]
        if f >= INF or a - t0 < f:
            return None
        gap = a - t0
        c1 = st_time[p0]
        c2 = route[st_idx[p0]][s] if st_idx[p0] >= 0 else INF
        usable = gap - c1 - c2 if c2 < INF else -1
        if usable >= min_frag and level - c1 * gamma >= 1:
            level = min(cap, level - c1 * gamma + usable * alpha) - c2 * gamma
        elif c1 == 0:
            level = level - f * gamma
        else:
            if level - (gap - f) * gamma < res[p0]:
                return None
            level = level - gap * gamma
        if level < res[s] or level < 1:
            return None
        level -= (z - a) * gamma
        if level < res[e] or level < 1:
            return None
        out.append(level)
        t0, p0 = z, e
    return out


def feasible_starts(entries, cand, lo, hi, init_pos, route, st_time, st_idx,
                    alpha, gamma, min_frag, unions=None):
    """Brute force: all integer starts in [lo, hi - w] where inserting the
    candidate (w, s, e) keeps the whole timeline feasible."""
    w, s, e = cand
    ok = []
    for a in range(lo, hi - w + 1):
        if unions is not None and not _in_unions(a, unions):
            continue
        merged = sorted(entries + [(a, a + w, s, e)])
        if sim_timeline(merged, init_pos, route, st_time, st_idx,
                        alpha, gamma, min_frag) is not None:
            ok.append(a)
    return ok


def _in_unions(a, unions):
    u1, u2 = unions
    if not any(lo <= a <= hi for lo, hi in u1):
        return False
    return u2 is None or any(lo <= a <= hi for lo, hi in u2)
