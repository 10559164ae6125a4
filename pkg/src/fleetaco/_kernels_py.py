"""Pure-Python fallback kernels, bitwise-identical to the compiled ones.

Every arithmetic step, special case and random draw mirrors _kernels_c exactly:
scalar math.sqrt/math.pow stand in for their libm counterparts and all discrete
draws are floor(u * n) over a single double. Vectorized numpy calls are avoided
on purpose; numpy's pow is not bitwise-equal to libm's.
"""

import math

import numpy as np


def _weight_power(w, alpha):
    if alpha == 1.0:
        return w
    if alpha == 2.0:
        return w * w
    if alpha == 3.0:
        return w * w * w
    return math.pow(w, alpha)


def construct_full(weights, vehicles, bit_generator, order_out, cum_buf, cand_buf):
    """Build a full tour: uniform vehicle start, then roulette over weights[cur, cand]."""
    rand = np.random.Generator(bit_generator).random
    n = weights.shape[0]
    n_veh = vehicles.shape[0]
    u = rand()
    k = int(u * n_veh)
    if k >= n_veh:
        k = n_veh - 1
    start = int(vehicles[k])
    order_out[0] = start
    cand = [c for c in range(n) if c != start]
    cum = cum_buf
    cur = start
    for t in range(1, n):
        total = 0.0
        row = weights[cur]
        n_cand = len(cand)
        for idx in range(n_cand):
            total += row[cand[idx]]
            cum[idx] = total
        u = rand()
        if total > 0.0:
            r = u * total
            lo = 0
            hi = n_cand
            while lo < hi:
                mid = (lo + hi) >> 1
                if cum[mid] > r:
                    hi = mid
                else:
                    lo = mid + 1
            idx = lo
            if idx >= n_cand:
                idx = n_cand - 1
        else:
            idx = int(u * n_cand)
            if idx >= n_cand:
                idx = n_cand - 1
        cur = cand[idx]
        order_out[t] = cur
        cand[idx] = cand[n_cand - 1]
        cand.pop()
    return n


def _partial_core(base_order, preserved_mask, succ, ratios, tau0, alpha,
                  eta_beta, is_vehicle, rand, order_out,
                  pool, pool_pos, contrib, touched, cum_buf, route_starts):
    n = base_order.shape[0]
    n_pop = ratios.shape[0]
    n_pool = 0
    n_sel = 0
    n_veh = 0
    n_seam = 0
    idx = 0
    for v in range(n):
        pool_pos[v] = -1
        contrib[v] = 0.0
    for p in range(n):
        if preserved_mask[p]:
            order_out[p] = base_order[p]
        else:
            v = base_order[p]
            pool[n_pool] = v
            pool_pos[v] = n_pool
            n_pool += 1
            if is_vehicle[v]:
                n_veh += 1
            if p == 0 or preserved_mask[p - 1]:
                n_seam += 1
    base_pow = _weight_power(tau0, alpha)
    for p in range(n):
        if preserved_mask[p]:
            continue
        seam = p == 0 or (route_starts and preserved_mask[p - 1])
        if seam:
            # route starts carry no travel context; pick its vehicle uniformly
            nveh = 0
            for i in range(n_pool):
                if is_vehicle[pool[i]]:
                    nveh += 1
            u = rand()
            kth = int(u * nveh)
            if kth >= nveh:
                kth = nveh - 1
            for idx in range(n_pool):
                if is_vehicle[pool[idx]]:
                    if kth == 0:
                        break
                    kth -= 1
        else:
            # vehicles still owed to later route starts are withheld here
            reserve = route_starts and n_veh <= n_seam
            cur = int(order_out[p - 1])
            n_touch = 0
            for q in range(n_pop):
                j = succ[q, cur]
                if j >= 0 and pool_pos[j] >= 0:
                    if contrib[j] == 0.0:
                        touched[n_touch] = j
                        n_touch += 1
                    contrib[j] += ratios[q]
            total = 0.0
            row = eta_beta[cur]
            for i in range(n_pool):
                c = pool[i]
                if reserve and is_vehicle[c]:
                    cum_buf[i] = total
                    continue
                cj = contrib[c]
                if cj == 0.0:
                    w = base_pow
                else:
                    w = _weight_power(tau0 + cj, alpha)
                total += w * row[c]
                cum_buf[i] = total
            for i in range(n_touch):
                contrib[touched[i]] = 0.0
            u = rand()
            if total > 0.0:
                r = u * total
                lo = 0
                hi = n_pool
                while lo < hi:
                    mid = (lo + hi) >> 1
                    if cum_buf[mid] > r:
                        hi = mid
                    else:
                        lo = mid + 1
                idx = lo
                if idx >= n_pool:
                    idx = n_pool - 1
            else:
                idx = int(u * n_pool)
                if idx >= n_pool:
                    idx = n_pool - 1
                if reserve:
                    while is_vehicle[pool[idx]]:
                        idx += 1
                        if idx >= n_pool:
                            idx = 0
        v = int(pool[idx])
        order_out[p] = v
        n_sel += 1
        n_pool -= 1
        pool[idx] = pool[n_pool]
        pool_pos[pool[idx]] = idx
        pool_pos[v] = -1
        if is_vehicle[v]:
            n_veh -= 1
        if seam:
            n_seam -= 1
    return n_sel


def construct_partial(base_order, preserved_mask, succ, ratios, tau0, alpha,
                      eta_beta, is_vehicle, bit_generator, order_out,
                      pool, pool_pos, contrib, touched, cum_buf,
                      route_starts=0):
    """Rebuild the unpreserved positions of base_order left to right."""
    rand = np.random.Generator(bit_generator).random
    return _partial_core(base_order, preserved_mask, succ, ratios, tau0, alpha,
                         eta_beta, is_vehicle, rand, order_out, pool, pool_pos,
                         contrib, touched, cum_buf, route_starts)


def construct_blocks(base_order, starts, ends, perm, budget, mask_buf,
                     succ, ratios, tau0, alpha, eta_beta, is_vehicle,
                     bit_generator, order_out,
                     pool, pool_pos, contrib, touched, cum_buf):
    """Free whole route blocks in permuted order within the budget, then rebuild.

    Freed jobs can only join freed vehicles' routes: construction treats every
    freed position after a preserved one as a route start.
    """
    rand = np.random.Generator(bit_generator).random
    n_blocks = starts.shape[0]
    freed = 0
    for p in range(mask_buf.shape[0]):
        mask_buf[p] = 1
    for k in range(n_blocks):
        lo = starts[perm[k]]
        hi = ends[perm[k]]
        size = hi - lo
        if freed + size > budget:
            continue
        for p in range(lo, hi):
            mask_buf[p] = 0
        freed += size
    return _partial_core(base_order, mask_buf, succ, ratios, tau0, alpha,
                         eta_beta, is_vehicle, rand, order_out, pool, pool_pos,
                         contrib, touched, cum_buf, 1)


def evaluate_order(order, xs, ys, dur, wopen, wclose, is_vehicle, speed_kph,
                   day_start, day_end, serviced_out):
    """Simulate the schedule; returns (serviced minutes, traversal minutes)."""
    n = order.shape[0]
    s = 0.0
    L = 0.0
    cx = cy = depot_x = depot_y = 0.0
    tnow = 0.0
    open_route = False
    sqrt = math.sqrt
    for t in range(n):
        v = int(order[t])
        if is_vehicle[v]:
            if open_route:
                dx = cx - depot_x
                dy = cy - depot_y
                L += sqrt(dx * dx + dy * dy) / speed_kph * 60.0
            depot_x = float(xs[v])
            depot_y = float(ys[v])
            cx = depot_x
            cy = depot_y
            tnow = day_start
            open_route = True
            serviced_out[v] = 0
        else:
            x = float(xs[v])
            y = float(ys[v])
            dx = x - cx
            dy = y - cy
            leg = sqrt(dx * dx + dy * dy) / speed_kph * 60.0
            arrive = tnow + leg
            wo = wopen[v]
            st = arrive if arrive > wo else wo
            fin = st + dur[v]
            dx = x - depot_x
            dy = y - depot_y
            back = sqrt(dx * dx + dy * dy) / speed_kph * 60.0
            if fin <= wclose[v] and fin <= day_end and fin + back <= day_end:
                L += leg
                tnow = fin
                cx = x
                cy = y
                s += dur[v]
                serviced_out[v] = 1
            else:
                serviced_out[v] = 0
    if open_route:
        dx = cx - depot_x
        dy = cy - depot_y
        L += sqrt(dx * dx + dy * dy) / speed_kph * 60.0
    return float(s), float(L)
