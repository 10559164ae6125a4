# cython: language_level=3
"""Compiled hot kernels: solution construction and schedule evaluation.

These mirror fleetaco._kernels_py exactly, draw for draw and operation for
operation, so both backends produce bitwise-identical results from the same
random stream. Random numbers come straight from a NumPy BitGenerator's C
interface (one next_double per decision).
"""

from cpython.pycapsule cimport PyCapsule_GetPointer, PyCapsule_IsValid
from numpy.random cimport bitgen_t
from libc.math cimport sqrt, pow

cdef const char *CAPSULE_NAME = "BitGenerator"


cdef inline bitgen_t *get_bitgen(object bit_generator) except NULL:
    capsule = bit_generator.capsule
    if not PyCapsule_IsValid(capsule, CAPSULE_NAME):
        raise ValueError("invalid BitGenerator capsule")
    return <bitgen_t *> PyCapsule_GetPointer(capsule, CAPSULE_NAME)


cdef inline double weight_power(double w, double alpha) noexcept nogil:
    # exact multiply chains for the common exponents keep both backends bitwise equal
    if alpha == 1.0:
        return w
    if alpha == 2.0:
        return w * w
    if alpha == 3.0:
        return w * w * w
    return pow(w, alpha)


def construct_full(double[:, ::1] weights, int[::1] vehicles, object bit_generator,
                   int[::1] order_out, double[::1] cum_buf, int[::1] cand_buf):
    """Build a full tour: uniform vehicle start, then roulette over weights[cur, cand].

    weights is the combined matrix tau^alpha * eta^beta. Returns the number of
    probabilistic decisions taken (always the vertex count).
    """
    cdef bitgen_t *rng = get_bitgen(bit_generator)
    cdef int n = weights.shape[0]
    cdef int n_veh = vehicles.shape[0]
    cdef int t, k, idx, lo, hi, mid, cur, c
    cdef double u, total, r
    cdef int n_cand
    u = rng.next_double(rng.state)
    k = <int>(u * n_veh)
    if k >= n_veh:
        k = n_veh - 1
    cdef int start = vehicles[k]
    order_out[0] = start
    n_cand = 0
    for c in range(n):
        if c != start:
            cand_buf[n_cand] = c
            n_cand += 1
    cur = start
    for t in range(1, n):
        total = 0.0
        for idx in range(n_cand):
            total += weights[cur, cand_buf[idx]]
            cum_buf[idx] = total
        u = rng.next_double(rng.state)
        if total > 0.0:
            # first index whose cumulative weight exceeds r
            r = u * total
            lo = 0
            hi = n_cand
            while lo < hi:
                mid = (lo + hi) >> 1
                if cum_buf[mid] > r:
                    hi = mid
                else:
                    lo = mid + 1
            idx = lo
            if idx >= n_cand:
                idx = n_cand - 1
        else:
            idx = <int>(u * n_cand)
            if idx >= n_cand:
                idx = n_cand - 1
        cur = cand_buf[idx]
        order_out[t] = cur
        n_cand -= 1
        cand_buf[idx] = cand_buf[n_cand]
    return n


cdef int _partial_core(int[::1] base_order, unsigned char[::1] preserved_mask,
                       int[:, ::1] succ, double[::1] ratios,
                       double tau0, double alpha, double[:, ::1] eta_beta,
                       unsigned char[::1] is_vehicle, bitgen_t *rng,
                       int[::1] order_out,
                       int[::1] pool, int[::1] pool_pos, double[::1] contrib,
                       int[::1] touched, double[::1] cum_buf,
                       int route_starts) except -1:
    cdef int n = base_order.shape[0]
    cdef int n_pop = ratios.shape[0]
    cdef int n_pool = 0, n_sel = 0, n_veh = 0, n_seam = 0
    cdef int p, v, q, j, idx, lo, hi, mid, cur, c, n_touch, nveh, kth
    cdef double u, total, r, w, base_pow
    cdef bint seam, reserve
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
    base_pow = weight_power(tau0, alpha)
    for p in range(n):
        if preserved_mask[p]:
            continue
        seam = p == 0 or (route_starts and preserved_mask[p - 1])
        if seam:
            # route starts carry no travel context; pick its vehicle uniformly
            nveh = 0
            for idx in range(n_pool):
                if is_vehicle[pool[idx]]:
                    nveh += 1
            u = rng.next_double(rng.state)
            kth = <int>(u * nveh)
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
            cur = order_out[p - 1]
            n_touch = 0
            for q in range(n_pop):
                j = succ[q, cur]
                if j >= 0 and pool_pos[j] >= 0:
                    if contrib[j] == 0.0:
                        touched[n_touch] = j
                        n_touch += 1
                    contrib[j] += ratios[q]
            total = 0.0
            for idx in range(n_pool):
                c = pool[idx]
                if reserve and is_vehicle[c]:
                    cum_buf[idx] = total
                    continue
                if contrib[c] == 0.0:
                    w = base_pow
                else:
                    w = weight_power(tau0 + contrib[c], alpha)
                total += w * eta_beta[cur, c]
                cum_buf[idx] = total
            for idx in range(n_touch):
                contrib[touched[idx]] = 0.0
            u = rng.next_double(rng.state)
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
                idx = <int>(u * n_pool)
                if idx >= n_pool:
                    idx = n_pool - 1
                if reserve:
                    while is_vehicle[pool[idx]]:
                        idx += 1
                        if idx >= n_pool:
                            idx = 0
        v = pool[idx]
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


def construct_partial(int[::1] base_order, unsigned char[::1] preserved_mask,
                      int[:, ::1] succ, double[::1] ratios,
                      double tau0, double alpha, double[:, ::1] eta_beta,
                      unsigned char[::1] is_vehicle, object bit_generator,
                      int[::1] order_out,
                      int[::1] pool, int[::1] pool_pos, double[::1] contrib,
                      int[::1] touched, double[::1] cum_buf,
                      int route_starts=0):
    """Rebuild the unpreserved positions of base_order left to right.

    Preserved positions keep their content. Free position 0 is filled with a
    uniform choice among free vehicle vertices; later free positions use the
    random proportional rule with pheromone reconstructed on demand from the
    population (succ[q, v] is the successor of v in member q, -1 past the end;
    ratios[q] is that member's quality ratio against the global best).
    With route_starts, every free position following a preserved one is also a
    route start: it takes a uniformly chosen free vehicle, and enough free
    vehicles are withheld from job positions to supply the remaining starts.
    Returns the number of probabilistic decisions taken.
    """
    cdef bitgen_t *rng = get_bitgen(bit_generator)
    return _partial_core(base_order, preserved_mask, succ, ratios, tau0, alpha,
                         eta_beta, is_vehicle, rng, order_out, pool, pool_pos,
                         contrib, touched, cum_buf, route_starts)


def construct_blocks(int[::1] base_order, int[::1] starts, int[::1] ends,
                     int[::1] perm, int budget, unsigned char[::1] mask_buf,
                     int[:, ::1] succ, double[::1] ratios,
                     double tau0, double alpha, double[:, ::1] eta_beta,
                     unsigned char[::1] is_vehicle, object bit_generator,
                     int[::1] order_out,
                     int[::1] pool, int[::1] pool_pos, double[::1] contrib,
                     int[::1] touched, double[::1] cum_buf):
    """Free whole route blocks in permuted order within the budget, then rebuild.

    starts/ends give each vehicle block's position span in base_order and perm
    the visiting order; blocks that no longer fit the remaining budget stay
    preserved and the walk continues with the next one. The computed mask is
    left in mask_buf. Construction then follows construct_partial with route
    starts enforced, so freed jobs can only join freed vehicles' routes.
    """
    cdef bitgen_t *rng = get_bitgen(bit_generator)
    cdef int n = base_order.shape[0]
    cdef int n_blocks = starts.shape[0]
    cdef int p, k, lo, hi, size
    cdef int freed = 0
    for p in range(n):
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
                         eta_beta, is_vehicle, rng, order_out, pool, pool_pos,
                         contrib, touched, cum_buf, 1)


def evaluate_order(int[::1] order, double[::1] xs, double[::1] ys,
                   double[::1] dur, double[::1] wopen, double[::1] wclose,
                   unsigned char[::1] is_vehicle, double speed_kph,
                   double day_start, double day_end,
                   unsigned char[::1] serviced_out):
    """Simulate the schedule; returns (serviced minutes, traversal minutes).

    serviced_out is filled per vertex (1 = serviced job). Skipped jobs incur
    no travel; every opened route ends with a return leg to its depot.
    """
    cdef int n = order.shape[0]
    cdef int t, v
    cdef double s = 0.0, L = 0.0
    cdef double cx = 0.0, cy = 0.0, depot_x = 0.0, depot_y = 0.0, tnow = 0.0
    cdef double dx, dy, leg, arrive, st, fin, back
    cdef bint open_route = False
    for t in range(n):
        v = order[t]
        if is_vehicle[v]:
            if open_route:
                dx = cx - depot_x
                dy = cy - depot_y
                L += sqrt(dx * dx + dy * dy) / speed_kph * 60.0
            depot_x = xs[v]
            depot_y = ys[v]
            cx = depot_x
            cy = depot_y
            tnow = day_start
            open_route = True
            serviced_out[v] = 0
        else:
            dx = xs[v] - cx
            dy = ys[v] - cy
            leg = sqrt(dx * dx + dy * dy) / speed_kph * 60.0
            arrive = tnow + leg
            st = arrive if arrive > wopen[v] else wopen[v]
            fin = st + dur[v]
            dx = xs[v] - depot_x
            dy = ys[v] - depot_y
            back = sqrt(dx * dx + dy * dy) / speed_kph * 60.0
            if fin <= wclose[v] and fin <= day_end and fin + back <= day_end:
                L += leg
                tnow = fin
                cx = xs[v]
                cy = ys[v]
                s += dur[v]
                serviced_out[v] = 1
            else:
                serviced_out[v] = 0
    if open_route:
        dx = cx - depot_x
        dy = cy - depot_y
        L += sqrt(dx * dx + dy * dy) / speed_kph * 60.0
    return s, L
