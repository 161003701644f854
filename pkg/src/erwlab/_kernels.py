"""Compiled kernels behind the simulators.

Hot loops live here so everything else stays plain Python. Every kernel
takes a numpy Generator first and draws from it strictly sequentially;
callers own stream derivation and replica scheduling. Walk positions are
64-bit signed integers throughout. Time accumulators use Neumaier
compensation: at horizon 1e6 the exit-time increments are O(1/n) against a
total of O(log n), and naive summation would eat the concentration signal.
"""

import math

import numpy as np
from numba import njit

SQRT2 = math.sqrt(2.0)
INV_SQRT_2PI = 1.0 / math.sqrt(2.0 * math.pi)
PI = math.pi
PI2_HALF = 0.5 * PI * PI
# crossover between the Gaussian-images and sine-series forms of the exit law
T_SPLIT = 0.35


# ---------------------------------------------------------------------------
# walk kernels (urn form of the step law; drift = p - 1/2)

@njit(cache=True)
def walk_spans(gen, drift, q, checkpoints):
    """One replica across increasing checkpoints.

    Returns an int64 array of shape (len(checkpoints), 4) holding
    (position, zero count, last zero, first return) at each checkpoint;
    first return is -1 until observed.
    """
    ncp = len(checkpoints)
    out = np.zeros((ncp, 4), dtype=np.int64)
    s = 0
    zeros = 0
    last = 0
    first = -1
    n0 = 0
    for ci in range(ncp):
        n1 = checkpoints[ci]
        for k in range(n0 + 1, n1 + 1):
            u = gen.random()
            if k == 1:
                up = u < q
            else:
                up = u < 0.5 + drift * s / (k - 1)
            if up:
                s += 1
            else:
                s -= 1
            if s == 0:
                zeros += 1
                last = k
                if first < 0:
                    first = k
        out[ci, 0] = s
        out[ci, 1] = zeros
        out[ci, 2] = last
        out[ci, 3] = first
        n0 = n1
    return out


@njit(cache=True)
def walk_spans_batch(gen, drift, q, checkpoints, reps):
    """walk_spans repeated on a single stream; rows are replicas."""
    ncp = len(checkpoints)
    out = np.zeros((reps, ncp, 4), dtype=np.int64)
    for r in range(reps):
        s = 0
        zeros = 0
        last = 0
        first = -1
        n0 = 0
        for ci in range(ncp):
            n1 = checkpoints[ci]
            for k in range(n0 + 1, n1 + 1):
                u = gen.random()
                if k == 1:
                    up = u < q
                else:
                    up = u < 0.5 + drift * s / (k - 1)
                if up:
                    s += 1
                else:
                    s -= 1
                if s == 0:
                    zeros += 1
                    last = k
                    if first < 0:
                        first = k
            out[r, ci, 0] = s
            out[r, ci, 1] = zeros
            out[r, ci, 2] = last
            out[r, ci, 3] = first
            n0 = n1
    return out


@njit(cache=True)
def walk_first_return(gen, drift, q, horizon):
    """First return index, or -1 if censored at the horizon. Early exit."""
    s = 0
    for k in range(1, horizon + 1):
        u = gen.random()
        if k == 1:
            up = u < q
        else:
            up = u < 0.5 + drift * s / (k - 1)
        if up:
            s += 1
        else:
            s -= 1
        if s == 0:
            return k
    return -1


@njit(cache=True)
def walk_path_ids_urn(gen, drift, q, n, reps):
    """Path ids (step k -> bit k-1) for replicas driven by the urn law."""
    out = np.empty(reps, dtype=np.int64)
    for r in range(reps):
        s = 0
        pid = 0
        for k in range(1, n + 1):
            u = gen.random()
            if k == 1:
                up = u < q
            else:
                up = u < 0.5 + drift * s / (k - 1)
            if up:
                s += 1
                pid |= 1 << (k - 1)
            else:
                s -= 1
        out[r] = pid
    return out


@njit(cache=True)
def walk_path_ids_memory(gen, p, q, n, reps):
    """Path ids for replicas driven by uniform replay of the step history."""
    out = np.empty(reps, dtype=np.int64)
    hist = np.empty(n, dtype=np.int8)
    for r in range(reps):
        pid = 0
        for k in range(1, n + 1):
            if k == 1:
                up = gen.random() < q
            else:
                j = int(gen.random() * (k - 1))
                if j > k - 2:
                    j = k - 2
                follow = gen.random() < p
                up = (hist[j] > 0) == follow
            if up:
                hist[k - 1] = 1
                pid |= 1 << (k - 1)
            else:
                hist[k - 1] = -1
        out[r] = pid
    return out


@njit(cache=True)
def walk_trace(gen, drift, q, horizon, every):
    """Trajectory rows (n, s, zeros, last zero, first return) each `every` steps.

    The final step is always emitted. first return is -1 until observed.
    """
    n_rows = horizon // every
    if horizon % every != 0:
        n_rows += 1
    out = np.zeros((n_rows, 5), dtype=np.int64)
    s = 0
    zeros = 0
    last = 0
    first = -1
    row = 0
    for k in range(1, horizon + 1):
        u = gen.random()
        if k == 1:
            up = u < q
        else:
            up = u < 0.5 + drift * s / (k - 1)
        if up:
            s += 1
        else:
            s -= 1
        if s == 0:
            zeros += 1
            last = k
            if first < 0:
                first = k
        if k % every == 0 or k == horizon:
            out[row, 0] = k
            out[row, 1] = s
            out[row, 2] = zeros
            out[row, 3] = last
            out[row, 4] = first
            row += 1
    return out


# ---------------------------------------------------------------------------
# Brownian exit from (-x, x): exact series sampler

@njit(cache=True, inline="always")
def _exit_sub_cdf_pdf(t, w):
    """(P(tau <= t, exit at 1), density) for unit-interval exit from w.

    Brownian motion on (0, 1) started at w in (0, 1), absorbed at both ends;
    sub-distribution of the absorption time at 1. Gaussian-images series for
    small t, sine series for large t; both truncated at a 1e-17 envelope,
    far below the 1e-12 accuracy the inversion targets.
    """
    if t <= 0.0:
        return 0.0, 0.0
    if t < T_SPLIT:
        st = math.sqrt(t)
        inv_t = 1.0 / t
        cdf = 0.0
        pdf = 0.0
        j = 0
        while j < 64:
            c1 = 2.0 * j + 1.0 - w
            c2 = 2.0 * j + 1.0 + w
            q1 = 0.5 * math.erfc(c1 / (st * SQRT2))
            q2 = 0.5 * math.erfc(c2 / (st * SQRT2))
            cdf += q1 - q2
            pdf += c1 * math.exp(-0.5 * c1 * c1 * inv_t) - c2 * math.exp(-0.5 * c2 * c2 * inv_t)
            if q1 < 1e-17 and j > 0:
                break
            j += 1
        return 2.0 * cdf, pdf * INV_SQRT_2PI / (t * st)
    cdf = 0.0
    pdf = 0.0
    k = 1
    sgn = 1.0
    while k < 400:
        e = math.exp(-PI2_HALF * k * k * t)
        if e * k < 1e-17 and k > 2:
            break
        sk = math.sin(k * PI * w) * sgn
        cdf += sk * e / k
        pdf += sk * e * k
        sgn = -sgn
        k += 1
    return w - (2.0 / PI) * cdf, PI * pdf


@njit(cache=True)
def invert_conditional_time(u, w):
    """Quantile t with P(tau <= t | exit at 1) = u, unit problem from w.

    Bracketed Newton seeded at the exact conditional mean (1 - w^2)/3;
    bisection backstop keeps every iterate inside the bracket.
    """
    target = u * w
    mean = (1.0 - w * w) / 3.0
    lo = 0.0
    hi = 2.0 * mean + 0.1
    c, d = _exit_sub_cdf_pdf(hi, w)
    while c < target:
        lo = hi
        hi *= 2.0
        if hi > 600.0:
            return hi
        c, d = _exit_sub_cdf_pdf(hi, w)
    t = mean if lo < mean < hi else 0.5 * (lo + hi)
    for _ in range(100):
        c, d = _exit_sub_cdf_pdf(t, w)
        f = c - target
        if f > 0.0:
            hi = t
        else:
            lo = t
        if abs(f) < 1e-12 * w:
            break
        if d > 0.0:
            t_new = t - f / d
            if not lo < t_new < hi:
                t_new = 0.5 * (lo + hi)
        else:
            t_new = 0.5 * (lo + hi)
        if abs(t_new - t) < 1e-13 * (1.0 + t):
            t = t_new
            break
        t = t_new
    return t


@njit(cache=True)
def sample_exit_series(gen, x, y):
    """(side, time) of the first exit from (-x, x) started at y. Exact.

    Side by its closed-form probability (x+y)/(2x), then the time from the
    side-conditional law by series inversion; Brownian scaling maps the
    unit problem to half-width x.
    """
    w = 0.5 * (1.0 + y / x)
    u1 = gen.random()
    u2 = gen.random()
    if u1 < w:
        side = 1
        weff = w
    else:
        side = -1
        weff = 1.0 - w
    return side, 4.0 * x * x * invert_conditional_time(u2, weff)


@njit(cache=True)
def sample_exit_grid(gen, x, y, refine):
    """(side, time) by an Euler grid with bridge crossing corrections.

    Independent oracle for the series sampler. Step dt = (x - |y|)^2/refine;
    each step applies the Brownian-bridge probability of an unseen boundary
    crossing; a detected crossing is booked at the midpoint t + dt/2.
    """
    dt = (x - abs(y)) * (x - abs(y)) / refine
    sd = math.sqrt(dt)
    pos = y
    t = 0.0
    while True:
        nxt = pos + sd * gen.standard_normal()
        if nxt >= x:
            return 1, t + 0.5 * dt
        if nxt <= -x:
            return -1, t + 0.5 * dt
        p_up = math.exp(-2.0 * (x - pos) * (x - nxt) / dt)
        p_dn = math.exp(-2.0 * (pos + x) * (nxt + x) / dt)
        u = gen.random()
        if u < p_up:
            return 1, t + 0.5 * dt
        if u < p_up + p_dn:
            return -1, t + 0.5 * dt
        pos = nxt
        t += dt


@njit(cache=True)
def draw_exits_series(gen, x, y, count):
    sides = np.empty(count, dtype=np.int64)
    times = np.empty(count, dtype=np.float64)
    for i in range(count):
        side, t = sample_exit_series(gen, x, y)
        sides[i] = side
        times[i] = t
    return sides, times


@njit(cache=True)
def draw_exits_grid(gen, x, y, count, refine):
    sides = np.empty(count, dtype=np.int64)
    times = np.empty(count, dtype=np.float64)
    for i in range(count):
        side, t = sample_exit_grid(gen, x, y, refine)
        sides[i] = side
        times[i] = t
    return sides, times


# ---------------------------------------------------------------------------
# the embedded chain

@njit(cache=True)
def embed_chain_checkpoints(gen, a, a_sq_prefix, checkpoints):
    """Embedded chain with running diagnostics, sampled at checkpoints.

    Per checkpoint row: position, stopping time T, quadratic compensator V,
    compensated martingale N = T - A + V, running sup N^2, running
    sup |T - A|. Sups are prefix sups up to the checkpoint.
    """
    ncp = len(checkpoints)
    out = np.empty((ncp, 6), dtype=np.float64)
    s = 0
    t = 0.0
    comp = 0.0
    v = 0.0
    sup_n_sq = 0.0
    sup_ta = 0.0
    ci = 0
    n_steps = checkpoints[ncp - 1]
    for n in range(n_steps):
        x = a[n + 1]
        y = 0.0
        if n >= 1:
            y = x * s / (2.0 * n)
        w = 0.5 * (1.0 + y / x)
        u1 = gen.random()
        u2 = gen.random()
        if u1 < w:
            side = 1
            weff = w
        else:
            side = -1
            weff = 1.0 - w
        dt = 4.0 * x * x * invert_conditional_time(u2, weff)
        tn = t + dt
        if abs(t) >= dt:
            comp += (t - tn) + dt
        else:
            comp += (dt - tn) + t
        t = tn
        s += side
        m = x * s
        v += m * m / ((2.0 * (n + 1) + 1.0) ** 2)
        total = t + comp
        nn = total - a_sq_prefix[n + 1] + v
        if nn * nn > sup_n_sq:
            sup_n_sq = nn * nn
        d = abs(total - a_sq_prefix[n + 1])
        if d > sup_ta:
            sup_ta = d
        if n + 1 == checkpoints[ci]:
            out[ci, 0] = s
            out[ci, 1] = total
            out[ci, 2] = v
            out[ci, 3] = nn
            out[ci, 4] = sup_n_sq
            out[ci, 5] = sup_ta
            ci += 1
    return out


@njit(cache=True)
def embed_path_ids(gen, a, n, reps):
    """Recovered sign paths of the embedded chain, as path ids.

    The side draw alone determines the sign sequence; the time draw is
    consumed anyway so the stream position matches the full chain.
    """
    out = np.empty(reps, dtype=np.int64)
    for r in range(reps):
        s = 0
        pid = 0
        for k in range(n):
            x = a[k + 1]
            y = 0.0
            if k >= 1:
                y = x * s / (2.0 * k)
            w = 0.5 * (1.0 + y / x)
            u1 = gen.random()
            gen.random()
            if u1 < w:
                s += 1
                pid |= 1 << k
            else:
                s -= 1
        out[r] = pid
    return out


@njit(cache=True)
def embed_delta_bins(gen, a, n_steps, reps):
    """Exit-time increments binned by the state (n, s) they started from.

    Returns (sums, sums of squares, counts), each (n_steps, 2 n_steps + 1),
    column s + n_steps. Feeds the check that E[time | state] matches the
    closed form x^2 - y^2 of the per-step exit problem.
    """
    width = 2 * n_steps + 1
    sums = np.zeros((n_steps, width), dtype=np.float64)
    sumsq = np.zeros((n_steps, width), dtype=np.float64)
    counts = np.zeros((n_steps, width), dtype=np.int64)
    for r in range(reps):
        s = 0
        for n in range(n_steps):
            x = a[n + 1]
            y = 0.0
            if n >= 1:
                y = x * s / (2.0 * n)
            w = 0.5 * (1.0 + y / x)
            u1 = gen.random()
            u2 = gen.random()
            if u1 < w:
                side = 1
                weff = w
            else:
                side = -1
                weff = 1.0 - w
            dt = 4.0 * x * x * invert_conditional_time(u2, weff)
            col = s + n_steps
            sums[n, col] += dt
            sumsq[n, col] += dt * dt
            counts[n, col] += 1
            s += side
    return sums, sumsq, counts


# ---------------------------------------------------------------------------
# whole-chain discretization and excursion counting

@njit(cache=True)
def chain_grid(gen, a, n_steps, refine):
    """Embedded chain on a uniform grid with bridge-corrected exits.

    dt = a_{n_steps+1}^2 / refine, fine relative to the smallest barrier.
    The node at each detected exit is snapped to the exact barrier value
    a_{n+1} (s +- 1), so stopping times are grid nodes, walk zeros are exact
    node zeros, and interior nodes stay strictly inside the active interval.

    Returns (values, exit node indices, sign path, zero count).
    """
    dt = a[n_steps + 1] * a[n_steps + 1] / refine
    sd = math.sqrt(dt)
    cap = int(60.0 / dt) + 1000  # total time is ~log n + noise; 60 is way out
    vals = np.empty(cap, dtype=np.float64)
    exit_idx = np.empty(n_steps, dtype=np.int64)
    s_path = np.empty(n_steps, dtype=np.int64)
    vals[0] = 0.0
    i = 0
    s = 0
    zeros = 0
    for n in range(n_steps):
        x = a[n + 1]
        up_bar = x * (s + 1)
        dn_bar = x * (s - 1)
        pos = vals[i]
        while True:
            nxt = pos + sd * gen.standard_normal()
            i += 1
            if i >= cap:
                # out of preallocated room; callers treat short output as failure
                return vals[:i], exit_idx[:n], s_path[:n], zeros
            if nxt >= up_bar:
                vals[i] = up_bar
                s += 1
                break
            if nxt <= dn_bar:
                vals[i] = dn_bar
                s -= 1
                break
            p_up = math.exp(-2.0 * (up_bar - pos) * (up_bar - nxt) / dt)
            p_dn = math.exp(-2.0 * (pos - dn_bar) * (nxt - dn_bar) / dt)
            u = gen.random()
            if u < p_up:
                vals[i] = up_bar
                s += 1
                break
            if u < p_up + p_dn:
                vals[i] = dn_bar
                s -= 1
                break
            vals[i] = nxt
            pos = nxt
        exit_idx[n] = i
        s_path[n] = s
        if s == 0:
            zeros += 1
    return vals[: i + 1], exit_idx, s_path, zeros


@njit(cache=True)
def count_qualifying(vals, exit_idx, a, dt):
    """Excursions [l, r] of the grid path whose height reaches alpha(l).

    alpha(t) holds the value a_{j+1} between the j-th and (j+1)-th exits.
    Zeros are exact zero nodes or sign changes located by interpolation.
    Also counts zeros that fall in intervals whose walk state is nonzero,
    which the coupling forbids up to grid error.
    """
    n_nodes = len(vals)
    n_exits = len(exit_idx)
    count = 0
    bad_zero = 0
    j = 0  # completed exits
    alpha_l = a[1]
    height = 0.0
    prev = vals[0]
    s = 0
    for i in range(1, n_nodes):
        v = vals[i]
        av = abs(v)
        is_exit = j < n_exits and exit_idx[j] == i
        zero_here = v == 0.0
        crossed = (prev > 0.0 and v < 0.0) or (prev < 0.0 and v > 0.0)
        if crossed and not zero_here:
            if s != 0:
                bad_zero += 1
            if abs(prev) > height:
                height = abs(prev)
            if height >= alpha_l:
                count += 1
            height = av
            alpha_l = a[j + 1]
        elif zero_here:
            if s != 0 and not is_exit:
                bad_zero += 1
            if height >= alpha_l:
                count += 1
            height = 0.0
        if av > height:
            height = av
        if is_exit:
            x = a[j + 1]
            s = int(round(v / x))
            j += 1
        if zero_here:
            # the next excursion starts here, inside the post-exit interval
            alpha_l = a[j + 1] if j + 1 < len(a) else a[len(a) - 1]
        prev = v
    return count, bad_zero
