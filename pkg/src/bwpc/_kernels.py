"""Compiled inner loops for the Monte Carlo simulator.

Pure arithmetic on preallocated arrays; all random draws happen outside so
results are bit-reproducible for any thread or worker count.

Both kernels require the reader points sorted by start time: the clipped
overlap starts max(t_z, t_k) and ends min(t_z + T, t_k + T1) are then
nondecreasing within each tag, so the piecewise walk is a two-pointer
merge instead of a sort.
"""

from __future__ import annotations

import math

from numba import njit


@njit(cache=True)
def fill_harvest_pairs(
    tagx, tagy, tagt, own,
    posx, posy, post,
    T, T1, R2, r_o,
    cap, tag_off, s_out, e_out, dist_out,
):
    """Enumerate (tag, reader) pairs that contribute harvested energy.

    A reader z feeds tag k when their slots overlap the tag's harvest
    phase [tagt[k], tagt[k]+T1] and the distance is within sqrt(R2).
    own[k] is the index of the tag's dedicated reader (excluded; it is
    accounted for by the deterministic beamformed term), or -1.

    Pairs are written tag-major in reader-time order, which fixes the
    order of the fading draws made by the caller.  Returns the pair
    count, or -1 if `cap` would be exceeded (caller retries bigger).
    """
    K = tagx.size
    N = posx.size
    j = 0
    for k in range(K):
        tag_off[k] = j
        lo = tagt[k]
        hi = lo + T1
        # readers with any slot overlap lie in post in [lo - T, hi)
        a = 0
        b = N
        target = lo - T
        while a < b:
            mid = (a + b) // 2
            if post[mid] < target:
                a = mid + 1
            else:
                b = mid
        z0 = a
        for z in range(z0, N):
            zs = post[z]
            if zs >= hi:
                break
            if z == own[k]:
                continue
            s = lo if lo > zs else zs
            ze = zs + T
            e = hi if hi < ze else ze
            if s >= e:
                continue
            dx = tagx[k] - posx[z]
            dy = tagy[k] - posy[z]
            d2 = dx * dx + dy * dy
            if d2 <= R2:
                if j >= cap:
                    return -1
                s_out[j] = s
                e_out[j] = e
                d = math.sqrt(d2)
                dist_out[j] = d if d > r_o else r_o
                j += 1
    tag_off[K] = j
    return j


@njit(cache=True)
def batch_tag_energies(
    tag_off, s_arr, e_arr, amp_re, amp_im,
    c0, tagt, T1, eta, out,
):
    """Exact harvested energy per tag from its piecewise-constant field.

    The complex incident amplitude is c0 (dedicated reader, phase factored
    out) plus the sum of active pair amplitudes; between consecutive slot
    edges it is constant, so the energy integral is a finite sum of
    |amplitude|^2 * piece-length terms.  s_arr and e_arr are each
    nondecreasing within a tag's slice, and an add is applied before a
    remove at equal times (the piece between them has zero length).
    """
    K = tagt.size
    for k in range(K):
        p0 = tag_off[k]
        p1 = tag_off[k + 1]
        if p0 == p1:
            out[k] = eta * c0 * c0 * T1
            continue
        acc = 0.0
        ure = 0.0
        uim = 0.0
        prev = tagt[k]
        i = p0
        j = p0
        while j < p1:
            if i < p1 and s_arr[i] <= e_arr[j]:
                t = s_arr[i]
                yre = c0 + ure
                acc += (yre * yre + uim * uim) * (t - prev)
                ure += amp_re[i]
                uim += amp_im[i]
                i += 1
            else:
                t = e_arr[j]
                yre = c0 + ure
                acc += (yre * yre + uim * uim) * (t - prev)
                ure -= amp_re[j]
                uim -= amp_im[j]
                j += 1
            prev = t
        acc += c0 * c0 * (tagt[k] + T1 - prev)
        out[k] = eta * acc
