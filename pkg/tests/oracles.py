"""Independent reference computations used by the tests."""

import numpy as np


def grid_prox(sigma, w, p, step=1e-5):
    """Brute-force argmin of 1/2 (d - sigma)^2 + w d^p over a grid on [0, sigma]."""
    d = np.arange(0.0, sigma + step / 2, step)
    f = 0.5 * (d - sigma) ** 2 + w * d ** p
    i = int(np.argmin(f))
    return d[i], f[i]


def prox_objective(d, sigma, w, p):
    return 0.5 * (d - sigma) ** 2 + w * d ** p


def circular_convolve_loop(plane, kernel):
    """Direct periodic convolution with the kernel anchored at its center."""
    m, n = plane.shape
    kh, kw = kernel.shape
    ar, ac = kh // 2, kw // 2
    out = np.zeros_like(plane)
    for i in range(m):
        for j in range(n):
            acc = 0.0
            for a in range(kh):
                for b in range(kw):
                    acc += kernel[a, b] * plane[(i - (a - ar)) % m, (j - (b - ac)) % n]
            out[i, j] = acc
    return out


def circulant_matrix(kernel, m, n):
    """Dense (mn x mn) matrix of the periodic blur acting on row-major vectors."""
    A = np.zeros((m * n, m * n))
    for idx in range(m * n):
        e = np.zeros(m * n)
        e[idx] = 1.0
        A[:, idx] = circular_convolve_loop(e.reshape(m, n), kernel).ravel()
    return A


def ssim_textbook(x, y, data_range=255.0):
    """Window-by-window SSIM with an explicit 11x11 Gaussian, channel mean."""
    ax = np.arange(11) - 5.0
    g = np.exp(-ax ** 2 / (2 * 1.5 ** 2))
    win = np.outer(g, g)
    win /= win.sum()
    c1 = (0.01 * data_range) ** 2
    c2 = (0.03 * data_range) ** 2
    vals = []
    for ch in range(x.shape[2]):
        a, b = x[..., ch], y[..., ch]
        m, n = a.shape
        acc = []
        for i in range(m - 10):
            for j in range(n - 10):
                pa, pb = a[i:i + 11, j:j + 11], b[i:i + 11, j:j + 11]
                mx, my = np.sum(win * pa), np.sum(win * pb)
                vx = np.sum(win * (pa - mx) ** 2)
                vy = np.sum(win * (pb - my) ** 2)
                cxy = np.sum(win * (pa - mx) * (pb - my))
                acc.append((2 * mx * my + c1) * (2 * cxy + c2)
                           / ((mx ** 2 + my ** 2 + c1) * (vx + vy + c2)))
        vals.append(np.mean(acc))
    return float(np.mean(vals))


def match_bruteforce(planes, key, w, W, M):
    """Exhaustive window search: key first, then (distance, row, col) order."""
    _, m, n = planes.shape
    r, c = key
    half = W // 2
    ref = planes[:, r:r + w, c:c + w]
    cands = []
    for i in range(max(0, r - half), min(m - w, r - half + W - 1) + 1):
        for j in range(max(0, c - half), min(n - w, c - half + W - 1) + 1):
            if (i, j) == (r, c):
                continue
            d = float(np.sum((planes[:, i:i + w, j:j + w] - ref) ** 2))
            cands.append((d, i, j))
    cands.sort()
    out = [(r, c)] + [(i, j) for _, i, j in cands]
    return [out[k % len(out)] for k in range(M)]


def aggregate_loop(members, patches, m, n, w):
    """Per-pixel sum / count with explicit loops; patches[g][p] is (4, w, w)."""
    acc = np.zeros((4, m, n))
    cnt = np.zeros((m, n))
    for g, mem in enumerate(members):
        for k, (r, c) in enumerate(mem):
            acc[:, r:r + w, c:c + w] += patches[g][k]
            cnt[r:r + w, c:c + w] += 1
    return acc / cnt
