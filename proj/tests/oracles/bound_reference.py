#!/usr/bin/env python3
"""High-precision reference values for the key-rate tests.

Evaluates the bound from its closed forms with 40-digit mpmath arithmetic,
independently of the C++ implementation. The printed values are frozen into
tests/test_keyrate.cpp and tests/acceptance/acceptance.cpp; rerun this script
after touching any formula there.
"""

from mpmath import mp, mpf, sqrt, log

mp.dps = 40


def h(x):
    x = mpf(x)
    if x <= 0 or x >= 1:
        return mpf(0)
    return -x * log(x, 2) - (1 - x) * log(1 - x, 2)


def rate(alpha, F, eta, exact):
    pa = sum(alpha[k] * F[k] for k in alpha)
    joint = {k: alpha[k] * F[k] / pa for k in alpha}
    pC = joint["00"] + joint["11"]
    pW = joint["01"] + joint["10"]
    delta = alpha["00"] * F["00"] - alpha["11"] * F["11"]
    q0 = 1 / (alpha["00"] * F["00"] + alpha["11"] * F["11"])
    gap = F["00"] / 2 + F["11"] / 2 - eta
    overlap = gap * gap if (exact or gap >= 0) else mpf(0)
    overlap = min(overlap, F["00"] * F["11"])
    lam = mpf(1) / 2 + q0 / 2 * sqrt(delta**2 + 4 * alpha["00"] * alpha["11"] * overlap)
    pb0 = joint["00"] + joint["10"]
    return h(pb0) - (h(pC) if pW > 0 else 0) - pW - pC * h(lam)


def semi_honest(p, q):
    p, q = mpf(p), mpf(q)
    a = {"00": (2 - p) / 4, "11": (2 - p) / 4, "01": p / 4, "10": p / 4}
    F = {"00": (2 - q) / 4, "11": (2 - q) / 4, "01": q / 4, "10": q / 4}
    return rate(a, F, q / 4, True)


def adversarial(Q, F_eq, F_neq, p_w):
    Q = mpf(Q)
    a = {"00": (1 - Q) / 2, "11": (1 - Q) / 2, "01": Q / 2, "10": Q / 2}
    F = {"00": F_eq, "11": F_eq, "01": F_neq, "10": F_neq}
    eta = (sqrt(1 - Q) * (sqrt(Q * F_neq) + sqrt(p_w)) / (1 - Q)) ** 2
    return rate(a, F, min(eta, mpf(1)), False)


def acceptance_family(pt):
    pt = mpf(pt)
    return lambda Q: adversarial(Q, (pt - Q * Q) / (1 - Q), Q, Q)


def depolarization_family(Q):
    return adversarial(Q, (1 - Q) / 2, Q / 2, Q)


def threshold(f, lo, hi):
    lo, hi = mpf(lo), mpf(hi)
    for _ in range(120):
        mid = (lo + hi) / 2
        if f(mid) > 0:
            lo = mid
        else:
            hi = mid
    return lo


def show(name, value):
    print(f"{name:<40} {mp.nstr(value, 17)}")


if __name__ == "__main__":
    show("h(0.0737)", h(mpf("0.0737")))
    for Q in ["0", "0.1", "0.199", "0.22", "0.2205"]:
        show(f"semi-honest rate Q={Q}", semi_honest(2 * mpf(Q), 2 * mpf(Q)))
    show("semi-honest rate p=q=0.1", semi_honest("0.1", "0.1"))
    show("semi-honest rate p=q=0.4", semi_honest("0.4", "0.4"))
    show("semi-honest rate p=q=0.5", semi_honest("0.5", "0.5"))
    for pt in ["0.5", "0.4", "0.3"]:
        show(f"acceptance p~a={pt} rate Q=0.05", acceptance_family(pt)(mpf("0.05")))
    show("threshold semi-honest", threshold(lambda Q: semi_honest(2 * Q, 2 * Q), "0.01", "0.3"))
    for pt in ["0.5", "0.4", "0.3"]:
        show(f"threshold acceptance p~a={pt}", threshold(acceptance_family(pt), "0.01", "0.3"))
    show("threshold depolarization-matched", threshold(depolarization_family, "0.01", "0.3"))
