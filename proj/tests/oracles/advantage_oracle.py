"""High-precision reference values for the advantage tests.

Independent of the C++ implementation: every quantity is evaluated from the
closed-form definitions with mpmath at 50 significant digits. Run it to
regenerate the constants frozen in test_advantage.cpp and acceptance.cpp.
"""
from mpmath import mp, mpf, sqrt, exp, log

mp.dps = 50
EPS = mpf("1e-6")
SIGMA0 = 1 / sqrt(12)
TAU, P_LOW, P_HIGH = mpf(5), mpf("1.5"), mpf("0.8")


def pop_stats(xs):
    n = len(xs)
    mu = sum(xs) / n
    return mu, sqrt(sum((x - mu) ** 2 for x in xs) / n)


def vat(sigma):
    d = (sigma - SIGMA0) / (SIGMA0 + EPS)
    g = 1 / (1 + exp(-TAU * d))
    return g, P_LOW + g * (P_HIGH - P_LOW)


def advantages(rewards, variant):
    rs = [mpf(r) for r in rewards]
    if variant in ("anchor-only", "guae"):
        mu, sd = pop_stats(rs + [mpf(0), mpf(1)])
    else:
        mu, sd = pop_stats(rs)
    if variant in ("base", "anchor-only"):
        denom = sd + EPS
    else:
        _, p = vat(sd)
        scale = sd if sd > 0 else EPS
        denom = exp(p * log(scale)) + EPS
    return [(r - mu) / denom for r in rs]


if __name__ == "__main__":
    for s in ("0.3", "0.5"):
        g, p = vat(mpf(s))
        print(f"vat({s}): gate={mp.nstr(g, 17)} p={mp.nstr(p, 17)}")
    print("guae all-ones K=8:", mp.nstr(advantages([1] * 8, "guae")[0], 17))
    print("guae all-zeros K=8:", mp.nstr(advantages([0] * 8, "guae")[0], 17))
    print("base [1,0]:", [mp.nstr(a, 17) for a in advantages([1, 0], "base")])
    mixed = ["0.2", "0.9", "0.4", "1.0", "0.0", "0.7"]
    for v in ("base", "anchor-only", "vat-only", "guae"):
        print(v, [mp.nstr(a, 17) for a in advantages(mixed, v)])
    print("sigma0(0,1):", mp.nstr(SIGMA0, 17), "sigma0(0,2):", mp.nstr(2 / sqrt(12), 17))
    # All-equal groups contribute |A| = (1/(K+2)) / (sigma_ext^p + eps); the
    # smallest over K <= 64 must stay above delta = 0.01.
    print("min collapsed |A| K<=64:", mp.nstr(min(abs(advantages([1] * k, "guae")[0]) for k in range(1, 65)), 17))
    print("collapsed |A| K=64:", mp.nstr(abs(advantages([1] * 64, "guae")[0]), 17))
    print("click exp(-1):", mp.nstr(exp(-1), 17))
