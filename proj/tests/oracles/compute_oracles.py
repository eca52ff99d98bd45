"""Independent high-precision reference values frozen into the C++ tests.

Run with: python3 tests/oracles/compute_oracles.py
Uses mpmath only; shares no code with the C++ implementation.
"""
from mpmath import mp, mpf, exp, log, betainc, sqrt, e, pi, floor

mp.dps = 50


def wells_riley(infectors, q, p, t, ach, volume):
    return 1 - exp(-(infectors * q * p * t) / (ach * volume))


def welch(a, b):
    a = [mpf(x) for x in a]
    b = [mpf(x) for x in b]
    na, nb = len(a), len(b)
    ma, mb = sum(a) / na, sum(b) / nb
    va = sum((x - ma) ** 2 for x in a) / (na - 1)
    vb = sum((x - mb) ** 2 for x in b) / (nb - 1)
    sa, sb = va / na, vb / nb
    t = (ma - mb) / sqrt(sa + sb)
    df = (sa + sb) ** 2 / (sa ** 2 / (na - 1) + sb ** 2 / (nb - 1))
    x = df / (df + t * t)
    pval = betainc(df / 2, mpf(1) / 2, 0, x, regularized=True)
    return t, df, pval


def pooled(a, b):
    a = [mpf(x) for x in a]
    b = [mpf(x) for x in b]
    na, nb = len(a), len(b)
    ma, mb = sum(a) / na, sum(b) / nb
    ss = sum((x - ma) ** 2 for x in a) + sum((x - mb) ** 2 for x in b)
    df = mpf(na + nb - 2)
    sp2 = ss / df
    t = (ma - mb) / sqrt(sp2 * (mpf(1) / na + mpf(1) / nb))
    pval = betainc(df / 2, mpf(1) / 2, 0, df / (df + t * t), regularized=True)
    return t, df, pval


def show(label, value):
    print(f"{label:50s} {mp.nstr(value, 20)}")


show("WR I=1 V=300", wells_riley(1, 20, mpf("0.48"), 1, 4, 300))
show("WR I=1 V=30", wells_riley(1, 20, mpf("0.48"), 1, 4, 30))
I = 50 * mpf("0.015")
S = 50 - I
P = wells_riley(I, 20, mpf("0.48"), 1, 4, 300)
show("pipeline N=50 prev=0.015 V=300 P", P)
show("pipeline N=50 prev=0.015 V=300 C", S * P)
show("1000 ft2 in m2", 1000 * mpf("0.09290304"))
show("92.90304 * 3", mpf("92.90304") * 3)
disc = pi * mpf("1.8288") ** 2
show("disc area r=6ft", disc)
show("10.0/disc", 10 / disc)
show("105.071/disc", mpf("105.071") / disc)

for name, a, b in [
    ("welch [1..5] vs [2..6]", [1, 2, 3, 4, 5], [2, 3, 4, 5, 6]),
    ("welch small A", [0.5, 1.7, 2.2, 0.9], [3.1, 2.8, 4.4, 3.9, 5.0, 2.7]),
    ("welch small B", [10.0, 10.5, 9.8], [1.0, 30.0, 2.0, 18.0, 7.0]),
    ("welch small C", [0.01, 0.02, 0.5, 0.03, 0.2, 0.04], [0.3, 1.2, 2.5, 0.8, 4.0, 0.9]),
]:
    t, df, pv = welch(a, b)
    show(name + " t", t)
    show(name + " df", df)
    show(name + " p", pv)

t, df, pv = pooled([0.5, 1.7, 2.2, 0.9], [3.1, 2.8, 4.4, 3.9, 5.0, 2.7])
show("pooled small A t", t)
show("pooled small A df", df)
show("pooled small A p", pv)

# Regularized incomplete beta spot values
for (x, a, b) in [(0.3, 2, 3), (0.9, 0.5, 0.5), (0.001, 4, 0.5), (0.999, 60, 0.5), (0.5, 200, 0.5)]:
    show(f"I_{x}({a},{b})", betainc(mpf(a), mpf(b), 0, mpf(x), regularized=True))

# fit_log_normal [1, e^2]
vals = [mpf(1), e ** 2]
lv = [log(v) for v in vals]
mu = sum(lv) / 2
show("lognormal mu", mu)
show("lognormal sigma", sqrt(sum((x - mu) ** 2 for x in lv) / 2))
