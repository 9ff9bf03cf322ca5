"""Chebyshev coefficients for sqrt(x) e^x K_nu(x) on x >= 2, in t = 4/x - 1."""
import mpmath as mp

mp.mp.dps = 60
M = 80


def coeffs(nu, m=M):
    nodes = [mp.cos(mp.pi * (k + mp.mpf(1) / 2) / m) for k in range(m)]
    vals = []
    for t in nodes:
        x = 4 / (1 + t)
        vals.append(mp.sqrt(x) * mp.e**x * mp.besselk(nu, x))
    out = []
    for j in range(m):
        s = sum(v * mp.cos(mp.pi * j * (k + mp.mpf(1) / 2) / m) for k, v in enumerate(vals))
        out.append(2 * s / m)
    out[0] /= 2
    return out


for nu in (0, 1):
    c = coeffs(nu)
    keep = [v for v in c]
    while abs(keep[-1]) < mp.mpf("1e-18"):
        keep.pop()
    print(f"// nu = {nu}: {len(keep)} terms")
    for v in keep:
        print(f"    {mp.nstr(v, 20, min_fixed=-100, max_fixed=100)},")
