"""Frozen reference values for the spherical Bessel tables.

Each value v is stored as (v/|v|, log|v|) so that entries far outside the
double range stay usable. Entries are kept only when two working precisions
agree to 1e-20 relative.

    python3 gen_bessel.py > bessel_values.inc
"""
import mpmath as mp

POINTS = [
    (0.1, 0.0), (1.0, 0.0), (5.0, 0.0), (37.5, 0.0),
    (1.0, 1.0), (10.0, 0.5), (3.0, -2.0), (0.5, 20.0),
    (40.0, 1e-3), (2.0, 60.0), (1.5, -25.0), (1.0, 499.0), (12.566, 0.0012566),
]
ORDERS = [0, 1, 2, 5, 10, 30, 100, 500, 2000]


def values(z, l, dps):
    with mp.workdps(dps):
        z = mp.mpc(z)
        f = mp.sqrt(mp.pi / (2 * z))
        j = lambda n: f * mp.besselj(n + mp.mpf(1) / 2, z)
        y = lambda n: f * mp.bessely(n + mp.mpf(1) / 2, z)
        h = lambda n: j(n) + 1j * y(n)
        if l == 0:
            jr, hr = mp.cos(z), mp.exp(1j * z)
        else:
            jr = z * j(l - 1) - l * j(l)
            hr = z * h(l - 1) - l * h(l)
        return [j(l), jr, h(l), hr]


def agree(a, b):
    if any(x == 0 for x in a):
        return False
    return all(abs(x - y) <= mp.mpf("1e-20") * abs(x) for x, y in zip(a, b))


def main():
    print("// generated by gen_bessel.py: zre, zim, l, then (re, im, log|v|) for j, [zj]', h, [zh]'")
    for zr, zi in POINTS:
        for l in ORDERS:
            lo = values(mp.mpc(zr, zi), l, 50)
            hi = values(mp.mpc(zr, zi), l, 90)
            if not agree(lo, hi):
                continue
            cells = [repr(zr), repr(zi), str(l)]
            for v in hi:
                with mp.workdps(90):
                    a = abs(v)
                    u = v / a
                    cells += ["%.17e" % float(u.real), "%.17e" % float(u.imag), "%.17e" % float(mp.log(a))]
            print("{" + ", ".join(cells) + "},")


if __name__ == "__main__":
    main()
