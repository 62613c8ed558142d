"""Reference Hu invariants at 50 significant digits.

Independent of the C++ code: raw moments -> central moments via explicit
summation about the centroid -> eta -> Hu's seven invariants written out in
full. Output is pasted into tests/test_spacetime.cpp.
"""
import mpmath as mp

mp.mp.dps = 50

RASTERS = {
    "impulse": [[0, 0, 0, 0, 0],
                [0, 0, 0, 0, 0],
                [0, 0, 9, 0, 0],
                [0, 0, 0, 0, 0],
                [0, 0, 0, 0, 0]],
    "asym": [[0, 1, 0, 0, 0],
             [2, 7, 3, 0, 0],
             [0, 5, 9, 4, 0],
             [0, 0, 6, 1, 8],
             [0, 0, 0, 2, 0]],
}


def hu(raster):
    h, w = len(raster), len(raster[0])
    pix = [(mp.mpf(x), mp.mpf(y), mp.mpf(raster[y][x])) for y in range(h) for x in range(w)]
    m00 = mp.fsum(f for _, _, f in pix)
    xc = mp.fsum(x * f for x, _, f in pix) / m00
    yc = mp.fsum(y * f for _, y, f in pix) / m00

    def eta(p, q):
        mu = mp.fsum((x - xc) ** p * (y - yc) ** q * f for x, y, f in pix)
        return mu / m00 ** (1 + mp.mpf(p + q) / 2)

    n20, n02, n11 = eta(2, 0), eta(0, 2), eta(1, 1)
    n30, n03, n21, n12 = eta(3, 0), eta(0, 3), eta(2, 1), eta(1, 2)
    return [
        n20 + n02,
        (n20 - n02) ** 2 + 4 * n11 ** 2,
        (n30 - 3 * n12) ** 2 + (3 * n21 - n03) ** 2,
        (n30 + n12) ** 2 + (n21 + n03) ** 2,
        (n30 - 3 * n12) * (n30 + n12) * ((n30 + n12) ** 2 - 3 * (n21 + n03) ** 2)
        + (3 * n21 - n03) * (n21 + n03) * (3 * (n30 + n12) ** 2 - (n21 + n03) ** 2),
        (n20 - n02) * ((n30 + n12) ** 2 - (n21 + n03) ** 2)
        + 4 * n11 * (n30 + n12) * (n21 + n03),
        (3 * n21 - n03) * (n30 + n12) * ((n30 + n12) ** 2 - 3 * (n21 + n03) ** 2)
        - (n30 - 3 * n12) * (n21 + n03) * (3 * (n30 + n12) ** 2 - (n21 + n03) ** 2),
    ]


for name, r in RASTERS.items():
    print(name, ", ".join(mp.nstr(v, 20, min_fixed=-1, max_fixed=-1) for v in hu(r)))
