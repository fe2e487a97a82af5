#!/usr/bin/env python3
"""Generate the bundled synthetic line-list corpus (data/corpus/*.par).

The corpus is a compact, self-contained stand-in for a real spectroscopic
database: 160-character fixed-width records with plausible rotational-line
positions, pressure-broadening widths, and intensities chosen so that the
standard-atmosphere detectability ordering of the 13 tracked gases comes out
at the documented noise decades. It is NOT real laboratory data; see
data/corpus/README.md.

Records are written in the toolkit's canonical serialization (right-justified
fixed/exponent fields, Fortran-style leading-zero stripping) so that a
parse -> serialize round trip is byte-exact.
"""

import hashlib
import os

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "data", "corpus")

# ---------------------------------------------------------------------------
# Canonical field formatting (mirrors the C++ serializer).


def fixed(v, width, dec):
    s = f"%.{dec}f" % v
    if len(s) > width:
        if s.startswith("0."):
            s = s[1:]
        elif s.startswith("-0."):
            s = "-" + s[2:]
    if len(s) > width:
        raise ValueError(f"{v} does not fit in {width}.{dec}")
    return s.rjust(width)


def expo(v, width, dec):
    s = f"%.{dec}E" % v
    if len(s) > width:
        raise ValueError(f"{v} does not fit in E{width}.{dec}")
    return s.rjust(width)


def record(mol, iso, center, s, a, g_air, g_self, elower, n_air, d_air, tail):
    out = "%2d%1d" % (mol, iso)
    out += fixed(center, 12, 6)
    out += expo(s, 10, 3)
    out += expo(a, 10, 3)
    out += fixed(g_air, 5, 4)
    out += fixed(g_self, 5, 4)
    out += fixed(elower, 10, 4)
    out += fixed(n_air, 4, 2)
    out += fixed(d_air, 8, 6)
    out += tail.ljust(93)[:93]
    assert len(out) == 160
    return out


def h(mol, center, salt):
    """Deterministic pseudo-random in [0, 1) from (molecule, line position)."""
    key = f"{mol}:{center:.6f}:{salt}".encode()
    return int.from_bytes(hashlib.sha256(key).digest()[:8], "big") / 2**64


def quanta(mol, j):
    """Plausible-looking rotational quantum labels for the opaque trailer."""
    up = f"{j + 1:3d}{j:3d}  0  0"
    lo = f"{j:3d}{j - 1 if j else 0:3d}  0  0"
    return f"{up:>15}{lo:>15} 454430 5 2 1 0" + " " * 8 + f"{100.0 + j:6.1f}"


# ---------------------------------------------------------------------------
# Line lists: (center cm^-1, relative strength) per gas. Absolute intensity =
# relative strength * SCALE[gas]; SCALE holds the calibration knobs.

SCALE = {
    "H2O": 1.0,
    "O2": 6.5e-27,
    "SO2": 8.5e-22,
    "O3": 1.7e-20,
    "NO2": 1.8e-21,
    "HCN": 2.8e-20,
    "CO": 4.4e-21,
    "CH4": 1.4e-23,
    "NH3": 1.1e-18,
    "N2O": 5.0e-28,
    "CH3OH": 3.0e-26,
    "CO2": 3.0e-29,
    "N2": 1.0e-33,
}

MOL_ID = {
    "H2O": 1, "CO2": 2, "O3": 3, "N2O": 4, "CO": 5, "CH4": 6, "O2": 7,
    "SO2": 9, "NO2": 10, "NH3": 11, "N2": 22, "HCN": 23, "CH3OH": 39,
}


def h2o_lines():
    """Rotational comb over 5-335 cm^-1 with two transparent windows
    (18.5-23.5 and 26.0-30.5 cm^-1) and strengths ramping toward the
    far-infrared maximum."""
    lines = []
    nu = 5.3
    while nu < 335.0:
        if not (18.5 < nu < 23.5 or 26.0 < nu < 30.5):
            if nu < 100.0:
                s = 2.0e-20 * (0.6 + 0.8 * h(1, nu, "s"))
            elif nu < 200.0:
                # log ramp from 2e-20 at 100 to 1e-18 at 200
                t = (nu - 100.0) / 100.0
                s = 2.0e-20 * (50.0 ** t) * (0.7 + 0.6 * h(1, nu, "s"))
            else:
                s = 1.0e-18 * (0.6 + 0.8 * h(1, nu, "s"))
            lines.append((nu, s))
        nu += 6.4 + 1.4 * h(1, nu, "gap")
    return lines


def comb(start, step, count, rel=None):
    out = []
    for k in range(count):
        nu = start + step * k
        out.append((nu, rel(k) if rel else 1.0))
    return out


LINES = {
    "H2O": h2o_lines(),
    # 10 magnetic-dipole lines across 0.55-2.3 THz
    "O2": comb(18.3, 6.4, 10),
    # dense asymmetric-top band, strongest toward the low-THz window
    "SO2": comb(16.7, 4.45, 16, rel=lambda k: 1.5 if 16.7 + 4.45 * k < 50 else 0.6),
    # two lines in the 0.59-0.69 THz window, one isolated line in the
    # 0.8-0.9 THz window, then the regular stack above 1 THz
    "O3": [(20.43, 0.5), (22.10, 0.5), (28.099438, 0.5)]
          + comb(35.5, 5.4, 12),
    "NO2": comb(38.1, 7.15, 9),
    # linear rotor, B ~ 1.47 cm^-1 -> spacing ~2.95
    "HCN": comb(38.44, 2.945, 20),
    # linear rotor, B ~ 1.92 cm^-1; J^2-type strength growth
    "CO": comb(19.225, 3.845, 21, rel=lambda k: min(1.0, ((k + 5) / 15.0) ** 2)),
    # one line inside 1-3 THz for identifiability, rest in 3-4.5 THz
    "CH4": [(96.1, 1.0)] + comb(104.2, 5.2, 9),
    "NH3": [(92.7, 1.0)] + comb(103.4, 8.5, 10),
    "N2O": comb(5.0, 2.4, 18),
    "CH3OH": [(4.1, 1.0), (8.6, 1.0), (13.3, 1.0), (18.0, 1.0), (22.7, 1.0),
              (27.5, 1.0), (32.9, 1.0), (34.15, 1.0)],
    "CO2": [(280.5, 1.0), (310.2, 1.0)],
    "N2": [(120.7, 1.0), (140.3, 1.0)],
}


def main():
    os.makedirs(OUT_DIR, exist_ok=True)
    total = 0
    for gas, lines in LINES.items():
        mol = MOL_ID[gas]
        rows = []
        for j, (nu, rel) in enumerate(sorted(lines)):
            s = rel * SCALE[gas]
            g_air = 0.05 + 0.04 * h(mol, nu, "ga")
            g_self = g_air * (1.1 + 0.3 * h(mol, nu, "gs"))
            a = 10.0 ** (-4.0 + 3.0 * h(mol, nu, "a"))
            elower = 600.0 * h(mol, nu, "e")
            n_air = 0.50 + 0.28 * h(mol, nu, "n")
            d_air = 0.0
            if gas == "H2O" and h(mol, nu, "d") < 0.3:
                d_air = -0.002 + 0.004 * h(mol, nu, "dv")
            rows.append(record(mol, 1, nu, s, a, g_air, g_self, elower,
                               n_air, d_air, quanta(mol, j)))
        path = os.path.join(OUT_DIR, f"{gas}.par")
        with open(path, "w") as f:
            f.write("\n".join(rows) + "\n")
        total += len(rows)
        print(f"{gas}: {len(rows)} lines")
    print(f"total {total} records in {os.path.abspath(OUT_DIR)}")


if __name__ == "__main__":
    main()
