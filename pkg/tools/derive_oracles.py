"""Regenerate tests/oracle_values.py from closed forms at 50-digit precision.

Independent of the package: every value is evaluated here from first
principles with mpmath, then frozen as a float literal for the test suite.

    python3 tools/derive_oracles.py > tests/oracle_values.py
"""

import mpmath as mp

mp.mp.dps = 50

K = mp.mpf("1.380649e-23")
H = mp.mpf("6.62607015e-34")
C0 = mp.mpf("299792458")

L_U, C_U, R_U, D = mp.mpf("250e-9"), mp.mpf("100e-12"), mp.mpf("0.021"), mp.mpf("1.5")
L_C, C_C, R_C = L_U * D, C_U * D, R_U * D
V_C = 1 / mp.sqrt(L_U * C_U)
R_W = mp.sqrt(L_U / C_U)
F_MIN = V_C / (2 * D)

out = {}


def put(name, value):
    out[name] = value


put("WAVE_VELOCITY", V_C)
put("WAVE_IMPEDANCE", R_W)
put("F_MIN", F_MIN)
put("MODES_1_TO_3", [n * V_C / (2 * D) for n in (1, 2, 3)])
put("LOSS_CROSSOVER_HZ", R_C / (2 * mp.pi * L_C))
put("SERIES_REACTANCE_1K", 2 * mp.pi * 1000 * L_C)

# series loop: generator, R_A, j w L_c, R_B
w = 2 * mp.pi * 1000
i = 1 / (100 + 1j * w * L_C)
put("DROP_1K_50_50", abs(1j * w * L_C * i))
put("PHASE_TOWARD_BOB_50_1K", -mp.atan(w * L_C / 50))


def v_eq(r, f):
    w = 2 * mp.pi * f
    return w * D / mp.atan(w * L_C / r)


put("TABLE", [[float(r), float(f), v_eq(r, f)] for r in (10, 20, 50, 1000, 10000) for f in (1000, 5000)])


def abcd(f):
    th = 2 * mp.pi * f * D / V_C
    return mp.cos(th), 1j * R_W * mp.sin(th), 1j * mp.sin(th) / R_W, mp.cos(th)


def exact_transfer(ra, rb, f):
    a, b, c, d = abcd(f)
    return rb / (a * rb + b)


put("EXACT_TRANSFER_MATCHED_FMIN_100", [exact_transfer(R_W, R_W, F_MIN / 100).real,
                                         exact_transfer(R_W, R_W, F_MIN / 100).imag])
put("EXACT_TRANSFER_10_2K_FMIN_100", [exact_transfer(10, 2000, F_MIN / 100).real,
                                       exact_transfer(10, 2000, F_MIN / 100).imag])


def thermal(ra, rb, T, fc):
    rp, rs = ra * rb / (ra + rb), ra + rb
    f0c = 1 / (2 * mp.pi * C_C * rp)
    f0l = rs / (2 * mp.pi * L_C)
    ee = C_C / 2 * mp.quad(lambda f: 4 * K * T * rp / (1 + (f / f0c) ** 2), [0, fc])
    em = L_C / 2 * mp.quad(lambda f: 4 * K * T / rs / (1 + (f / f0l) ** 2), [0, fc])
    return ee, em, f0c, f0l


ee, em, f0c, f0l = thermal(R_W, R_W, 300, F_MIN / 100)
put("THERMAL_MATCHED_E", ee)
put("THERMAL_CORNER_MATCHED", f0c)
put("THERMAL_QUOTA_300K", K * 300 / 2)
ee, em, f0c, f0l = thermal(R_W, R_W, 300, f0c)
put("DEFICIT_AT_CORNER", ee / (K * 300 / 2))
ee, em, f0c, f0l = thermal(mp.mpf(10), mp.mpf(2000), 300, mp.mpf(5000))
put("THERMAL_10_2K_5K", [ee, em, f0c, f0l])


def planck(f, T):
    return 4 * mp.pi * H * f**3 / C0**2 / mp.expm1(H * f / (K * T))


put("PLANCK_1GHZ_300K", planck(mp.mpf("1e9"), 300))
put("PLANCK_X30_300K", planck(30 * K * 300 / H, 300))
put("PLANCK_X1_300K", planck(K * 300 / H, 300))

put("NOISE_MS_10K", 4 * K * mp.mpf("1e15") * 10000 * 5000)


def fmt(v):
    if isinstance(v, list):
        return "[" + ", ".join(fmt(x) for x in v) + "]"
    return repr(float(v))


print('"""Reference values frozen from tools/derive_oracles.py (mpmath, 50 digits)."""')
print()
for k, v in out.items():
    print(f"{k} = {fmt(v)}")
