"""Reference values frozen from tools/derive_oracles.py (mpmath, 50 digits)."""

WAVE_VELOCITY = 200000000.0
WAVE_IMPEDANCE = 50.0
F_MIN = 66666666.666666664
MODES_1_TO_3 = [66666666.666666664, 133333333.33333333, 200000000.0]
LOSS_CROSSOVER_HZ = 13369.015219719207
SERIES_REACTANCE_1K = 0.002356194490192345
DROP_1K_50_50 = 2.3561944895383064e-05
PHASE_TOWARD_BOB_50_1K = -4.7123889768964835e-05
TABLE = [[10.0, 1000.0, 40000000.740220316], [10.0, 5000.0, 40000018.505501404], [20.0, 1000.0, 80000000.37011017], [20.0, 5000.0, 80000009.25275327], [50.0, 1000.0, 200000000.14804408], [50.0, 5000.0, 200000003.7011016], [1000.0, 1000.0, 4000000000.0074024], [1000.0, 5000.0, 4000000000.1850553], [10000.0, 1000.0, 40000000000.00074], [10000.0, 5000.0, 40000000000.01851]]
EXACT_TRANSFER_MATCHED_FMIN_100 = [0.9995065603657316, -0.03141075907812829]
EXACT_TRANSFER_10_2K_FMIN_100 = [1.000493065676423, -0.0007860440314118816]
THERMAL_MATCHED_E = 2.070803194468928e-23
THERMAL_CORNER_MATCHED = 42441318.157838754
THERMAL_QUOTA_300K = 2.0709735e-21
DEFICIT_AT_CORNER = 0.5
THERMAL_10_2K_5K = [6.182010443230564e-26, 7.727513059613004e-27, 106633811.87156987, 853070494.972559]
PLANCK_1GHZ_300K = 5.790795883760439e-19
PLANCK_X30_300K = 5.717409758083322e-20
PLANCK_X1_300K = 1.3169691878626598e-11
NOISE_MS_10K = 2.761298
