"""Reference values (invariants, known series) used by the tests."""

from fractions import Fraction as F

from invpi2.numkernel import QuadExt

S3, S5, S7 = QuadExt(0, 1, 3), QuadExt(0, 1, 5), QuadExt(0, 1, 7)

# (e, h, f) per hypergeometric case
KNOWN_INVARIANTS = {
    "t1": (F(11, 3), 42, F(16, 5)),
    "t2": (F(35, 3), 290, 16),
    "t3": (F(5, 3), 10, 1),
    "t4": (F(7, 3), 18, F(16, 9)),
    "t5": (2, 14, F(4, 3)),
    "t6": (F(8, 3), 24, 2),
    "t7": (F(23, 3), 150, 8),
    "t8": (5, 70, F(16, 3)),
    "t9": (F(47, 3), 486, 16),
    "t10": (F(11, 3), 38, 4),
    "t11": (3, 28, F(8, 3)),
    "t12": (F(17, 3), 80, 8),
    "t13": (F(23, 3), 122, 16),
    "t14": (F(14, 3), 66, 4),
}

# case, k, sign of z, j, z, tau^2, (a, b, c) as printed
KNOWN_SERIES = [
    ("t3", F(1), -1, 25, F(-1, 2**12), 5, (F(1, 8), 1, F(5, 2))),
    ("t3", F(5), -1, 305, F(-1, 2**20), 41, (F(13, 128), F(45, 32), F(205, 32))),
    ("t5", F(2, 3), 1, 16, F(1, 2**12), F(37, 9), (F(1, 16), F(9, 16), F(37, 24))),
    ("t6", F(2), 1, 80, F(1, 2**16), 15, (F(3, 32), F(17, 16), F(15, 4))),
    ("t8", F(5, 3), -1, 85, F(-1, 2**18), F(193, 9), (F(15, 128), F(183, 128), F(965, 192))),
    ("t8", F(8, 3), 1, 160, F(1, 2**6 * 5**6), F(304, 9), (F(36, 375), F(504, 375), F(2128, 375))),
    ("t8", F(15), -1, 2661, F(-1, 2**18 * 3**6 * 5**3), F(1075, 3),
     (F(29, 640) * S5, F(693, 640) * S5, F(2709, 320) * S5)),
    ("t11", F(3), -1, 157, F(-1, 2**12 * 3**4), 27, (F(5, 48), F(21, 16), F(21, 4))),
    ("t12", F(7), -1, 757, F(-1, 2**22 * 3**3), 123, (F(15, 768) * S3, F(278, 768) * S3, F(205, 96) * S3)),
]

# the printed 12~ row is off by a factor 3 (its own tau^2 = 123 forces c = 205/32 sqrt 3)
PRINTED_SCALE = {("t12", F(7)): 3}

# row 7~ (k = 8): the printed z is corrupted; a, b, c as printed
ROW7 = ("t7", F(8), 1, 992, 168, (F(15, 392) * S7, F(38, 49) * S7, F(240, 49) * S7))

# row 5~ (k = 8/3): quadratic z
ROW5 = ("t5", F(8, 3), 1, 112, ((5 * S5 - 11) / 8) ** 3, F(160, 9),
        (56 - 25 * S5, 303 - 135 * S5, F(1220, 3) - 180 * S5))

# operator-defined cases: tabulated (e, h, f)
USER_INVARIANTS = {
    "a_alpha": (1, F(14, 3), F(1, 3)),
    "b_theta": (1, 0, 1),
}
