"""Frozen expected values shared across test modules.

Every number here was produced by an independent oracle run (brute-force
enumeration, symbolic expansion, or published table) before the package
code existed.  Tests compare library output against these constants and
never the other way around.
"""

TABLE_PRIMES = (29, 31, 37, 43, 47, 59, 83)

# resolved point counts, default (naive_quadric) node policy
TABLE_COUNTS = {
    29: 53120,
    31: 110010,
    37: 97310,
    43: 142210,
    47: 177770,
    59: 322490,
    83: 800690,
}

TABLE_TRV = {29: -165, 31: -83, 37: 1, 43: -8, 47: 126, 59: -290, 83: 842}

# traces of Frobenius on E2, Weierstrass count except p=3 (Pfaffian locus)
AP_E2 = {
    3: -1, 7: 3, 13: 4, 17: 3, 19: -5, 23: 4,
    29: 5, 31: 7, 37: -7, 41: -8, 43: -6, 47: 8, 59: 0, 83: 4,
}

# scan invariants: #{z : det L(z) = 0} and #{z : rank L(z) = 3} in P^4(F_p)
N_DET0 = {
    3: 61, 7: 591, 13: 3106, 17: 6491, 19: 8921, 23: 15136,
    29: 29311, 31: 37935, 37: 58571, 41: 84160, 43: 90266,
    47: 116576, 59: 225966, 83: 611616,
}
N_RANK3 = {
    3: 20, 7: 40, 13: 75, 17: 100, 19: 120, 23: 135,
    29: 170, 31: 180, 37: 230, 41: 255, 43: 265,
    47: 275, 59: 355, 83: 495,
}

# rank-3 split: (pentagon component, E2 component, overlap)
RANK3_SPLIT = {13: (65, 10, 0), 31: (155, 25, 0), 41: (205, 50, 0)}

# resolved counts at small primes (naive_quadric, conjecture-report range)
SMALL_COUNTS = {3: 430, 7: 2180, 13: 8150, 17: 14940, 19: 19580, 23: 30270}
COUNT_41 = 209210

# node_contribution under each policy tag
PAPER_CONTRIB = {29: 18270, 31: 64480, 37: 29489}
NAIVE_CONTRIB = {29: 18879, 31: 66495, 37: 30229}

# census sizes and per-class tallies
CENSUS_65 = {"regular1": 25, "regular2": 25, "sigma1": 5, "sigma2": 5, "tau": 5}
CENSUS_21 = {"regular1": 5, "regular2": 5, "sigma1": 5, "sigma2": 5, "tau": 1}
CENSUS_SIZES = {3: 21, 13: 21, 29: 21, 31: 65, 37: 21, 41: 65, 43: 21}

# tr H^3 at the table primes (h = 81 for p = 1 mod 10, else 33)
TABLE_TRH3 = {29: -20, 31: 134, 37: -258, 43: -266, 47: 502, 59: -290, 83: 1174}

# conjecture-report rows at h-override 33, naive policy:
# p -> (count, trH3, apE2, trV, apF, matched)
REPORT_ROWS = {
    3: (430, -6, -1, -3, -3, True),
    7: (2180, 12, 3, -9, -9, True),
    13: (8150, 54, 4, 2, None, None),
    17: (14940, 72, 3, 21, None, None),
    19: (19580, -180, -5, -85, None, None),
    23: (30270, 114, 4, 22, None, None),
}

# p = 41 row: pinned h = 81, no form coefficient on file
ROW_41 = {"h": 81, "trH3": -806, "trV": -478, "apF": None, "matched": None}

# q-expansion coefficients bundled in the form data file
QEXP = {2: 1, 3: -3, 5: -5, 7: -9}

# quadratic twist elimination: candidate d -> least inert witness
ORDER6_WITNESSES = {
    -1: 31, 2: 29, -2: 29, 5: 37, -5: 31, 10: 29, -10: 29,
    11: 29, -11: 29, 22: 31, -22: 37, 55: 29, -55: 29,
    110: 31, -110: "resolvent",
}

# quartic elimination: field label -> least witness with pattern [4]
ORDER4_WITNESSES = {
    "quartic-01": 43, "quartic-02": 43, "quartic-03": 43, "quartic-04": 43,
    "quartic-05": 59, "quartic-06": 47, "quartic-07": 59, "quartic-08": 47,
    "quartic-09": 83, "quartic-10": 43, "quartic-11": 43, "quartic-12": 43,
    "quartic-13": 47, "quartic-14": 43, "quartic-15": 47,
}

TILDE_HISTOGRAM = {1: 1, 2: 19, 3: 8, 4: 12, 6: 8}

# Euler factor data at p = 31
EULER_31_FACTORS = ((1, 83, 29791), (1, -217, 29791))
EULER_31_PRODUCT = (1, -134, 41571, -3991994, 887503681)
