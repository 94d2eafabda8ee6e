#!/usr/bin/env python3
"""Generate tests/data/h2_sto3g.json: H2/STO-3G MO integrals at 0.7414 A.

All integrals over contracted s-Gaussians have closed forms, and the two
symmetry-adapted orbitals (sigma_g, sigma_u) already diagonalize the Fock
matrix, so restricted Hartree-Fock needs no SCF loop. Output units: Hartree,
two-electron tensor in Mulliken (pq|rs) order, flattened row-major.

Run from the repository root:  python3 tools/make_h2_fixture.py
"""

import json
import math

# STO-3G hydrogen: exponents already scaled for zeta = 1.24.
ALPHA = (3.425250914, 0.6239137298, 0.1688554040)
COEFF = (0.1543289673, 0.5353281423, 0.4446345422)

BOHR_PER_ANGSTROM = 1.0 / 0.529177210903
R = 0.7414 * BOHR_PER_ANGSTROM  # internuclear distance, Bohr


def f0(t):
    """Boys function of order zero."""
    if t < 1e-12:
        return 1.0
    return 0.5 * math.sqrt(math.pi / t) * math.erf(math.sqrt(t))


def norm(a):
    return (2.0 * a / math.pi) ** 0.75


def overlap_prim(a, b, r2):
    p = a + b
    return (math.pi / p) ** 1.5 * math.exp(-a * b / p * r2)


def kinetic_prim(a, b, r2):
    p = a + b
    mu = a * b / p
    return mu * (3.0 - 2.0 * mu * r2) * (math.pi / p) ** 1.5 * math.exp(-mu * r2)


def nuclear_prim(a, b, xa, xb, xc, z):
    p = a + b
    xp = (a * xa + b * xb) / p
    r2ab = (xa - xb) ** 2
    r2pc = (xp - xc) ** 2
    return -2.0 * math.pi / p * z * math.exp(-a * b / p * r2ab) * f0(p * r2pc)


def eri_prim(a, b, c, d, xa, xb, xc, xd):
    p, q = a + b, c + d
    xp = (a * xa + b * xb) / p
    xq = (c * xc + d * xd) / q
    pre = 2.0 * math.pi ** 2.5 / (p * q * math.sqrt(p + q))
    expo = math.exp(-a * b / p * (xa - xb) ** 2 - c * d / q * (xc - xd) ** 2)
    return pre * expo * f0(p * q / (p + q) * (xp - xq) ** 2)


CENTERS = (0.0, R)
PRIMS = [(a, norm(a) * c) for a, c in zip(ALPHA, COEFF)]


def contracted(f, centers):
    total = 0.0
    for a, da in PRIMS:
        for b, db in PRIMS:
            total += da * db * f(a, b, *centers)
    return total


def ao_matrix(f):
    return [[contracted(f, (CENTERS[i], CENTERS[j])) for j in range(2)]
            for i in range(2)]


S = ao_matrix(lambda a, b, xa, xb: overlap_prim(a, b, (xa - xb) ** 2))
T = ao_matrix(lambda a, b, xa, xb: kinetic_prim(a, b, (xa - xb) ** 2))
V = ao_matrix(lambda a, b, xa, xb: sum(
    nuclear_prim(a, b, xa, xb, xc, 1.0) for xc in CENTERS))
H_AO = [[T[i][j] + V[i][j] for j in range(2)] for i in range(2)]

ERI_AO = [[[[0.0] * 2 for _ in range(2)] for _ in range(2)] for _ in range(2)]
for i in range(2):
    for j in range(2):
        for k in range(2):
            for l in range(2):
                total = 0.0
                for a, da in PRIMS:
                    for b, db in PRIMS:
                        for c, dc in PRIMS:
                            for d, dd in PRIMS:
                                total += da * db * dc * dd * eri_prim(
                                    a, b, c, d, CENTERS[i], CENTERS[j],
                                    CENTERS[k], CENTERS[l])
                ERI_AO[i][j][k][l] = total

# Symmetry-adapted MOs: sigma_g = (1 + 2)/sqrt(2(1+S)), sigma_u likewise.
cg = 1.0 / math.sqrt(2.0 * (1.0 + S[0][1]))
cu = 1.0 / math.sqrt(2.0 * (1.0 - S[0][1]))
C = [[cg, cu], [cg, -cu]]

H_MO = [[sum(C[m][p] * H_AO[m][n] * C[n][q] for m in range(2)
             for n in range(2)) for q in range(2)] for p in range(2)]

G_MO = []
for p in range(2):
    for q in range(2):
        for r in range(2):
            for s in range(2):
                G_MO.append(sum(
                    C[m][p] * C[n][q] * C[k][r] * C[l][s] * ERI_AO[m][n][k][l]
                    for m in range(2) for n in range(2)
                    for k in range(2) for l in range(2)))


def g_mo(p, q, r, s):
    return G_MO[((p * 2 + q) * 2 + r) * 2 + s]


E_NUC = 1.0 / R
E_HF = 2.0 * H_MO[0][0] + g_mo(0, 0, 0, 0) + E_NUC

# Restricted FCI for the singlet: the closed-shell determinants g^2 and u^2
# couple through the exchange integral (gu|gu).
h11 = 2.0 * H_MO[0][0] + g_mo(0, 0, 0, 0) + E_NUC
h22 = 2.0 * H_MO[1][1] + g_mo(1, 1, 1, 1) + E_NUC
h12 = g_mo(0, 1, 0, 1)
mean, split = 0.5 * (h11 + h22), math.hypot(0.5 * (h11 - h22), h12)
E_FCI = mean - split

fixture = {
    "n_orbitals": 2,
    "n_electrons": 2,
    "e_nuc": E_NUC,
    "h": [H_MO[0][0], H_MO[0][1], H_MO[1][0], H_MO[1][1]],
    "g": G_MO,
    "geometry": "H 0 0 0; H 0 0 0.7414 (Angstrom)",
    "source": "tools/make_h2_fixture.py, STO-3G, symmetry-adapted RHF orbitals",
    "hf_energy": E_HF,
    "fci_energy": E_FCI,
}

with open("tests/data/h2_sto3g.json", "w") as f:
    json.dump(fixture, f, indent=2)
    f.write("\n")

print(f"R = {R:.10f} Bohr, E_HF = {E_HF:.10f}, E_FCI = {E_FCI:.10f}")
