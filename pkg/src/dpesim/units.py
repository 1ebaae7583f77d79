"""Unit system and physical constants.

Everything internal runs in meV / ps / nm / K. Angular frequencies are
rad/ps, i.e. energies divided by HBAR. Conversion factors for externally
quoted material constants (m/s, kg/m^3, eV) are collected here so the
unit pipeline lives in exactly one place.
"""

from __future__ import annotations

# hbar in meV ps, k_B in meV/K (CODATA)
HBAR = 0.6582119569
KB = 0.08617333262

# 1 eV = 1000 meV
EV_TO_MEV = 1000.0

# 1 m/s = 1e9 nm / 1e12 ps
M_PER_S_TO_NM_PER_PS = 1e-3

# 1 kg/m^3 in meV ps^2 / nm^5:
# 1 kg = 1 J s^2/m^2 = 6.241509074e21 meV (1e12 ps)^2 (1e-9 m... ) ->
# works out to 6.241509074 meV ps^2/nm^5 per kg/m^3.
KG_PER_M3_TO_MEV_PS2_PER_NM5 = 6.241509074

# convenience: ps <-> ns for the photon-statistics fit layer
PS_PER_NS = 1000.0
