import pytest

from continuum_otto import PopulationEndpoints, make_spec_from_broadenings

# Reference values at the plotted point (gaps 1, delta_h=2, delta_l=1, rho_h=1,
# KT_h=5, KT_l=1, p0_hot=0.3, p0_cold=0.5), frozen from a 40-digit mpmath
# evaluation of the defining integrals (microstate transport for the stroke
# works, Boltzmann-weighted band averages for the corner energies).
FIG3_W2 = 0.32672865279618455023
FIG3_W4 = -0.20901164656533678781
FIG3_NET_WORK = 0.11771700623084776242
FIG3_HEAT_IN = 0.43543401246169552484
FIG3_HEAT_OUT = 0.31771700623084776242
FIG3_EFFICIENCY = 0.27034407708608465767


@pytest.fixture
def fig3_spec():
    return make_spec_from_broadenings(1.0, 2.0, 1.0, 1.0, 1.0, 5.0, 1.0)


@pytest.fixture
def fig3_ends():
    return PopulationEndpoints(0.3, 0.5)
