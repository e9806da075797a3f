"""Frozen reference values. Each entry states how it was obtained; none is
produced by the code under test."""
import math

from scipy.special import gamma

# V = 0 box, L = 3 sites, a = hbar = m = 1: 1 - cos(pi eta / 4)
BOX3_ENERGIES = (1 - math.sqrt(2) / 2, 1.0, 1 + math.sqrt(2) / 2)

# harmonic omega = 1, a = 0.5, sites {-0.5, 0, 0.5}: V_j + 1/a^2 and -1/(2 a^2)
HARMONIC_DIAGONAL = (4.125, 4.0, 4.125)
HARMONIC_OFF_DIAGONAL = -2.0

# V = x^4, m = 1, E = 1: T = 2 int_{-1}^{1} dx / sqrt(2 (1 - x^4)) = B(1/4, 1/2) / sqrt(2)
QUARTIC_PERIOD_E1 = gamma(0.25) * gamma(0.5) / gamma(0.75) / math.sqrt(2)

# box l = 1, A = [0, 0.3]: lambda = 0.3 - sin(0.6 pi eta) / (2 pi eta)
def box_lambda(eta, x=0.3):
    return x - math.sin(2 * math.pi * eta * x) / (2 * math.pi * eta)

# box off-diagonal overlap on [0, x]: int_0^x 2 sin(a pi t) sin(b pi t) dt
def box_offdiag(a, b, x=0.3):
    d, s = (a - b) * math.pi, (a + b) * math.pi
    return math.sin(d * x) / d - math.sin(s * x) / s

# harmonic omega = m = 1, A = [-y x_t, y x_t] as a time fraction: 2 asin(y) / pi
def harmonic_p_cl(E, lo, hi):
    xt = math.sqrt(2 * E)
    return (math.asin(hi / xt) - math.asin(lo / xt)) / math.pi

# fast-term overlap I for the reference configuration (harmonic, n = 10 and 20 counted
# from 0, hbar = 1, A = [-1, 1]), recomputed with scipy.integrate.quad on the closed-form
# actions A(x) = (x sqrt(R^2 - x^2) + R^2 asin(x / R)) / 2 + pi R^2 / 4, R^2 = 2E.
REPRO_I_EXACT_ENERGIES = complex(0.034730594261681555, 0.0)
REPRO_B_EXACT_ENERGIES = complex(0.03473923293345485, 0.0)
REPRO_I_REFERENCE = complex(0.03446, -0.00437)
REPRO_B_REFERENCE = complex(0.03445, -0.00437)

# binary entropy h(0.3); two independent bits: 2 h(0.3)
H03 = -(0.3 * math.log(0.3) + 0.7 * math.log(0.7))
TWO_PARTICLE_ENTROPY = 2 * H03
TWO_PARTICLE_SPECTRUM = (0.49, 0.21, 0.21, 0.09)
