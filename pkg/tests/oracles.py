"""Closed-form reference values for domains where the kernels are classical.

Everything here is derived independently of the package: unit-disk kernels
are textbook formulas, and the annulus kernels come from the orthonormal
monomial bases of the Bergman and Hardy spaces of A(rho) = {rho < |z| < 1}.
The tests freeze these as their oracle; nothing in this module imports the
library under test.
"""

import numpy as np

TWO_PI = 2.0 * np.pi


# --------------------------------------------------------------------------
# unit disk
# --------------------------------------------------------------------------

def disk_szego(z, w):
    """S(z, w) = 1 / (2 pi (1 - z conj(w)))."""
    return 1.0 / (TWO_PI * (1.0 - np.asarray(z) * np.conj(w)))


def disk_garabedian(z, w):
    """L(z, w) = 1 / (2 pi (z - w))."""
    return 1.0 / (TWO_PI * (np.asarray(z) - w))


def disk_bergman(z, w):
    """K(z, w) = 1 / (pi (1 - z conj(w))^2)."""
    return 1.0 / (np.pi * (1.0 - np.asarray(z) * np.conj(w)) ** 2)


def disk_adjoint(z, w):
    """Lambda(z, w) = 1 / (pi (z - w)^2)."""
    return 1.0 / (np.pi * (np.asarray(z) - w) ** 2)


def disk_green(z, w):
    """G(z, w) = ln|1 - z conj(w)| - ln|z - w|."""
    z = np.asarray(z)
    return np.log(np.abs(1.0 - z * np.conj(w))) - np.log(np.abs(z - w))


# --------------------------------------------------------------------------
# annulus A(rho) = {rho < |z| < 1}
# --------------------------------------------------------------------------

ANNULUS_RHO = 0.5

# lambda_11 for A(0.5): the coefficient in
#     K(z, w) - 4 pi S(z, w)^2 = lambda_11 F'(z) conj(F'(w)),
# F'(z) = 1/(z ln rho), evaluated from the basis series below in
# 40-digit arithmetic (the double-precision series loses ~5 digits to
# cancellation); independent of the diagonal point used, as it must be.
ANNULUS_LAMBDA11 = 4.1146632237393884716e-06


def annulus_harmonic_measure(z, rho=ANNULUS_RHO):
    """omega_1(z) = ln|z| / ln(rho): harmonic measure of the inner circle."""
    return np.log(np.abs(np.asarray(z))) / np.log(rho)


def annulus_fprime(z, rho=ANNULUS_RHO):
    """F_1'(z) = 2 d(omega_1)/dz = 1 / (z ln rho)."""
    return 1.0 / (np.asarray(z) * np.log(rho))


def annulus_bergman(z, w, rho=ANNULUS_RHO, terms=250):
    """Bergman kernel of A(rho) from the orthonormal monomials z^n.

    ||z^n||^2 = pi (1 - rho^(2n+2)) / (n + 1) for n != -1 and
    2 pi ln(1/rho) for n = -1; valid for rho^2 < |z conj(w)| < 1.
    """
    zeta = np.asarray(z) * np.conj(w)
    n = np.arange(-terms, terms + 1)
    n = n[n != -1]
    shape = (-1,) + (1,) * np.ndim(zeta)
    terms_sum = ((n + 1).reshape(shape) * zeta[None] ** n.reshape(shape)
                 / (1.0 - rho ** (2 * n + 2)).reshape(shape)).sum(axis=0)
    return terms_sum / np.pi + 1.0 / (zeta * TWO_PI * np.log(1.0 / rho))


def annulus_szego(z, w, rho=ANNULUS_RHO, terms=250):
    """Szego kernel of A(rho): ||z^n||^2 on the boundary is 2 pi (1 + rho^(2n+1))."""
    zeta = np.asarray(z) * np.conj(w)
    n = np.arange(-terms, terms + 1)
    shape = (-1,) + (1,) * np.ndim(zeta)
    s = (zeta[None] ** n.reshape(shape)
         / (1.0 + rho ** (2 * n + 1)).reshape(shape)).sum(axis=0)
    return s / TWO_PI


def annulus_green(z, w, rho=ANNULUS_RHO, terms=60):
    """Green's function of A(rho) by the method of images.

    G(z, w) = -ln|z - w| + corrector; the image series over the group
    z -> rho^(2k) z converges geometrically.
    """
    z = np.asarray(z, dtype=complex)
    w = complex(w)
    # log-conjugate expansion: G = sum_k ln|1 - rho^(2k) z wbar| family;
    # use the standard bilateral product formula
    q = rho ** 2
    val = -np.log(np.abs((z - w) / (1.0 - z * np.conj(w))))
    for k in range(1, terms + 1):
        val -= np.log(np.abs((1.0 - q ** k * z / w) * (1.0 - q ** k * w / z)
                             / ((1.0 - q ** k * z * np.conj(w))
                                * (1.0 - q ** k / (z * np.conj(w))))))
    # the image product vanishes on |z| = 1 and equals -ln|w| on |z| = rho;
    # the radial harmonic ln|z| ln|w| / ln(rho) zeroes the inner circle too
    val += np.log(np.abs(z)) * np.log(np.abs(w)) / np.log(rho)
    return val
