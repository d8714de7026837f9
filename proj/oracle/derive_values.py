"""Regenerates tests/oracle_values.hpp from independent references.

Scalar closed forms use mpmath at 40 digits; matrix functions use scipy's
Schur-based logm / fractional_matrix_power; the spectral reference evolves
Fourier coefficients with numpy's FFT. None of these share code with the
library under test.

    python3 oracle/derive_values.py > tests/oracle_values.hpp
"""

import mpmath as mp
import numpy as np
import scipy.linalg as sla

mp.mp.dps = 40
e = mp.e


def cdouble(z):
    z = complex(z)
    return f"{{{z.real!r}, {z.imag!r}}}"


def matrix(name, m):
    rows = ",\n    ".join("{" + ", ".join(cdouble(x) for x in row) + "}" for row in m)
    n = m.shape[0]
    return f"inline const std::complex<double> {name}[{n}][{n}] = {{\n    {rows}}};\n"


out = ["// Generated by oracle/derive_values.py; do not edit by hand.", "#pragma once", "",
       "#include <complex>", "", "namespace oracle_values {", ""]

scalars = {
    "kKappaExpScalar": 1 + e,
    "kAltGenScalar": mp.log(e + 1),
    "kLog2": mp.log(2),
    "kDtAltScalar": e / (e + 1),
    "kNongroupScalar": abs(1 / (e + 1) - (1 / e + 1)),
    "kNongroupIdentity": abs(mp.mpf(1) / 2 - 2),
    "kHyGenScalar": mp.exp(2),
}
for k, v in scalars.items():
    out.append(f"inline constexpr double {k} = {mp.nstr(v, 17)};")
out.append("")

# Non-normal 3x3 test matrix with spectrum in the open right half-plane.
m1 = np.array([[2.0 + 0.5j, 1.0, 0.0],
               [0.0, 3.0 - 0.25j, 1.0 + 0.5j],
               [0.5, 0.0, 1.5 + 1.0j]])
out.append(matrix("kM1", m1))
out.append(matrix("kLogM1", sla.logm(m1)))
out.append(matrix("kSqrtM1", sla.sqrtm(m1)))
out.append(matrix("kCbrtM1", sla.fractional_matrix_power(m1, 1.0 / 3.0)))
out.append(matrix("kExpM1", sla.expm(m1)))

# Heat flow u_t = u_xx on N = 32 points of [0, 2 pi), u0 = sin x + cos(2x)/2, t = 1.
n = 32
x = 2 * np.pi * np.arange(n) / n
u0 = np.sin(x) + 0.5 * np.cos(2 * x)
k = np.fft.fftfreq(n, d=1.0 / n)
k[n // 2] = 0.0
u1 = np.fft.ifft(np.exp(-(k ** 2) * 1.0) * np.fft.fft(u0))
out.append(f"inline constexpr double kHeatNormT1 = {float(np.linalg.norm(u1))!r};")
out.append(f"inline constexpr double kHeatU1At0 = {float(u1[0].real)!r};")

# First row of the N = 8 first-derivative matrix on [0, 2 pi).
d = np.fft.ifft(1j * np.where(np.arange(8) == 4, 0.0, np.fft.fftfreq(8, d=1.0 / 8))[:, None]
                * np.fft.fft(np.eye(8), axis=0), axis=0)
row = ", ".join(repr(float(v.real)) for v in d[0])
out.append(f"inline constexpr double kFourierD1Row0N8[8] = {{{row}}};")
out.append("")
out.append("}  // namespace oracle_values")
print("\n".join(out))
