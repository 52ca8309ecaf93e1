"""Every unitary is the exponential of a skew-Hermitian matrix.

A d x d skew-Hermitian matrix is pinned down by d^2 real numbers, so a
plain real vector parametrizes the whole unitary group U(d): assemble the
matrix, exponentiate, done. This script walks the pipeline at d = 4 (two
qubits) and shows the parameter count growing as 2^(2N).
"""

import numpy as np

from unitary_forge.liegroup import assemble, disassemble, random_params, to_unitary
from unitary_forge.linalg import matexp, unitarity_error

np.set_printoptions(precision=3, suppress=True, linewidth=120)

# A two-qubit system lives in dimension 4, so 16 real parameters.
theta = random_params(4, seed=7)
print("parameter vector (16 reals):")
print(theta, "\n")

x = assemble(theta)
print("assembled skew-Hermitian generator X (note X = -X^H):")
print(x, "\n")
print("max |X + X^H| =", np.abs(x + x.conj().T).max(), "\n")

u = matexp(x)
print("U = exp(X):")
print(u, "\n")
print(f"unitarity error max|U^H U - I| = {unitarity_error(u):.2e}")
print(f"round trip through disassemble is exact: {np.array_equal(disassemble(x), theta)}\n")

# The same in one call, with the unitarity invariant checked on the way out.
u2 = to_unitary(theta)
assert np.array_equal(u, u2)

print("parameters needed for N qubits (d = 2^N, count = d^2 = 2^(2N)):")
for n in range(1, 8):
    print(f"  N = {n}: {random_params(2 ** n, seed=0).size:>6d}")
