"""Gradients flow through the matrix exponential back to the vector.

The exponential map is differentiable, so any scalar loss of U = exp(X)
pulls back to the parameter vector: take the loss's matrix cotangent,
push it through the exponential's adjoint, project onto the layout.
Here the chain is checked against central finite differences.
"""

import numpy as np

from unitary_forge.liegroup import assemble, param_grad, random_params, to_unitary
from unitary_forge.linalg import matexp_vjp

d = 8
rng = np.random.default_rng(0)
m = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
theta = random_params(d, seed=1)


def loss(vec):
    # arbitrary smooth scalar of the unitary
    return float(np.real(np.trace(m.conj().T @ to_unitary(vec))))


# Analytic chain: cotangent of U is m itself for this loss.
grad = param_grad(matexp_vjp(assemble(theta), m))

# Finite differences, one coordinate at a time.
h = 1e-5
fd = np.zeros_like(theta)
for i in range(theta.size):
    up, down = theta.copy(), theta.copy()
    up[i] += h
    down[i] -= h
    fd[i] = (loss(up) - loss(down)) / (2 * h)

rel = np.abs(grad - fd) / np.maximum(np.abs(fd), 1e-12)
print(f"dimension {d}, {theta.size} parameters")
print(f"max relative deviation analytic vs finite differences: {rel.max():.2e}")
print(f"sample gradient entries: {grad[:5]}")
print(f"matching finite-diff  : {fd[:5]}")
