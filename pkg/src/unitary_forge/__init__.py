"""Optimize quantum circuits directly as elements of the unitary group.

Instead of fixing a gate ansatz, circuits on N wires are treated as points
of U(2^N): a real vector parametrizes a skew-Hermitian matrix, the matrix
exponential maps it to a unitary, and gradients flow back through the
exponential into the parameter vector. Around that core the package ships
a batched statevector simulator, partitioned-unitary and composed-gate
baselines, an identity-learning training loop, a quanvolutional image
demo, and a wall-clock benchmark harness.

Modules
-------
linalg    dense complex arithmetic, matrix exponential and its adjoint
liegroup  real-vector parametrization of skew-Hermitian matrices
circuit   batched statevector simulation: encode, apply, decode
models    differentiable circuit models (full / partitioned / ansatz)
optim     losses, Adam, and the identity-learning training loop
quanv     quanvolutional layer and a small classifier demo
bench     epoch-timing benchmark harness and report emitters
cli       command-line entry point wiring configs to the pipelines

Heavy imports are deferred to the submodules so the command-line wrapper
can cap BLAS thread pools before numpy loads.
"""

__version__ = "0.1.0"
