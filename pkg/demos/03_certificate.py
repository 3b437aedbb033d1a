"""
The Lyapunov certificate
========================

Solves the Lyapunov equation for the reference network, derives the gain
threshold, and evaluates the agreement radius and the decay constant.
"""

import numpy as np

from edgequant import GainParams, LipschitzBounds, build_certificate, decompose
from edgequant.reference import N_DIM, SIGMA, XI1, XI2, g5_graph

np.set_printoptions(precision=4, suppress=True)

d = decompose(g5_graph())
lip = LipschitzBounds(XI1, XI2)
cert = build_certificate(d, GainParams(SIGMA), lip, N_DIM)

print("H =\n", cert.H)
print("Lyapunov residual %.1e, Q block residual %.1e, Schur residual %.1e"
      % (cert.lyapunov_residual, cert.q_block_residual, cert.schur_residual))
print("sigma_min = %.4f, chosen sigma = %.2f, feasible: %s" % (cert.sigma_min, SIGMA, cert.feasible))
print("margin lambda_min(Q) - 2 xi |P| = %.4f" % cert.margin)

# uniform quantizer: the certified radius is linear in the interval
for du in (0.01, 0.1, 1.0):
    print("radius(delta_u = %g) = %.3f" % (du, cert.radius(du)))

# logarithmic quantizer: the decay constant falls linearly and hits zero
# at delta_l_max
print("delta_l_max = %.5f" % cert.delta_l_max)
for dl in (0.0, 0.01, 0.02, cert.delta_l_max):
    print("pi(%.4f) = %.4f" % (dl, cert.decay_constant(dl)))

# Q is positive definite exactly above the gain threshold
for sigma in (1.4, 1.55, 1.59, 1.6, 1.64, 2.0):
    c = build_certificate(d, GainParams(sigma), LipschitzBounds(0, 0), N_DIM)
    print("sigma = %.2f  lambda_min(Q) = %+.4f  reasons: %s" % (sigma, c.lambda_min_Q, c.reasons or "-"))
