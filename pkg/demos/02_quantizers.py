"""
Uniform and logarithmic quantizers
==================================

Plots both quantizers with their error bands.  The uniform map has a fixed
absolute error, the logarithmic one a fixed relative error.
"""

import os

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from edgequant.quantizers import QuantizerSpec, quantize_log, quantize_uniform

out = os.path.join(os.path.dirname(__file__), "out")
os.makedirs(out, exist_ok=True)

x = np.linspace(-3, 3, 4001)

delta_u = 0.5
qu = quantize_uniform(x, delta_u)
print("uniform: max |q - x| = %.4f, bound delta_u/2 = %.4f" % (np.abs(qu - x).max(), delta_u / 2))

spec = QuantizerSpec.logarithmic(0.4)
ql = quantize_log(x, spec.delta_u)
nz = x != 0
rel = np.abs(ql[nz] - x[nz]) / np.abs(x[nz])
print("logarithmic: max relative error = %.4f, bound delta_l = %.4f" % (rel.max(), spec.delta_l))

# the uniform lattice is offset, so q(0) = delta_u / 2; the logarithmic
# quantizer is odd and keeps 0 fixed
print("q_u(0) =", quantize_uniform(0.0, delta_u), " q_l(0) =", quantize_log(0.0, spec.delta_u))

fig, axes = plt.subplots(1, 2, figsize=(10, 4))
axes[0].plot(x, qu, lw=1, label="q_u")
axes[0].fill_between(x, x - delta_u / 2, x + delta_u / 2, alpha=0.2, label="|q - x| <= delta_u/2")
axes[0].set_title("uniform, delta_u = %g" % delta_u)
axes[1].plot(x, ql, lw=1, label="q_l")
axes[1].fill_between(x, x - spec.delta_l * np.abs(x), x + spec.delta_l * np.abs(x), alpha=0.2,
                     label="|q - x| <= delta_l |x|")
axes[1].set_title("logarithmic, delta_l = %.3f" % spec.delta_l)
for ax in axes:
    ax.plot(x, x, "k:", lw=0.8)
    ax.legend(loc="upper left")
fig.tight_layout()
fig.savefig(os.path.join(out, "quantizers.svg"))
print("wrote", os.path.join(out, "quantizers.svg"))
