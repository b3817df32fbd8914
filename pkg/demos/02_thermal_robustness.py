# coding: utf-8

# # How temperature destroys entanglement but not synchronization
#
# Sweep the bath temperature for a few squeezing strengths and watch where
# E_dd hits zero. Phase synchronization S_p > 1 survives a bit longer, and
# S_c, S_p and the purity stay positive long after.

# In[1]:

import numpy as np

from magsync import baseline_config
from magsync.sweep import Axis, SweepSpec, figure_preset, run_sweep


# The fig2a preset pins the detunings and tunneling and sweeps T on a log
# grid. 61 points is plenty for a printed table.

# In[2]:

spec = figure_preset("fig2a", n1d=61)
res = run_sweep(spec)
E = res.column("E_dd").reshape(3, -1)
T = res.column("T").reshape(3, -1)[0]
lams = res.column("lambda/g_a").reshape(3, -1)[:, 0]

for lam, e in zip(lams, E):
    dead = T[np.argmax(e == 0)]
    print(f"lambda = {lam:.3f} g_a: E_dd(0.1 mK) = {e[0]:.4f}, separable from T = {dead * 1e3:.0f} mK")


# Stronger squeezing keeps the magnons entangled at higher temperature.
# Now the synchronization side at lambda = 0.05 g_a.

# In[3]:

res5 = run_sweep(figure_preset("fig5", n1d=61))
n = len(res5) // 3
sl = slice(2 * n, 3 * n)
print("     T [K]      E_dd      S_c      S_p   purity")
for row in zip(*(res5.column(c)[sl] for c in ("T", "E_dd", "S_c", "S_p", "purity"))):
    if row[0] > 0.05:
        print("%10.4f  %8.5f  %7.4f  %7.4f  %7.4f" % row)


# A custom sweep over the squeezing phase theta. Nothing else in the
# linearized model fixes a magnon phase, so a local rotation of each magnon
# absorbs theta and E_dd does not move.

# In[4]:

base = baseline_config()
theta = Axis("theta", ("theta",), tuple(np.linspace(0, 2 * np.pi, 9)[:-1]), "rad")
for t, e in zip(*(run_sweep(SweepSpec(base=base, axes=(theta,))).column(c) for c in ("theta", "E_dd"))):
    print(f"theta = {t:.3f}  E_dd = {e:.5f}")
