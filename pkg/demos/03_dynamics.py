# coding: utf-8

# # Build-up of entanglement from the vacuum
#
# The covariance matrix obeys dC/dt = K C + C K^T + L. Starting from the
# vacuum C = I/2, integrate it and follow the magnon-pair measures.

# In[1]:

import numpy as np

from magsync import baseline_config, build_model, evolve_covariance, measure_all, steady_covariance


# In[2]:

cfg = baseline_config()
model = build_model(cfg)
t = np.linspace(0.0, 1e-6, 201)
traj = evolve_covariance(model.K, model.L, None, t, extra_rate=cfg.omega_b)

E = np.array([measure_all(C).E_dd for C in traj])
Sp = np.array([measure_all(C).S_p for C in traj])
print("first time with E_dd > 0: %.1f ns" % (1e9 * t[np.argmax(E > 0)]))
print("first time with S_p > 1:  %.1f ns" % (1e9 * t[np.argmax(Sp > 1)]))


# In[3]:

for k in range(0, 201, 20):
    print(f"t = {1e6 * t[k]:.2f} us   E_dd = {E[k]:.5f}   S_p = {Sp[k]:.4f}")


# The magnons settle within a few 1/kappa_d. The phonons decay at
# gamma_b/2 and take far longer, but they barely move the magnon block.

# In[4]:

C_ss = steady_covariance(model.K, model.L)
late = evolve_covariance(model.K, model.L, None, np.linspace(0, 10e-6, 11), extra_rate=cfg.omega_b)
blk = slice(0, 4)
for tt, C in zip(np.linspace(0, 10, 11), late):
    dev = np.linalg.norm(C[blk, blk] - C_ss[blk, blk]) / np.linalg.norm(C_ss[blk, blk])
    print(f"t = {tt:4.1f} us   magnon block deviation from steady state {dev:.2e}")
