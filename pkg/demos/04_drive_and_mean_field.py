# coding: utf-8

# # From a microwave drive to the magnomechanical coupling
#
# G_db is not a free knob in an experiment. It is the bare magnomechanical
# coupling enhanced by the coherent magnon amplitude, which the microwave
# drive sets. This notebook goes from the drive field to G_db.

# In[1]:

import math

from magsync import TWO_PI, DriveSpec, baseline_config
from magsync.meanfield import calibrate_g_db, effective_coupling, solve_operating_point


# A 250 um YIG sphere driven with B0 = 3.9e-5 T.

# In[2]:

drive = DriveSpec(B0=3.9e-5, sphere_diameter=250e-6, g_db_bare=1e-3)
print("spins in the sphere: %.3e" % drive.n_spins)
print("drive Rabi frequency: %.3e rad/s" % drive.rabi)


# Solve the steady-state amplitude equations for this drive. The phonon
# displacement follows from the magnon population.

# In[3]:

cfg = baseline_config(G_db=None, drive=drive)
op = solve_operating_point(cfg)
(G1, G2), (rot1, rot2) = effective_coupling(op)
print("|<d1>| = %.3e, q1 = %.3e" % (abs(op.d1), op.q1))
print("G_db/2pi = %.3f Hz for g_db = 1e-3 rad/s" % (G1 / TWO_PI))
print("residual of the amplitude equations: %.1e" % op.residual)


# G_db is linear in the bare coupling, so hitting 2pi x 0.1 MHz is a
# one-line rescale. The drift matrix assumes a real G; the last line is
# the magnon frame rotation that makes it so.

# In[4]:

g_db = calibrate_g_db(cfg, TWO_PI * 0.1e6)
op = solve_operating_point(baseline_config(G_db=None, drive=DriveSpec(B0=3.9e-5, sphere_diameter=250e-6, g_db_bare=g_db)))
print("bare coupling needed: g_db = %.4e rad/s" % g_db)
print("resulting G_db/2pi = %.1f Hz" % (effective_coupling(op)[0][0] / TWO_PI))
print("frame rotation: %.3f rad" % effective_coupling(op)[1][0])
