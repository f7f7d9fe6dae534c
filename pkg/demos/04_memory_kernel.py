"""Memory effects of the environment on the damped collective amplitude.

Two regimes of the amplitude equation: a single resonant bath mode produces
full revivals (the excitation sloshes back), while a broad Ohmic bath gives
a short memory transient followed by constant golden-rule damping.
"""

import math

import numpy as np

from dfsim import SpectralDensity, extract_rates, solve_amplitude

# -- revival: one resonant environment mode ---------------------------------
g, omega = 0.8, 1.0
times = np.linspace(0.0, 2.0 * np.pi / g, 9)
sol = solve_amplitude(SpectralDensity.from_modes([(omega, g)]), omega, times)
print("single resonant bath mode: |amplitude| revives as |cos(g t)|")
print(f"{'t':>7} | {'|amplitude|':>11} | {'|cos(g t)|':>10}")
for t, eta in zip(sol.times, sol.amplitude):
    print(f"{t:7.3f} | {abs(eta):11.6f} | {abs(math.cos(g * t)):10.6f}")

# -- Markov limit: broad Ohmic bath ------------------------------------------
print()
amplitude, cutoff = 3e-4, 50.0
sd = SpectralDensity.ohmic(amplitude, cutoff, order=1200, span=8.0)
grid = np.linspace(0.0, 8.0, 16001)
sol_ohmic = solve_amplitude(sd, omega, grid)
damping, shift = extract_rates(sol_ohmic)
golden = math.pi * amplitude * omega * math.exp(-omega / cutoff)
print(f"Ohmic bath (cutoff {cutoff} >> frequency {omega}): damping plateaus")
print(f"{'t':>5} | {'damping rate':>12} | {'frequency shift':>15}")
for idx in range(0, grid.size, 2000):
    print(f"{grid[idx]:5.1f} | {damping[idx]:12.3e} | {shift[idx]:15.3e}")
window = grid >= 4.0
print(f"golden-rule rate pi*J(omega) = {golden:.3e}; "
      f"plateau mean = {np.mean(damping[window]):.3e}")
