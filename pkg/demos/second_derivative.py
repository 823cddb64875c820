"""
Second Fréchet derivative of the matrix sign from one complex coupled run,
checked for symmetry in its two directions and against a finite difference
of first derivatives.

    python demos/second_derivative.py
"""
import numpy as np

from matfun import GenSpec, frechet_direct, random_automorphism, \
    random_direction, second_frechet_cs

A = random_automorphism(GenSpec('perplectic', 12, 30, seed=2))
D = random_direction(12, 12, seed=5)
E = random_direction(12, 12, seed=6)

r_de = second_frechet_cs('sign', 'pade2', A, E, D)
r_ed = second_frechet_cs('sign', 'pade2', A, D, E)
sym = np.linalg.norm(r_de.second - r_ed.second) / np.linalg.norm(r_de.second)
print(f'symmetry defect           {sym:.1e}')

print('\n     t     finite-difference error')
for t in (1e-2, 1e-3, 1e-4):
    fd = (frechet_direct('sign', A + t * D, E)
          - frechet_direct('sign', A - t * D, E)) / (2 * t)
    err = np.linalg.norm(fd - r_de.second) / np.linalg.norm(r_de.second)
    print(f'{t:8.0e}   {err:.2e}')
