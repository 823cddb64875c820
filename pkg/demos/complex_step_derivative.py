"""
Fréchet derivative of the matrix square root three ways: a complex-step
run of the Padé iteration, the coupled iteration and the direct Sylvester
solve.  Also shows how the complex-step error behaves as ``h`` shrinks,
compared with a central difference.

    python demos/complex_step_derivative.py
"""
import numpy as np

from matfun import GenSpec, StepTooLarge, coupled_pade, cs_derivative, frechet_direct, \
    random_automorphism, random_direction, reference_value

A = random_automorphism(GenSpec('pseudo_orthogonal', 20, 40, seed=3))
E = random_direction(20, 20, seed=4)

L = frechet_direct('sqrt', A, E)
cs = cs_derivative('sqrt', 'pade2', A, E)
co = coupled_pade('sqrt', A, E, 2)


def rel(X):
    return np.linalg.norm(X - L) / np.linalg.norm(L)


print(f'complex step (h = eps)  {rel(cs.derivative):.2e}')
print(f'coupled Padé            {rel(co.derivative):.2e}')

print('\n     h     complex step   central difference')
for h in 10.0 ** -np.arange(2, 17, 2):
    fd = (reference_value('sqrt', A + h * E)
          - reference_value('sqrt', A - h * E)) / (2 * h)
    try:
        c = f'{rel(cs_derivative("sqrt", "pade2", A, E, h).derivative):.2e}'
    except StepTooLarge:
        c = 'step too large'
    print(f'{h:8.0e}   {c:14s} {rel(fd):.2e}')
