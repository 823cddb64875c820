"""
Newton against the cubic and quintic Padé iterations for the sign of a
random symplectic matrix.

Prints the step-change history of each iteration, how far the iterates
drift from the group, and the convergence orders measured at high
precision with mpmath.

    python demos/sign_convergence.py
"""
import mpmath

from matfun import GenSpec, IterOptions, estimate_order, newton_sign, \
    pade_sign, random_automorphism, reference_value
from matfun.linalg import to_mp

spec = GenSpec('symplectic', 50, target_cond=80, seed=0)
A = random_automorphism(spec)
opts = IterOptions(tol=1e-12)

runs = {
    'newton': newton_sign(A, opts, group=spec.form),
    'pade1': pade_sign(A, 1, opts, group=spec.form),
    'pade2': pade_sign(A, 2, opts, group=spec.form),
}
for name, (_, trace) in runs.items():
    steps = ' '.join(f'{s:.1e}' for s in trace.steps[1:])
    drift = max(trace.group_residuals)
    print(f'{name:7s} {trace.iterations:2d} steps  max drift {drift:.1e}')
    print(f'        step changes: {steps}')

# orders need more digits than double precision offers
B = random_automorphism(GenSpec('symplectic', 6, target_cond=12, seed=1))
for name, run in [('newton', lambda X, o: newton_sign(X, o)),
                  ('pade1', lambda X, o: pade_sign(X, 1, o)),
                  ('pade2', lambda X, o: pade_sign(X, 2, o))]:
    with mpmath.workdps(400):
        X = to_mp(B)
        mp_opts = IterOptions(tol=mpmath.mpf(10) ** -380, record_trace=True)
        S, trace = run(X, mp_opts)
        print(f'{name:7s} observed order {float(estimate_order(trace, S)):.2f}')

print('reference check:',
      float(abs(runs['pade2'][0] - reference_value('sign', A)).max()))
