"""
The convergence experiment from Python rather than the ``matfun`` command:
all three schemes for the sign of a symplectic matrix, with CSV output.

    python demos/run_experiment.py [output-dir]
"""
import sys

from matfun import ExperimentConfig, run_experiment

out = sys.argv[1] if len(sys.argv) > 1 else 'experiment-out'
cfg = ExperimentConfig('sign', ('newton', 'pade1', 'pade2'), n=50,
                       group='symplectic', target_cond=80, seed=0,
                       output_dir=out)
summary = run_experiment(cfg)
print(summary.format_table())
print(f'CSV files written to {out}/')
