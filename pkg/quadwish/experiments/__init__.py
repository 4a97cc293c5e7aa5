# quadwish/experiments/__init__.py

from quadwish.experiments.models import ConvergenceRow, ExperimentConfig, ExperimentKind
from quadwish.experiments.convergence import cmd_moment_convergence
from quadwish.experiments.sgd_compare import cmd_sgd_compare
from quadwish.experiments.moment_check import cmd_moment_check
