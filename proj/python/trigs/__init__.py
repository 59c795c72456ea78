"""Tikhonov-regularized inertial gradient dynamics.

Thin layer over the compiled ``_trigs`` module: JSON reports come back as
dictionaries, everything else is passed through.
"""

import json

try:
    from . import _trigs
except ImportError:  # in-tree build: module sits next to the package
    import _trigs

Error = _trigs.Error
ConfigError = _trigs.ConfigError
make_problem = _trigs.make_problem
moreau_objective = _trigs.moreau_objective
viscosity_point = _trigs.viscosity_point
moreau = _trigs.moreau
admissible_lambda_interval = _trigs.admissible_lambda_interval
decay_onset = _trigs.decay_onset
heavy_ball_rate = _trigs.heavy_ball_rate
tradeoff_sweep = _trigs.tradeoff_sweep
self_checks = _trigs.self_checks


class Run:
    def __init__(self, result):
        self._result = result
        self.summary = json.loads(result.summary_json)
        self.rates = json.loads(result.rates_json)

    @property
    def times(self):
        return self._result.times

    @property
    def all_pass(self):
        return self._result.all_pass

    def series(self, quantity):
        return self._result.series(quantity)

    def suite(self, name):
        for s in self.summary["suites"]:
            if s["name"] == name:
                return s
        raise KeyError(name)

    def write(self, directory):
        self._result.write(str(directory))


def run_experiment(settings=None, **kwargs):
    """Run one experiment. Keys follow the config file (``t-end``); keyword
    arguments may use underscores instead (``t_end=1e3``)."""
    merged = dict(settings or {})
    merged.update({k.replace("_", "-"): v for k, v in kwargs.items()})
    return Run(_trigs.run_experiment(merged))


__all__ = [
    "Error", "ConfigError", "Run", "make_problem", "moreau_objective", "viscosity_point",
    "moreau", "admissible_lambda_interval", "decay_onset", "heavy_ball_rate",
    "run_experiment", "tradeoff_sweep", "self_checks",
]
