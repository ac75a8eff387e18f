"""Exponents of the information bottleneck source coding problem under logarithmic loss."""

import json

from . import _ibexp
from ._ibexp import AssertionFailure, SizeCapExceeded

__all__ = [
    "Model",
    "AssertionFailure",
    "SizeCapExceeded",
    "rate_distortion",
    "wak_helper_rate",
    "error_exponent",
    "strong_converse_exponent",
    "error_exponent_lossless",
    "sc_exponent_lossless",
    "oracle",
    "entropy",
    "kl",
    "expected_log_rank",
    "simulate",
    "brute_force_optimal_pe",
    "wak_check",
    "identity_check",
]

entropy = _ibexp.entropy
kl = _ibexp.kl
expected_log_rank = _ibexp.expected_log_rank
error_exponent_lossless = _ibexp.error_exponent_lossless
sc_exponent_lossless = _ibexp.sc_exponent_lossless


class Model:
    """Joint pmf P_XY given as a nested list indexed [x][y]."""

    def __init__(self, p_xy):
        rows = [list(map(float, r)) for r in p_xy]
        if not rows or any(len(r) != len(rows[0]) for r in rows):
            raise ValueError("p_xy must be a non-empty rectangular matrix")
        self.p_xy = rows
        self._json = json.dumps(
            {"alphabet_sizes": [len(rows), len(rows[0])], "probs": [v for r in rows for v in r]}
        )

    @classmethod
    def lossless(cls, p_x):
        k = len(p_x)
        return cls([[p_x[i] if i == j else 0.0 for j in range(k)] for i in range(k)])


def _num(v):
    if isinstance(v, str):
        return float(v)
    return v


def _result(text):
    out = json.loads(text)
    out["value_nats"] = _num(out["value_nats"])
    return out


def _cfg(solver):
    return json.dumps(solver) if solver else ""


def rate_distortion(model, delta, u_size=0, solver=None):
    return _result(_ibexp.rate_distortion(model._json, delta, _cfg(solver), u_size))


def wak_helper_rate(model, b, u_size=0, solver=None):
    return _result(_ibexp.wak_helper_rate(model._json, b, _cfg(solver), u_size))


def error_exponent(model, rate, delta, u_size=0, solver=None):
    return _result(_ibexp.error_exponent(model._json, rate, delta, _cfg(solver), u_size))


def strong_converse_exponent(model, rate, delta, u_size=0, solver=None):
    return _result(_ibexp.strong_converse_exponent(model._json, rate, delta, _cfg(solver), u_size))


def oracle(model, kind, rate=0.0, delta=0.0, u_size=0, grid_k=40):
    value, granularity, evaluations = _ibexp.oracle(model._json, kind, rate, delta, u_size, grid_k)
    return {"value_nats": value, "granularity": granularity, "evaluations": evaluations}


def simulate(model, rate, delta, ns, epsilon=None, samples=0, seed=1, variant="error", u_size=2):
    if variant not in ("error", "sc"):
        raise ValueError("variant must be 'error' or 'sc'")
    return json.loads(
        _ibexp.simulate(model._json, rate, delta, epsilon, list(ns), samples, seed, variant == "sc", u_size)
    )


def brute_force_optimal_pe(model, n, rate, delta):
    return _ibexp.brute_force_optimal_pe(model._json, n, rate, delta)


def wak_check(model, n, rate, helper_rate, trials=0, seed=1):
    return json.loads(_ibexp.wak_check(model._json, n, rate, helper_rate, trials, seed))


def identity_check(model, n=4, labels=2, seed=1):
    return json.loads(_ibexp.identity_check(model._json, n, labels, seed))

