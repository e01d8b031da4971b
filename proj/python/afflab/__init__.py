"""Exact p-adic affine actions, Poisson configurations and the check suites.

Elements, step functions and functionals are plain dicts in the same JSON
shapes the `afflab` command line tool reads; rationals are "num/den" strings.
"""

import json

from . import _afflab

__all__ = [
    "valuation",
    "padic_norm",
    "act_point",
    "product_motion",
    "product_pointwise",
    "is_bijective",
    "pushforward_density",
    "mass_defect",
    "integrate",
    "laplace_exponent",
    "sample",
    "expectation_exact",
    "expectation_mc",
    "counterexamples",
    "reverify",
    "run_suite",
]


def _text(obj):
    return obj if isinstance(obj, str) else json.dumps(obj)


def valuation(x, prime=3):
    """p-adic valuation of a rational; None for zero."""
    return _afflab.valuation(str(x), prime)


def padic_norm(x, prime=3):
    return _afflab.padic_norm(str(x), prime)


def act_point(element, x):
    return _afflab.act_point(_text(element), str(x))


def product_motion(g2, g1):
    """Element acting as g1 first, then g2."""
    return json.loads(_afflab.product_motion(_text(g2), _text(g1)))


def product_pointwise(g2, g1):
    return json.loads(_afflab.product_pointwise(_text(g2), _text(g1)))


def is_bijective(element):
    return _afflab.is_bijective(_text(element))


def pushforward_density(element):
    return json.loads(_afflab.pushforward_density(_text(element)))


def mass_defect(element):
    return _afflab.mass_defect(_text(element))


def integrate(step, prime=3):
    return _afflab.integrate(_text(step), prime)


def laplace_exponent(phi, prime=3):
    """Exponent of E[prod phi] under the Poisson measure."""
    return _afflab.laplace_exponent(_text(phi), prime)


def sample(window, prime=3, seed=0, count=1, resolution=None):
    return _afflab.sample(_text(window), prime, seed, count, resolution)


def expectation_exact(functional):
    return json.loads(_afflab.expectation_exact(_text(functional)))


def expectation_mc(functional, samples=100000, seed=0):
    return json.loads(_afflab.expectation_mc(_text(functional), samples, seed))


def counterexamples():
    return [json.loads(r) for r in _afflab.counterexamples()]


def reverify(record):
    return _afflab.reverify(_text(record))


def run_suite(config=None):
    """Returns (ok, records, summary) for a LabConfig dict."""
    ok, records, summary = _afflab.run_suite(_text(config or {}))
    return ok, [json.loads(r) for r in records], summary
