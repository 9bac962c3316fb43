"""Python front end for the cclab experiment core.

Configs are plain dicts in the same schema the CLI reads; they are passed
to the core as JSON text.
"""

import json

from . import _core
from ._core import Error, JsonError

__all__ = ["Error", "JsonError", "gallery", "dump", "run", "verify", "eval_poly"]


def _text(config):
    return config if isinstance(config, str) else json.dumps(config)


def gallery():
    """Return {name: summary} for every gallery entry."""
    return dict(_core.gallery_list())


def dump(name):
    """Return a gallery entry as a config dict."""
    return json.loads(_core.gallery_dump(name))


def run(command, config, which="I", seed=None, horizon=None, epsilon=None, threads=None):
    """Run density, criterion, transitivity, build or screen.

    Returns a dict with exit_code (0 held, 1 failed at scale), the parsed
    report records and the human-readable text.
    """
    out = _core.run(command, _text(config), which, seed, horizon, epsilon, threads)
    out["records"] = [json.loads(line) for line in out["records"].splitlines()]
    return out


def verify(config, threads=None):
    """Check every expectation a config declares."""
    return _core.verify(_text(config), threads)


def eval_poly(coeffs, operator, vector):
    """Apply sum_k coeffs[k] T^k to a real vector."""
    return _core.eval_poly(list(coeffs), _text(operator), list(vector))
