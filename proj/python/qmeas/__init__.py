"""Python interface to the qmeas measurement-model simulator."""

import json

from ._core import *  # noqa: F401,F403
from ._core import NumericalError, ValidationError, run_scenario_text


def run_scenario(config, *, seed=None, n_events=None):
    """Run a scenario given as a dict or JSON text.

    Returns the parsed report and the event log as CSV text.
    """
    text = config if isinstance(config, str) else json.dumps(config)
    report, events = run_scenario_text(text, "json", seed, n_events)
    return json.loads(report), events
