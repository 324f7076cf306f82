"""Radiology sentence simplification and human-evaluation toolkit.

The package has three layers:

* generation: a pluggable chat-model backend (:mod:`radsimp.llm`) driving
  plain / chain-of-thought prompting and a four-agent self-correction loop
  (:mod:`radsimp.simplify`);
* measurement: reference-free readability indices (:mod:`radsimp.readability`)
  and survey analytics including inter-annotator agreement
  (:mod:`radsimp.analytics`);
* administration: an HTTP survey service with an append-only event log
  (:mod:`radsimp.survey`) and a command-line front end (:mod:`radsimp.cli`).
"""

__version__ = "0.1.0"
