"""Rotated bounding-box geometry, regression losses, assignment and evaluation.

Quads are flat lists ``[x1, y1, ..., x4, y4]``; angles are radians except in
``run_cli``, which takes the command-line arguments of the ``obbreg`` tool.
"""

from ._core import *  # noqa: F401,F403
from ._core import Error, __doc__  # noqa: F401
