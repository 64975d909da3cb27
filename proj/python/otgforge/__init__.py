"""Template-based domain adaptation for hate speech classifiers."""

from ._otgforge import *  # noqa: F401,F403
from ._otgforge import __doc__  # noqa: F401
