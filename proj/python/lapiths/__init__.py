"""LAPITHS evaluation toolkit.

Cognitive-plausibility scoring (FSR, generality, performance match), the
two-step sequential decision task with reference reinforcement-learning
agents, decision-level NLL statistics with Welch comparisons, and ROI
beta-vector similarity analysis. The heavy lifting lives in the compiled
`_lapiths` extension.
"""

from ._lapiths import *  # noqa: F401,F403
from ._lapiths import __version__  # noqa: F401
