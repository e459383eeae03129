"""socialnav: headless 2D social-navigation simulator and benchmark.

Pedestrians move under a social-force model and react to the robot through
behavior trees; the robot runs one of three reference local planners; a
28-metric evaluator scores every run and writes tab-separated reports.
"""

__version__ = "0.1.0"

from .sfm import ForceBreakdown, ObstacleMap, SfmParams  # noqa: F401
