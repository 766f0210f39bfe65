# Visualization Module Init

from .visualizer import Visualizer

__all__ = [
    "Visualizer"
]
