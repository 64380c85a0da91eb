"""Graph-side machinery for promoting coarse maps to near-bijections.

Submodules: graph (metric graphs), trees (generators and predicates),
ends (boundaries at the truncation depth), filling (multi-scale graphs
over model spaces), cheeger (isoperimetric certificates), qimaps (vertex
maps from end correspondences), promote (chains, the boundary criterion
and matching promotion), jsonio and cli (interchange and front end).
"""

__version__ = "0.1.0"
