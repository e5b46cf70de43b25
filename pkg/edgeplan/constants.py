SCHEMA_VERSION = 1

# Vertices closer than this are merged during polygonization.
DUPLICATE_TOL = 1e-9

# Cross products below this magnitude mean parallel supporting lines.
PARALLEL_TOL = 1e-12

# Confidences are clamped to [BCE_CLAMP, 1 - BCE_CLAMP] before taking logs.
BCE_CLAMP = 1e-7

# Polygonization thresholds scored by the eps sensitivity sweep.
SWEEP_EPS = (1e-4, 0.01, 0.05, 0.1, 0.2)
