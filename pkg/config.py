from fractions import Fraction

# defaults of the command line front end
DEFAULT_EPSILON = Fraction(1, 16)
DEFAULT_WINDOW_HALF = 80.0
DEFAULT_RESOLUTION = 0.25
DEFAULT_TOL_TRACK = 1e-8

# log-domain cut-off for the tail of the example series
DEFAULT_TRUNCATION_TOLERANCE = -60.0

SCHEMA_VERSION = 1
STYLE_VERSION = '1'
