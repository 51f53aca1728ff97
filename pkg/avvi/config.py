import os
from fractions import Fraction

from dotenv import load_dotenv

load_dotenv()


AVVI_THREADS = int(os.getenv("AVVI_THREADS", os.cpu_count() or 1))

ROOT_WIDTH = Fraction(os.getenv("AVVI_ROOT_WIDTH", "1/1000000"))

MAX_PATTERN_CONSTRAINTS = int(os.getenv("AVVI_MAX_PATTERN_CONSTRAINTS", 16))
GENERATOR_MAX_N = int(os.getenv("AVVI_GENERATOR_MAX_N", 24))

ORACLE_GRID = int(os.getenv("AVVI_ORACLE_GRID", 2000))
ORACLE_EPS = float(os.getenv("AVVI_ORACLE_EPS", 0.05))
ORACLE_CLIP = float(os.getenv("AVVI_ORACLE_CLIP", 10))
ORACLE_MAX_DEPTH = int(os.getenv("AVVI_ORACLE_MAX_DEPTH", 30))
ORACLE_MAX_PIECE_POINTS = int(os.getenv("AVVI_ORACLE_MAX_PIECE_POINTS", 20000))

CSV_SAMPLES = int(os.getenv("AVVI_CSV_SAMPLES", 200))
