"""Information-theoretic dissection of paintings into color-homogeneous
rectangles, with horizon proportions, dissection pairs and artist networks."""
from .composition import (CompositionRecord, DissectionPair, GainProfile, classify_pair,
                          compositional_proportion, describe, gain_profile)
from .dissection import (Cut, CutStep, Direction, DissectionResult, Region, best_cut, dissect,
                         global_entropy, partition_mutual_information, region_histogram, split_gain)
from .ingest import QuantizedImage, RawImage, decode_image, quantize, resize_max

__version__ = "0.1.0"
