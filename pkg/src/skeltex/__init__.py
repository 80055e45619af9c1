"""Skeleton action sequences to spatial-feature texture images."""
from .baseline import CentroidModel, featurize, score, train
from .encode import (IMAGE_LABELS, TextureImage, bilinear_resize, encode_em1, encode_em2, encode_em3,
                     encode_em4_composite, generate_image_set, jet_colorbar, normalize_rows)
from .features import FeatureMatrix, extract_features
from .fusion import ScoreVector, multiply_fuse, predict
from .geometry import jj_distance, jj_orientation, jj_vector, jl_distance, ll_angle
from .preprocess import NormalizedSequence, make_shadow, normalize_spine, preprocess, select_main_subject, to_body_coordinates
from .selection import SelectionPlan, SelectionTables, build_selection_plan
from .skeleton import BodyFrame, SkeletonSequence, parse_skeleton_file, write_skeleton_file
from .synth import synthesize_sequence

__version__ = "0.1.0"
