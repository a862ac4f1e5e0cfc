import logging

from .constants import *
from .exceptions import *
from .timer import *
from .digests import *
from .activity_label import *
from .raw_recording import *
from .dataset_manifest import *
from .recording_runs import *
from .WISDM_loader import *
from .generic_CSV_loader import *
from .synthetic_corpus import *
from .corpus_source import *
from .preprocess_config import *
from .segments import *
from .segmentation import *
from .smoothing import *
from .normalization import *
from .preprocessing import *
from .split_assignment import *
from .segment_cache import *
from .feature_config import *
from .morlet_CWT import *
from .feature_extractors import *
from .feature_bundle import *
from .feature_store import *
from .feature_dump import *
from .tensor import *
from .tensor_ops import *
from .adam import *
from .gradient_check import *
from .checkpoint import *
from .layers import *
from .LSTM_cells import *
from .attention import *
from .model_spec import *
from .classifier_output import *
from .classical_classifier import *
from .decision_tree import *
from .tree_ensembles import *
from .KNN import *
from .gaussian_naive_bayes import *
from .linear_classifiers import *
from .neural_classifiers import *
from .model_zoo import *
from .evaluation import *
from .train_config import *
from .losses import *
from .batch_sampling import *
from .training_loop import *
from .design_decisions import *
from .confusion import *
from .experiment_config import *
from .experiment_report import *
from .results_table import *
from .experiment_runner import *

from .version import __version__

logger = logging.getLogger(__name__)
