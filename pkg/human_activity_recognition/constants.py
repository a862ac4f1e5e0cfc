from os.path import join, expanduser

DEFAULT_WORKING_DIRECTORY = "."
DEFAULT_OUTPUT_DIRECTORY = expanduser(join("~", "data", "HAR"))
DEFAULT_SEED = 0

# WISDM v1.1 (DS1) activity classes in manifest order
WISDM_CLASS_NAMES = ["Walking", "Jogging", "Upstairs", "Downstairs", "Sitting", "Standing"]
WISDM_CHANNEL_NAMES = ["acc_x", "acc_y", "acc_z"]
IMU_CHANNEL_NAMES = ["acc_x", "acc_y", "acc_z", "gyr_x", "gyr_y", "gyr_z"]

# DS2 activity classes carried by the generic CSV schema
DS2_CLASS_NAMES = ["Walking", "Bike", "Upstairs", "Downstairs", "Jogging", "Bus/Taxi"]

NUM_CLASSES = 6

# ingestion
MALFORMED_FRACTION_LIMIT = 0.10
GAP_FACTOR = 10.0

# split
SPLIT_RATIOS = (0.7, 0.1, 0.2)
MIN_SEGMENTS_PER_CLASS = 10
MIN_USERS_BY_USER = 3
SPLIT_STRATEGIES = ("segment_stratified", "by_user")

# preprocessing
DEFAULT_WINDOW_SIZE = 150
DEFAULT_OVERLAP_FRACTION = 0.7
DEFAULT_SMOOTHING_WINDOW = 10
NORMALIZATION_METHODS = ("train_split_min_max",)

# features
STATISTICAL_FUNCTIONS = ("min", "max", "mean", "std")
DEFAULT_CWT_SCALES = 50
DEFAULT_MORLET_CENTER_FREQUENCY = 6.0
CWT_TRUNCATION = 4.0
WAVELETS = ("morlet",)
SPECTRAL_VALUES = ("magnitude",)
REPRESENTATIONS = ("temporal", "statistical", "spectral")

# optimization
DEFAULT_LEARNING_RATE = 0.001
ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPSILON = 1e-8
DEFAULT_EPOCHS_CE = 50
DEFAULT_EPOCHS_PRETRAIN = 10
DEFAULT_BATCH_SIZE = 64
DEFAULT_TEMPERATURE = 0.07
DEFAULT_TRIPLET_MARGIN = 1.0
PROBABILITY_FLOOR = 1e-12
SCHEDULES = ("ce_only", "supcon_then_ce", "triplet_then_ce")
SAMPLING_MODES = ("plain", "class_balanced", "triplet")
PREFETCH_CAPACITY = 2
PREFETCH_POLL_SECONDS = 0.05

# file formats
SEGMENT_CACHE_MAGIC = b"HARSEG\x00\x00"
SEGMENT_CACHE_VERSION = 1
CHECKPOINT_MAGIC = b"HARCKPT\x00"
CHECKPOINT_VERSION = 1
CLASSICAL_FORMAT_VERSION = 1
BUNDLE_FORMAT_VERSION = 1
REPORT_FORMAT_VERSION = 1

# record counts as stated for the two datasets
PUBLISHED_RECORD_COUNTS = {
    "DS1": 7498,
    "DS2": 39168,
}

# published accuracies, keyed by schedule then dataset
PUBLISHED_ACCURACY = {
    "ce_only": {
        "DS1": {
            "svm": 0.779, "knn": 0.935, "gbdt": 0.892, "lr": 0.763, "dt": 0.874, "rf": 0.929,
            "adaboost": 0.446, "gaussian_nb": 0.781, "mlp": 0.775, "resnet": 0.954,
            "transformer": 0.878, "lstm": 0.953, "bilstm": 0.954, "lstm_attention": 0.931,
            "cnn1d": 0.939, "mrnet": 0.970,
        },
        "DS2": {
            "svm": 0.569, "knn": 0.798, "gbdt": 0.784, "lr": 0.555, "dt": 0.759, "rf": 0.850,
            "adaboost": 0.683, "gaussian_nb": 0.538, "mlp": 0.603, "resnet": 0.535,
            "transformer": 0.840, "lstm": 0.873, "bilstm": 0.874, "lstm_attention": 0.870,
            "cnn1d": 0.828, "mrnet": 0.552,
        },
    },
    "supcon_then_ce": {
        "DS1": {
            "resnet": 0.882, "transformer": 0.852, "lstm": 0.923, "bilstm": 0.915,
            "lstm_attention": 0.870, "cnn1d": 0.919, "mrnet": 0.854,
        },
        "DS2": {
            "resnet": 0.872, "transformer": 0.813, "lstm": 0.857, "bilstm": 0.856,
            "lstm_attention": 0.826, "cnn1d": 0.820, "mrnet": 0.723,
        },
    },
    # printed values; they repeat the first rows of the cross-entropy table
    "triplet_then_ce": {
        "DS1": {
            "resnet": 0.779, "transformer": 0.935, "lstm": 0.892, "bilstm": 0.763,
            "lstm_attention": 0.874, "cnn1d": 0.929, "mrnet": 0.954,
        },
        "DS2": {
            "resnet": 0.569, "transformer": 0.798, "lstm": 0.784, "bilstm": 0.555,
            "lstm_attention": 0.759, "cnn1d": 0.850, "mrnet": 0.535,
        },
    },
}

# display names used in tables
MODEL_DISPLAY_NAMES = {
    "svm": "SVM",
    "knn": "KNN",
    "gbdt": "GBDT",
    "lr": "LR",
    "dt": "DT",
    "rf": "RF",
    "adaboost": "AdaBoost",
    "gaussian_nb": "GaussianNB",
    "mlp": "MLP",
    "resnet": "ResNet",
    "transformer": "Transformers",
    "lstm": "LSTM",
    "bilstm": "BiLSTM",
    "lstm_attention": "LSTMAttention",
    "cnn1d": "CNN1D",
    "mrnet": "MRNet",
}
