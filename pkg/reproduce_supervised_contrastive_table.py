from os.path import join
import logging

from human_activity_recognition import load_experiment_config, run_seed_sweep, emit_table, format_table, write_table

# Configure logging to see info messages
logging.basicConfig(level=logging.INFO, format='%(name)s - %(levelname)s - %(message)s')

# Experiment document for the WISDM corpus
config_filename = "configs/wisdm_experiment.yaml"

# Pretraining applies to the neural models only
neural_models = ["resnet", "transformer", "lstm", "bilstm", "lstm_attention", "cnn1d", "mrnet"]

# Seeds to sweep; cells report mean and half-range
seeds = [0]

config = load_experiment_config(config_filename).with_overrides(schedule="supcon_then_ce", models=neural_models)

reports = run_seed_sweep(config, seeds)

table = emit_table(reports)
directory = join(config.output_directory, config.name, config.training.schedule)
write_table(table, join(directory, "results_table.csv"), join(directory, "results_table.txt"))
print(format_table(table))
