def test_HAR_import():
    from human_activity_recognition import run_experiment


def test_CLI_import():
    from human_activity_recognition.CLI import main
