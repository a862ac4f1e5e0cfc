from importlib.metadata import version, PackageNotFoundError

try:
    __version__ = version("human-activity-recognition")
except PackageNotFoundError:
    # running from a source checkout
    __version__ = "0.0.0+unknown"
