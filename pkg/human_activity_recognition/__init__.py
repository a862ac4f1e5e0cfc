from .human_activity_recognition import *
from .version import __version__
