from .config import *
from .cells import *
from .training import *
