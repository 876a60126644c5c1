from .policy import *
from .engine import *
