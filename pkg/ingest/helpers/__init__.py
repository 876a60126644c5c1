from .events import *
from .cleaning import *
