from .curves import *
from .report import *
