from .sequencing import *
from .folds import *
