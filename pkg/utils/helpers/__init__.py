from .errors import *
from .helpers import *
