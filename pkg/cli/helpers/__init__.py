from .config import *
from .models import *
from .experiment import *
from .output import *
from .command import *
