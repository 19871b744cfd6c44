from gsm.analytics import *
from gsm.bounds import *
from gsm.estimators import *
from gsm.model import *
from gsm.utils import *
