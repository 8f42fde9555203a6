# package imports
from gblab.__about__ import __version__
from gblab.chains import Chain
from gblab.chains import DoubleChain
from gblab.chains import fundamental_cycle
from gblab.chains import homology
from gblab.config import RunConfig
from gblab.config import load_config
from gblab.errors import GBLabError
from gblab.flatform import FlatBilinearTensor
from gblab.flatform import diagonalize
from gblab.forms import ChartGrid
from gblab.forms import MixedForm
from gblab.forms import MixedSum
from gblab.frames import FrameConnection
from gblab.frames import curvature
from gblab.frames import euler_form
from gblab.group import GroupElement
from gblab.pfaffian import SkewMatrix
from gblab.pfaffian import pfaffian
from gblab.pseudosphere import one_soliton
from gblab.report import Check
from gblab.report import Report
from gblab.thom import SectionField
from gblab.thom import thom_pullback
from gblab.verifications import run_suite
from gblab.verifications import verify_all

__all__ = [
    "Chain",
    "ChartGrid",
    "Check",
    "DoubleChain",
    "FlatBilinearTensor",
    "FrameConnection",
    "GBLabError",
    "GroupElement",
    "MixedForm",
    "MixedSum",
    "Report",
    "RunConfig",
    "SectionField",
    "SkewMatrix",
    "__version__",
    "curvature",
    "diagonalize",
    "euler_form",
    "fundamental_cycle",
    "homology",
    "load_config",
    "one_soliton",
    "pfaffian",
    "run_suite",
    "thom_pullback",
    "verify_all",
]
