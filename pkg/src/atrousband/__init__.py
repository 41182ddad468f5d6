"""Listenable, time-aligned subband analysis with the a trous algorithm."""
from .atrous import Signal, SubbandSet, decompose, decompose_stage, filter_band, synthesize
from .errors import (
    AtrousError,
    CorruptFile,
    InvalidArgument,
    SilentInput,
    UnsupportedFormat,
    UnsupportedSampleRate,
)
from .filters import FirFilter, design_lowpass, group_delay, oversample_filter
from .isd import (
    IsdReport,
    TisdSeries,
    isd,
    stereo_isd,
    tisd_cumulative,
    tisd_gradient,
    tisd_instant,
    tisd_windowed,
)
from .mappings import BandLabel, DecompositionPlan, audio_plan, dyadic_plan, leipp_plan
from .wavio import WavMeta, read_wav, write_wav

__version__ = "0.1.0"
