"""Graph-frequency cepstral features for replay speech detection.

The toolkit covers the full chain: WAV ingestion and framing, a graph
Fourier transform front-end producing GFCC/GFLC cepstra, DTW alignment of
genuine/replay pairs, a pair-shared factor model whose residual yields the
device features GFDCC/GFLDC, a diagonal-GMM classifier back-end, and EER
evaluation. See the `cli` module (`grd` entry point) for the end-to-end
commands.
"""

from .audio import AudioSignal, FrameConfig, Window, frame_signal, read_wav, write_wav
from .alignment import WarpPath, dtw_align, dtw_from_costs, expand_along_path, local_cost
from .cepstral import (
    CepstralConfig,
    append_log_energy,
    cmvn,
    extract_features,
    gfcc_frame,
    gflc_frame,
)
from .config import PipelineConfig, load_config
from .errors import (
    AudioFormatError,
    ConfigError,
    FeatureFileError,
    GrdError,
    ProtocolError,
    UnsupportedAudioError,
)
from .fa import (
    FaModel,
    ParallelPair,
    Posterior,
    compute_global_mean,
    e_step,
    extract_device_feature,
    load_fa_model,
    m_step,
    save_fa_model,
    train_fa,
)
from .features import FeatureKind, FeatureMatrix, read_features, write_features
from .gmm import GmmModel, gmm_em_train, gmm_init, gmm_log_likelihood, load_gmm, save_gmm, score_llr
from .graph import GftBasis, GraphSpec, Operator, Topology, build_graph_basis, gft
from .metrics import EvalResult, compute_eer, det_points
from .protocol import Label, ProtocolEntry, parse_protocol, render_protocol
from .synth import SyntheticReplaySpec, generate_corpus

__version__ = "0.1.0"
