"""Deterministic shared-spectrum allocation simulator and dataset toolkit.

Functional core: entities, propagation, oracle (link budgets and optimal
grants), multi-SU labeling heuristics, non-learning baselines, dataset
sampling/encoding/augmentation, metrics, and a CLI pipeline. The
estimators module wraps the allocators and the image encoder in a
fit/predict/transform facade.
"""

from .augment import FarPuConfig, augment_idw, augment_rotate, far_pu_synthetics, idw_interpolate
from .baselines import IpbConfig, LbtConfig, ipb_allocate, lbt_allocate
from .config import RunConfig, default_config, load_config
from .datasetio import Dataset, read_dataset
from .entities import Location, PrimaryUser, PuReceiver, Region, Scenario, SecondaryUser, SpectrumSensor
from .estimators import InterpolationAllocator, ListenBeforeTalkAllocator, OracleAllocator, ScenarioImageEncoder
from .imaging import SampleImage, SheetConfig, encode_image
from .labeling import ConservativeConfig, LabelRow, conservative_labels, label_samples
from .metrics import EvalReport, data_rate, fairness, report, score, total_power_w
from .multisu import MultiAllocation, PowerRange, binary_alloc, greedy_order, partition_channels, sequential_alloc
from .oracle import (
    AllocationDecision,
    OracleConfig,
    PurLinkState,
    check_feasible,
    optimal_power,
    pur_link_states,
    sensor_readings,
)
from .pipeline import RunProfile, augment, encode, generate, label, pretrain
from .propagation import GridPathLoss, LogDistanceParams, fit_alpha, grid_loss, load_grid, path_loss_db, save_grid
from .sampling import SamplerConfig, sample_scenario, sample_scenarios
from .units import dbm_to_mw, mw_to_dbm, subarea_index

__version__ = "0.1.0"
