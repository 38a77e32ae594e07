"""Shared fixtures: a small but fully representative link configuration."""

import numpy as np
import pytest

from risopt.channel import synthesize_channel
from risopt.config import SystemConfig
from risopt.link import LinkEvaluator
from risopt.metrics import PhaseObjective, aqnm_alpha
from risopt.transceiver import (
    TransceiverSet,
    design_hybrid_combiner,
    design_hybrid_precoder,
)


@pytest.fixture(scope="session")
def small_cfg() -> SystemConfig:
    return SystemConfig(
        n_tx=12, n_rx=12, n_rf_tx=4, n_rf_rx=4, n_streams=4,
        n_ris=6, n_interferers=4, adc_bits=3, snr_db=0.0,
    )


@pytest.fixture(scope="session")
def small_chan(small_cfg):
    return synthesize_channel(small_cfg, np.random.default_rng(1234))


@pytest.fixture(scope="session")
def small_trx(small_cfg, small_chan):
    f_a, f_d, _ = design_hybrid_precoder(small_chan.r_mat, small_cfg)
    w_a_h, w_d_h, _ = design_hybrid_combiner(small_chan.p_mat, small_cfg)
    return TransceiverSet(f_a=f_a, f_d_tilde=f_d, w_a_h=w_a_h, w_d_tilde_h=w_d_h)


@pytest.fixture(scope="session")
def small_linkev(small_cfg, small_chan, small_trx):
    return LinkEvaluator(small_chan, small_trx, small_cfg)


@pytest.fixture(scope="session")
def small_objective(small_cfg, small_chan, small_trx):
    return PhaseObjective(
        small_chan, small_trx.w_a_h, small_trx.w_d_tilde_h,
        aqnm_alpha(small_cfg.adc_bits), small_cfg.noise_var,
        small_cfg.alphabet_array,
    )
