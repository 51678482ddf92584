import numpy as np
import pytest

from specalloc.baselines import IpbConfig, LbtConfig, ipb_allocate, lbt_allocate
from specalloc.entities import Location, Scenario, SecondaryUser, SpectrumSensor
from specalloc.oracle import OracleConfig, optimal_power, sensor_readings
from specalloc.propagation import LogDistanceParams

from conftest import flat_model, make_pu, random_small_scenario

CFG = OracleConfig(beta_db=10.0, noise_dbm=-110.0)


class TestLbt:
    def test_threshold_gate(self, region):
        # PU delivering -85 dBm at the SU location (alpha=3, pl0=40: loss 70 at 10 m)
        pu = make_pu(0, 510.0, 500.0, -15.0, [(512.0, 500.0)])
        su = SecondaryUser(0, Location(500.0, 500.0))
        scenario = Scenario(region=region, pus=(pu,), sus=(su,))
        model = flat_model()
        cfg = OracleConfig(noise_dbm=-90.0)
        granted = lbt_allocate(scenario, su, model, cfg, LbtConfig(threshold_dbm=-80.0, grant_power_dbm=0.0))
        assert granted.is_granted and granted.power_dbm == 0.0
        louder = make_pu(0, 510.0, 500.0, -5.0, [(512.0, 500.0)])  # delivers -75
        scenario2 = Scenario(region=region, pus=(louder,), sus=(su,))
        denied = lbt_allocate(scenario2, su, model, cfg, LbtConfig(threshold_dbm=-80.0))
        assert not denied.is_granted

    def test_no_pus_grants(self, region):
        su = SecondaryUser(0, Location(500.0, 500.0))
        scenario = Scenario(region=region, sus=(su,))
        d = lbt_allocate(scenario, su, flat_model(), OracleConfig(noise_dbm=-90.0), LbtConfig(threshold_dbm=-80.0))
        assert d.is_granted

    def test_never_grants_inside_own_signal_radius(self, region):
        # wherever a single PU's own signal already exceeds the threshold
        model = flat_model(alpha=3.3, pl0=56.0, d0=25.0)
        lbt = LbtConfig(threshold_dbm=-90.0)
        rng = np.random.default_rng(3)
        pu = make_pu(0, 500.0, 500.0, -5.0, [(505.0, 500.0)])
        scenario_base = Scenario(region=region, pus=(pu,))
        for _ in range(200):
            su = SecondaryUser(0, Location(float(rng.uniform(0, 1000)), float(rng.uniform(0, 1000))))
            scenario = Scenario(region=region, pus=(pu,), sus=(su,))
            from specalloc.propagation import path_loss_db

            own = pu.tx_power_dbm - path_loss_db(model, pu.loc, su.loc)
            if own > lbt.threshold_dbm:
                d = lbt_allocate(scenario, su, model, CFG, lbt)
                assert not d.is_granted


class TestIpb:
    def test_exact_model_matches_oracle(self):
        rng = np.random.default_rng(8)
        model = flat_model(alpha=3.3, pl0=56.0, d0=25.0)
        ipb = IpbConfig(alpha_fitted=3.3, pl0_db=56.0, d0_m=25.0, use_idw_correction=False)
        for _ in range(25):
            scenario, su = random_small_scenario(rng)
            want = optimal_power(scenario, su, model, CFG)
            got = ipb_allocate(scenario, su, CFG, ipb)
            assert got.is_granted == want.is_granted
            if want.is_granted:
                assert got.power_dbm == pytest.approx(want.power_dbm, abs=1e-6)

    def system_fixture(self, region, alpha_true):
        # long PU-to-PUR link (bias-correctable through the sensor at the
        # PUR), short SU-to-PUR link (small residual model error)
        model = LogDistanceParams(alpha=alpha_true, pl0_db=56.0, d0_m=25.0, shadowing_sigma_db=0.0, fading_amplitude_db=0.0)
        pu = make_pu(0, 150.0, 500.0, 0.0, [(440.0, 500.0)])
        su = SecondaryUser(0, Location(480.0, 500.0))
        sensor = SpectrumSensor(0, Location(440.0, 500.0))  # exactly at the PUR
        scenario = Scenario(region=region, pus=(pu,), sensors=(sensor,), sus=(su,))
        scenario = scenario.with_sensors(sensor_readings(scenario, model, CFG))
        return model, scenario, su

    def test_mismatched_alpha_bias_and_correction(self, region):
        model, scenario, su = self.system_fixture(region, alpha_true=3.6)
        truth = optimal_power(scenario, su, model, CFG).power_dbm
        plain = ipb_allocate(scenario, su, CFG, IpbConfig(alpha_fitted=3.3, pl0_db=56.0, d0_m=25.0))
        assert plain.is_granted
        err_plain = abs(plain.power_dbm - truth)
        assert err_plain > 0.5  # systematic exponent bias is visible
        corrected = ipb_allocate(
            scenario,
            su,
            CFG,
            IpbConfig(alpha_fitted=3.3, pl0_db=56.0, d0_m=25.0, use_idw_correction=True, idw_neighbors=1),
        )
        err_corr = abs(corrected.power_dbm - truth)
        assert err_corr < err_plain

    def test_correction_needs_enough_sensors(self, region):
        model, scenario, su = self.system_fixture(region, alpha_true=3.3)
        with pytest.raises(ValueError):
            ipb_allocate(scenario, su, CFG, IpbConfig(use_idw_correction=True, idw_neighbors=4))
