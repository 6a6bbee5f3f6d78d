import math
import os
import sys
from dataclasses import replace

import numpy as np
import orjson
import pytest

sys.path.append(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))

from config.scenario_config import (
    HCNSettings,
    dump_scenario,
    figure_preset,
    load_scenario,
    preset_path,
    scenario_from_dict,
)
from core.errors import ConfigValidationError
from core.interference import XiVariant
from core.model import FadingModel, NetworkConfig, PathLossModel, TierConfig
from utils.report_generator import ValidationReport
from utils.validation import IssueType, NetworkValidator, Severity, validate_network


def base_tier(**overrides) -> TierConfig:
    params = dict(power=1.0, intensity=1.0, pathloss=PathLossModel(alpha=3.0), fading=FadingModel(m=5.0))
    params.update(overrides)
    return TierConfig(**params)


def issue_of(cfg: NetworkConfig) -> IssueType:
    with pytest.raises(ConfigValidationError) as info:
        validate_network(cfg)
    return info.value.issue_type


def test_presets_are_valid():
    """Presets das figuras passam em todas as verificações"""
    for n_tiers in (2, 3):
        result = NetworkValidator().validate(figure_preset(n_tiers))
        print(f"{n_tiers} camadas: {result.summary()}")
        assert result.is_valid
        assert not result.critical_issues


def test_rejects_structure_violations():
    assert issue_of(NetworkConfig(tiers=())) is IssueType.NO_TIERS
    assert issue_of(NetworkConfig(tiers=(base_tier(),), noise=-1.0)) is IssueType.NEGATIVE_NOISE
    assert issue_of(NetworkConfig(tiers=(base_tier(),), processing_gain=0.5)) is IssueType.PROCESSING_GAIN_BELOW_ONE


@pytest.mark.parametrize("field,issue", [
    ("power", IssueType.NON_POSITIVE_POWER),
    ("intensity", IssueType.NON_POSITIVE_INTENSITY),
    ("bias", IssueType.NON_POSITIVE_BIAS),
])
def test_rejects_non_positive_tier_parameters(field, issue):
    cfg = NetworkConfig(tiers=(base_tier(), base_tier(**{field: 0.0})))
    with pytest.raises(ConfigValidationError) as info:
        validate_network(cfg)
    assert info.value.issue_type is issue
    assert info.value.tier == 1
    assert issue.value in str(info.value)


def test_rejects_pathloss_violations():
    assert issue_of(NetworkConfig(tiers=(base_tier(pathloss=PathLossModel(alpha=1.5)),))) is IssueType.PATHLOSS_EXPONENT
    assert issue_of(NetworkConfig(tiers=(base_tier(pathloss=PathLossModel(alpha=2.0)),))) is IssueType.PATHLOSS_EXPONENT

    unknown = PathLossModel(alpha=3.0, family="log_distance")
    assert issue_of(NetworkConfig(tiers=(base_tier(pathloss=unknown),))) is IssueType.UNKNOWN_PATHLOSS_FAMILY

    bumpy = PathLossModel(alpha=3.0, family="custom", gain_fn=lambda t: (1.0 + 0.5 * math.sin(t)) / (1.0 + t ** 3))
    assert issue_of(NetworkConfig(tiers=(base_tier(pathloss=bumpy),))) is IssueType.PATHLOSS_NOT_MONOTONE


def test_rejects_fading_violations():
    assert issue_of(NetworkConfig(tiers=(base_tier(fading=FadingModel(m=0.0)),))) is IssueType.FADING_SHAPE

    unnormalized = FadingModel(
        family="custom",
        density_fn=lambda h: 2.0 * math.exp(-h),
        sampler_fn=lambda rng, n: rng.exponential(1.0, n),
        custom_moments=(1.0, 2.0, 6.0)
    )
    assert issue_of(NetworkConfig(tiers=(base_tier(fading=unnormalized),))) is IssueType.FADING_DENSITY_NORMALIZATION

    jensen = replace(unnormalized, density_fn=lambda h: math.exp(-h), custom_moments=(1.0, 0.5, 6.0))
    assert issue_of(NetworkConfig(tiers=(base_tier(fading=jensen),))) is IssueType.FADING_JENSEN

    mismatch = replace(unnormalized, density_fn=lambda h: math.exp(-h), custom_moments=(1.0, 2.0, 7.0))
    assert issue_of(NetworkConfig(tiers=(base_tier(fading=mismatch),))) is IssueType.FADING_MOMENT_MISMATCH


def test_custom_exponential_fading_is_accepted():
    exponential = FadingModel(
        family="custom",
        density_fn=lambda h: math.exp(-h),
        sampler_fn=lambda rng, n: rng.exponential(1.0, n),
        custom_moments=(1.0, 2.0, 6.0)
    )
    cfg = NetworkConfig(tiers=(base_tier(fading=exponential),))
    assert validate_network(cfg) is cfg


def test_biased_sampler_is_only_a_warning():
    biased = FadingModel(
        family="custom",
        density_fn=lambda h: math.exp(-h),
        sampler_fn=lambda rng, n: rng.exponential(3.0, n),
        custom_moments=(1.0, 2.0, 6.0)
    )
    result = NetworkValidator(sampler_draws=5000).validate(NetworkConfig(tiers=(base_tier(fading=biased),)))
    assert result.is_valid
    assert [i.type for i in result.warning_issues] == [IssueType.FADING_SAMPLER]
    assert result.warning_issues[0].severity is Severity.WARNING


def test_sampler_with_right_mean_but_wrong_spread_is_flagged():
    """Amostrador determinístico: m1 confere, m2 e m3 não"""
    constant = FadingModel(
        family="custom",
        density_fn=lambda h: math.exp(-h),
        sampler_fn=lambda rng, n: np.ones(n),
        custom_moments=(1.0, 2.0, 6.0)
    )
    result = NetworkValidator(sampler_draws=2000).validate(NetworkConfig(tiers=(base_tier(fading=constant),)))
    assert result.is_valid
    assert [i.type for i in result.warning_issues] == [IssueType.FADING_SAMPLER]
    description = result.warning_issues[0].description
    print(description)
    assert "m2" in description and "m3" in description
    assert "m1" not in description


def test_load_preset_files():
    three = load_scenario(preset_path(3))
    assert three.name == "fig_3tier"
    assert three.K == 3
    assert [t.power for t in three.tiers] == [16.0, 4.0, 1.0]
    assert [t.intensity for t in three.tiers] == pytest.approx([0.1, 1.0, 5.0])
    assert three.processing_gain == 25.0
    assert three.noise == 0.0
    assert all(t.fading.m == 5.0 for t in three.tiers)

    two = load_scenario(preset_path(2))
    assert [t.power for t in two.tiers] == [4.0, 1.0]


def test_figure_preset_scales_intensities():
    cfg = figure_preset(3, alpha=4.0, kappa=2.0)
    assert [t.intensity for t in cfg.tiers] == pytest.approx([0.2, 2.0, 10.0])
    assert all(t.pathloss.alpha == 4.0 for t in cfg.tiers)
    assert cfg.name == "fig_3tier_a4_k2"

    with pytest.raises(ConfigValidationError):
        figure_preset(4)


def test_scenario_document_errors(tmp_path):
    doc = orjson.loads(preset_path(2).read_bytes())

    missing = dict(doc, tiers=[{k: v for k, v in doc["tiers"][0].items() if k != "power"}])
    with pytest.raises(ConfigValidationError) as info:
        scenario_from_dict(missing)
    assert info.value.issue_type is IssueType.MISSING_FIELD

    unknown = orjson.loads(preset_path(2).read_bytes())
    unknown["tiers"][1]["fading"] = {"family": "lognormal", "sigma": 8.0}
    with pytest.raises(ConfigValidationError) as info:
        scenario_from_dict(unknown)
    assert info.value.issue_type is IssueType.UNKNOWN_FADING_FAMILY

    zero = orjson.loads(preset_path(2).read_bytes())
    zero["tiers"][0]["intensity"] = 0.0
    bad_file = tmp_path / "zero_intensity.json"
    bad_file.write_bytes(orjson.dumps(zero))
    with pytest.raises(ConfigValidationError) as info:
        load_scenario(bad_file)
    assert info.value.issue_type is IssueType.NON_POSITIVE_INTENSITY

    broken = tmp_path / "broken.json"
    broken.write_text("{ not json", encoding="utf-8")
    with pytest.raises(ConfigValidationError) as info:
        load_scenario(broken)
    assert info.value.issue_type is IssueType.MALFORMED_DOCUMENT

    with pytest.raises(ConfigValidationError):
        load_scenario(tmp_path / "missing.json")


def test_dump_and_load_scenario(tmp_path):
    cfg = figure_preset(3, kappa=0.5)
    path = dump_scenario(cfg, tmp_path / "scenario.json")
    loaded = load_scenario(path)
    assert loaded == cfg
    assert loaded.name == cfg.name


def test_settings_from_yaml(settings_file, tmp_path):
    settings = HCNSettings(settings_file)
    outage = settings.outage_settings()
    assert outage.grid_points == 30
    assert outage.capacity_tol == pytest.approx(1e-3)
    assert outage.outer.rel_tol == pytest.approx(1e-4)
    assert outage.variant is XiVariant.PRINTED
    assert settings.outage_settings("xi-campbell").variant is XiVariant.CAMPBELL
    assert settings.simulation["max_window_radius"] == 6.0
    # Seções ausentes no arquivo caem no padrão
    assert settings.sweep("fig1")["gamma"] == 0.15

    defaults = HCNSettings(tmp_path / "nowhere.yml")
    assert defaults.outage_settings().grid_points == 200

    with pytest.raises(ConfigValidationError):
        settings.sweep("fig9")


def test_repository_settings_file():
    settings = HCNSettings()
    assert settings.outage_settings().capacity_tol == pytest.approx(1e-4)
    assert settings.sweep("fig2")["gamma_points"] == 15
    assert settings.sweep("fig1")["variant"] == "xi-campbell"
    assert settings.logging == {"level": "INFO", "log_dir": "logs"}


def test_logging_section(tmp_path):
    path = tmp_path / "hcn_settings.yml"
    path.write_text("logging:\n  level: debug\n  dir: saida/logs\n", encoding="utf-8")
    assert HCNSettings(path).logging == {"level": "DEBUG", "log_dir": "saida/logs"}

    path.write_text("logging:\n  level: verbose\n", encoding="utf-8")
    with pytest.raises(ConfigValidationError):
        HCNSettings(path).logging


def test_validation_report_determinism(tmp_path):
    def build() -> ValidationReport:
        report = ValidationReport(scenario="fig_2tier", seed=7, trials=100)
        report.add("association_sum", 1e-9, 1e-6, True, p_star=[0.4, 0.6])
        report.add("gaussian_band_xi-campbell_tier_1_r_0.5", 0.02, 0.0, False, enforced=False)
        report.add("outage_containment_tau_0.3", -0.01, 0.0, True, stderr=math.nan)
        return report

    first, second = build(), build()
    assert first.to_json() == second.to_json()
    assert first.passed
    assert first.summary()["total_checks"] == 3

    path = first.save(tmp_path / "report.json")
    assert path.read_bytes() == second.to_json()
    assert orjson.loads(path.read_bytes())["checks"][2]["details"]["stderr"] == "nan"

    second.add("outage_monotone_in_tau", 0.1, 0.0, False)
    assert not second.passed
    assert [c.name for c in second.failed] == ["outage_monotone_in_tau"]
