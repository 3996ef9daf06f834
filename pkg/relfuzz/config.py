"""Application configuration settings."""

from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, Optional

from pydantic import BaseModel, Field, model_validator
from pydantic_settings import BaseSettings


class Settings(BaseSettings):
    """Application settings loaded from environment variables."""

    # Logging
    LOG_LEVEL: str = "INFO"
    LOG_JSON: bool = False

    # Relation analysis
    ANALYSIS_T_LOSS: float = 0.05
    ANALYSIS_T_RESTORE: float = 0.2
    ANALYSIS_MAX_INVOCATIONS: int = 20000
    ANALYSIS_MAX_INPUT_LEN: int = 4096
    ANALYSIS_MAX_ROUNDS: int = 4
    ANALYSIS_FILLER: int = 0

    # Fuzzing campaign
    CAMPAIGN_TRIALS_PER_ENTRY: int = 512
    CAMPAIGN_HAVOC_MIN_DEPTH: int = 1
    CAMPAIGN_HAVOC_MAX_DEPTH: int = 8
    CAMPAIGN_MAX_INPUT_LEN: int = 4096
    CAMPAIGN_STATS_INTERVAL: float = 5.0

    class Config:
        env_file = ".env"
        case_sensitive = True
        extra = "ignore"  # Ignore extra fields in .env


# Global settings instance
settings = Settings()


# ============================================================================
# Resolved run configuration
# ============================================================================

class AnalysisThresholds(BaseModel):
    """Loss and restore fractions for the double-mutant predicates."""
    t_loss: float = Field(0.05, gt=0, le=1, description="Fraction of baseline coverage a probe must destroy")
    t_restore: float = Field(0.2, gt=0, le=1, description="Fraction of lost coverage an insertion must recover")

    class Config:
        frozen = True

    @property
    def loss_fraction(self) -> Fraction:
        return Fraction(str(self.t_loss))

    @property
    def restore_fraction(self) -> Fraction:
        return Fraction(str(self.t_restore))


class AnalysisConfig(BaseModel):
    """Limits and knobs for one analysis run."""
    thresholds: AnalysisThresholds = Field(default_factory=AnalysisThresholds)
    max_invocations: int = Field(20000, ge=1, description="Target execution budget")
    max_input_len: int = Field(4096, ge=1, description="Longer inputs are not analyzed")
    max_rounds: int = Field(4, ge=1, description="Fixpoint iteration cap")
    filler: int = Field(0, ge=0, le=255, description="Byte value used for restorative insertions")

    class Config:
        frozen = True


class CampaignConfig(BaseModel):
    """Everything a fuzzing campaign needs besides the target itself."""
    target: str = Field(..., min_length=1)
    out_dir: Path
    seed_dir: Optional[Path] = None
    rng_seed: int = 0
    max_execs: Optional[int] = Field(None, ge=1, description="Execution budget")
    max_seconds: Optional[float] = Field(None, gt=0, description="Wall-clock budget")
    frameshift_enabled: bool = True
    havoc_min_depth: int = Field(1, ge=1)
    havoc_max_depth: int = Field(8, ge=1)
    trials_per_entry: int = Field(512, ge=1)
    max_input_len: int = Field(4096, ge=1, description="Mutants never grow past this length")
    stats_interval: float = Field(5.0, gt=0)
    analysis: AnalysisConfig = Field(default_factory=AnalysisConfig)

    class Config:
        frozen = True

    @model_validator(mode="after")
    def check_budgets(self) -> "CampaignConfig":
        if self.max_execs is None and self.max_seconds is None:
            raise ValueError("at least one of max_execs or max_seconds must be set")
        if self.havoc_min_depth > self.havoc_max_depth:
            raise ValueError("havoc_min_depth exceeds havoc_max_depth")
        return self


def _drop_unset(overrides: Dict[str, Any]) -> Dict[str, Any]:
    return {k: v for k, v in overrides.items() if v is not None}


def resolve_analysis_config(**overrides: Any) -> AnalysisConfig:
    """
    Build an AnalysisConfig from settings defaults plus explicit overrides.

    Args:
        **overrides: AnalysisConfig fields, plus t_loss/t_restore; None means unset

    Returns:
        Validated AnalysisConfig

    Raises:
        pydantic.ValidationError: If a value violates its constraint
    """
    values = _drop_unset(overrides)
    thresholds = AnalysisThresholds(
        t_loss=values.pop("t_loss", settings.ANALYSIS_T_LOSS),
        t_restore=values.pop("t_restore", settings.ANALYSIS_T_RESTORE),
    )
    base = {
        "max_invocations": settings.ANALYSIS_MAX_INVOCATIONS,
        "max_input_len": settings.ANALYSIS_MAX_INPUT_LEN,
        "max_rounds": settings.ANALYSIS_MAX_ROUNDS,
        "filler": settings.ANALYSIS_FILLER,
    }
    base.update(values)
    return AnalysisConfig(thresholds=thresholds, **base)


def resolve_campaign_config(analysis: AnalysisConfig, **overrides: Any) -> CampaignConfig:
    """
    Build a CampaignConfig from settings defaults plus explicit overrides.

    Args:
        analysis: Resolved analysis configuration
        **overrides: CampaignConfig fields; None means unset

    Returns:
        Validated CampaignConfig

    Raises:
        pydantic.ValidationError: If a value violates its constraint
    """
    base = {
        "trials_per_entry": settings.CAMPAIGN_TRIALS_PER_ENTRY,
        "havoc_min_depth": settings.CAMPAIGN_HAVOC_MIN_DEPTH,
        "havoc_max_depth": settings.CAMPAIGN_HAVOC_MAX_DEPTH,
        "max_input_len": settings.CAMPAIGN_MAX_INPUT_LEN,
        "stats_interval": settings.CAMPAIGN_STATS_INTERVAL,
    }
    base.update(_drop_unset(overrides))
    return CampaignConfig(analysis=analysis, **base)
