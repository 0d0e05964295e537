"""Seeded, replicated experiment execution."""
from varbandit.harness.bai import BaiResult, build_bai_setup, run_bai_experiment
from varbandit.harness.casestudy import CaseStudyResult, run_case_study
from varbandit.harness.config import ExperimentConfig, load_config, validate
from varbandit.harness.regret import RegretResult, RunRecord, run_regret_experiment
from varbandit.harness.seeding import derive_seed
from varbandit.harness.sweep import evaluate_bound, run_bound_sweep

__all__ = [
    "BaiResult",
    "CaseStudyResult",
    "ExperimentConfig",
    "RegretResult",
    "RunRecord",
    "build_bai_setup",
    "derive_seed",
    "evaluate_bound",
    "load_config",
    "run_bai_experiment",
    "run_bound_sweep",
    "run_case_study",
    "run_regret_experiment",
    "validate",
]
