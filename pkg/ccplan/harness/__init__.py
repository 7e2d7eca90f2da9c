from .config import RunConfig as RunConfig, build_model as build_model, resolve_config as resolve_config
from .results import RunResult as RunResult
from .runner import check_result as check_result, run_replicate as run_replicate, run_replicates as run_replicates
