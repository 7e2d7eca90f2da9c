from .runner import (
    ReplicatePool as ReplicatePool,
    run_replicates as run_replicates,
    run_replicates_blocking as run_replicates_blocking,
)
