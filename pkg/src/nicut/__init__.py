"""nicut: noninterference checking for multi-domain transitive policies.

Verifies pointwise/setwise nondeducibility on inputs, generalized
noninterference, and their cut / high-up / low-down coalition reductions on
finite nondeterministic input-enabled systems, producing certified witnesses
for every insecure verdict.
"""

from .errors import NicutError
from .model import (
    Run,
    SystemDef,
    View,
    abs_concat,
    compute_view,
    enumerate_runs,
    enumerate_views,
    runs_on_sequence,
    validate_system,
)
from .notions import (
    Bounds,
    CutFamily,
    Direction,
    GnVulnerability,
    NdiVulnerability,
    NotionId,
    PurgeVulnerability,
    Status,
    Verdict,
    check_cut_family,
    check_gn_pair,
    check_gn_pw,
    check_ndi_pw,
    check_ndi_sw,
    check_notion,
    check_p_secure,
    profile,
    purge,
    revalidate_vulnerability,
)
from .policy import (
    Abstraction,
    CoalitionObs,
    Cut,
    Policy,
    abstract_policy,
    abstract_system,
    all_cuts,
    closure,
    high_up_cut,
    interferers,
    low_down_cut,
    noninterferers,
    project_view,
    successors,
    validate_policy,
)
from .analysis import (
    Compatibility,
    brute_force_compatible,
    exists_run_with_view,
    is_compatible,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
