"""Aircraft maintenance routing and crew pairing over a cyclic week."""

from .generate import generate_instance
from .instance import (
    Airport,
    Connection,
    ConnectionKind,
    CostWeights,
    FlightLeg,
    FlyingLimitBand,
    Instance,
    InstanceError,
    InstanceFormatError,
    InstanceValidationError,
    RulesConfig,
    build_connections,
    classify_connection,
    dumps_instance,
    instance_from_dict,
    instance_to_dict,
    load_instance,
    save_instance,
)
from .integrated import IntegratedResult, solve_integrated
from .pairing import PairingAlgebra, PairingResult, solve_crew_pairing
from .rcsp import (
    AdditiveCapacityAlgebra,
    BoundSets,
    RcspGraph,
    ResourceAlgebra,
    StateGraph,
    brute_force_oracle,
    build_state_graph,
    compute_bounds,
    enumerate_within,
    resolve_kappa,
    solve,
    update_bounds,
)
from .routing import (
    RoutingResult,
    build_routing_graph,
    minimize_aircraft,
    solve_routing,
)

__version__ = "0.1.0"

__all__ = [
    "Airport",
    "Connection",
    "ConnectionKind",
    "CostWeights",
    "FlightLeg",
    "FlyingLimitBand",
    "Instance",
    "InstanceError",
    "InstanceFormatError",
    "InstanceValidationError",
    "RulesConfig",
    "build_connections",
    "classify_connection",
    "dumps_instance",
    "instance_from_dict",
    "instance_to_dict",
    "load_instance",
    "save_instance",
    "generate_instance",
    "IntegratedResult",
    "solve_integrated",
    "PairingAlgebra",
    "PairingResult",
    "solve_crew_pairing",
    "AdditiveCapacityAlgebra",
    "BoundSets",
    "RcspGraph",
    "ResourceAlgebra",
    "StateGraph",
    "brute_force_oracle",
    "build_state_graph",
    "compute_bounds",
    "enumerate_within",
    "resolve_kappa",
    "solve",
    "update_bounds",
    "RoutingResult",
    "build_routing_graph",
    "minimize_aircraft",
    "solve_routing",
    "__version__",
]
