"""Equivariant Lagrangian curve-flow lab.

Simulates the plane-curve reduction of equivariant Lagrangian mean curvature
flow: normal velocity equal to curvature minus the angular forcing from the
swept surface.  The package builds special curves (self-shrinking and
self-expanding profiles, immersed wedge curves with prescribed loop area,
origin-pinned embedded profiles), integrates the flow through loop-collapse
surgeries, and checks the monotone quantities that govern the singularity
mechanism.
"""

from .curves import (
    EquivariantProfile,
    PlanarCurve,
    frames,
    h_length,
    hausdorff_distance,
    lagrangian_angle,
    liouville_primitive,
    resample,
    rotation_index,
)
from .diagnostics import (
    CheckReport,
    DensityQuery,
    DensityResult,
    angle_jump_tracker,
    beta_theta_invariant,
    density_monotonicity_check,
    expander_closeness,
    gaussian_density,
    intersection_count_series,
    loop_area_law_check,
    singular_time_bound_check,
)
from .errors import LmcfLabError, ScenarioConfigError
from .flow import (
    FlowComponent,
    FlowConfig,
    FlowState,
    as_component,
    initial_state,
    loop_area_rate,
    run,
    velocity_field,
)
from .intersections import extract_loops, self_intersections
from .profiles import (
    ExpanderSpec,
    WhitneySpec,
    expander_profile,
    lawlor_profile,
    ray,
    sigma_curve,
    whitney_curve,
)
from .render import RenderStyle, emit_svg
from .scenarios import (
    Scenario,
    ScenarioOutcome,
    bundled_scenario_ids,
    load_bundled,
    parse_scenario,
    run_scenario,
    scenario_to_toml,
)

__version__ = "0.1.0"

__all__ = [
    "CheckReport",
    "DensityQuery",
    "DensityResult",
    "EquivariantProfile",
    "ExpanderSpec",
    "FlowComponent",
    "FlowConfig",
    "FlowState",
    "LmcfLabError",
    "PlanarCurve",
    "RenderStyle",
    "Scenario",
    "ScenarioConfigError",
    "ScenarioOutcome",
    "WhitneySpec",
    "angle_jump_tracker",
    "as_component",
    "beta_theta_invariant",
    "bundled_scenario_ids",
    "density_monotonicity_check",
    "emit_svg",
    "expander_closeness",
    "expander_profile",
    "extract_loops",
    "frames",
    "gaussian_density",
    "h_length",
    "hausdorff_distance",
    "initial_state",
    "intersection_count_series",
    "lagrangian_angle",
    "lawlor_profile",
    "liouville_primitive",
    "load_bundled",
    "loop_area_law_check",
    "loop_area_rate",
    "parse_scenario",
    "ray",
    "resample",
    "rotation_index",
    "run",
    "run_scenario",
    "scenario_to_toml",
    "self_intersections",
    "sigma_curve",
    "singular_time_bound_check",
    "velocity_field",
    "whitney_curve",
]
