"""Covering selections, packing bounds and gauge-fine Riemann-sum integration
on finite-dimensional normed spaces."""

from .errors import (ContractError, CoverConstructionError, InputError,
                     UnsupportedMeasureError)
from .geometry import (Ball, Interval, MorseSet, Segment, Space, StarPolytope,
                       closed_ball, interior_contains, make_star,
                       morse_closure, morse_contains, morse_diameter,
                       morse_scale, norm_eval, open_ball, segment_interior,
                       star_polytope, tagged_interval, validate_morse)
from .covering import (Partition, PackingWitness, SatelliteConfig,
                       TaggedFamily, greedy_select, heavy_subfamily,
                       is_satellite_config, kappa_bound, packing_count,
                       partition_disjoint, satellite_search, sets_intersect)
from .measure import (AeCover, MeasurableRegion, RadonMeasure, RBall, RBox,
                      ae_cover, approx_cont_defect, diff_quotient, measure_of,
                      region_contains)
from .families import (ClosedBallFamily, CoverFamily, IntervalFamily,
                       OpenBallFamily, StarFamily, TiledCover,
                       family_from_spec, tile_cover)
from .integrate import (Gauge, Integrand, IntegralCertificate,
                        builtin_integrand, expression_integrand,
                        gauge_section5, integrate, lebesgue_point_gauge,
                        pv_counterexample, pv_sweep, riemann_sum,
                        uniform_bound_probe)

__version__ = "0.1.0"
