"""Horospherical Cauchy transforms between the complex unit sphere quadric and
the complex null cone: forward and dual transforms, holomorphic Fourier
components, harmonic projectors, a spectral inversion operator with measured
calibration, and the hyperboloid (Lorentzian) restriction.
"""

from .errors import (
    ConfigError,
    DomainError,
    FeatureError,
    HorocauchyError,
    NumericalError,
    ValidationError,
)
from .geometry import (
    ComplexRotation,
    ConePoint,
    HyperboloidPoint,
    QuadraticSpace,
    SpherePoint,
    complex_rotation,
    cone_point,
    cone_point_from_frame,
    delta,
    euclidean_space,
    hyperboloid_point,
    in_xi_s,
    lorentzian_space,
    pair,
    random_complex_rotation,
    random_cone_point,
    random_null_vector,
    random_real_rotation,
    random_real_sphere_point,
    rotation_from_generator,
    sphere_point,
)
from .cycles import (
    Cycle,
    FormSpec,
    horosphere_separation,
    integrate,
    l_cycle,
    nu_form,
    omega_form,
    pullback_densities,
    pullback_density,
    rotate_cycle,
    standard_sphere_cycle,
)
from .testfunctions import (
    Bump,
    Constant,
    HarmonicCombo,
    NullHarmonic,
    RationalKernel,
    evaluate,
    null_vector,
    parse_test_function,
    random_band_limited,
    random_null_harmonic,
)
from .transforms import (
    TransformContext,
    dual,
    dual_extended,
    forward,
    forward_extended,
    fourier_component,
    projector,
    projector_series,
    series_sum,
    standard_context,
)
from .spectral import (
    CalibrationReport,
    EllOperator,
    calibrate,
    eigenvalue_by_finite_differences,
    eigenvalue_from_coefficients,
    ell_eigenvalue,
    invert,
    reconstruct_batch,
)
from .hyperbolic import (
    HGrid,
    XiHPoint,
    boundary_value,
    experimental_inversion,
    hyperbolic_cycle,
    hyperbolic_dual,
    hyperbolic_forward,
    hyperboloid_patch_cycle,
    lorentz_boost,
    lorentz_rotation,
    random_lorentz,
)

__version__ = "0.1.0"
