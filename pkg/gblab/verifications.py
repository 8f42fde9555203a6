"""Verification suites: each one recomputes a family of identities and records a :class:`Check` per result.

A suite never raises for a bad numerical outcome. A failed comparison is a failed check, and
a library error while computing one (a kernel, a truncated fiber, ...) becomes a failed
check carrying the error message, so a run always produces a complete report.
"""

import dataclasses
import itertools
import logging
import math
import time
from collections.abc import Callable
from collections.abc import Iterable
from collections.abc import Iterator
from concurrent.futures import ThreadPoolExecutor
from typing import Final

import numpy as np
from scipy.stats import special_ortho_group

from gblab.angles import hazzidakis_boundary_rhs
from gblab.angles import hazzidakis_rhs
from gblab.angles import planar_solid_angle
from gblab.angles import solid_angles
from gblab.angles import volume_bound
from gblab.chains import Chain
from gblab.chains import betti_numbers
from gblab.chains import beta_action
from gblab.chains import boundary
from gblab.chains import boundary_class
from gblab.chains import boundary_matrix
from gblab.chains import cells
from gblab.chains import duality_pairing
from gblab.chains import fiber_class
from gblab.chains import fiber_part
from gblab.chains import fundamental_cycle
from gblab.chains import homology
from gblab.chains import is_cycle
from gblab.config import SUITES
from gblab.config import ComplexSettings
from gblab.config import FlatformSettings
from gblab.config import FormsSettings
from gblab.config import FramesSettings
from gblab.config import HazzidakisSettings
from gblab.config import PfaffianSettings
from gblab.config import RunConfig
from gblab.config import ThomSettings
from gblab.errors import CommutationError
from gblab.errors import DimensionError
from gblab.errors import GBLabError
from gblab.errors import KernelError
from gblab.fixtures import CLOSED_SURFACES
from gblab.fixtures import ball_boundary
from gblab.fixtures import cap_boundary
from gblab.fixtures import disk_boundary
from gblab.fixtures import flat_box
from gblab.fixtures import flat_torus
from gblab.fixtures import hyperbolic_plane
from gblab.fixtures import round_sphere
from gblab.fixtures import sphere_in_space
from gblab.fixtures import sphere_volume_quadrature
from gblab.flatform import FlatBilinearTensor
from gblab.flatform import degenerate
from gblab.flatform import diagonalize
from gblab.flatform import flatness_residual
from gblab.flatform import planted
from gblab.flatform import pseudosphere_instance
from gblab.flatform import recovery_error
from gblab.forms import ChartGrid
from gblab.forms import MixedForm
from gblab.forms import boundary_fiber_integrate
from gblab.forms import exterior_derivative
from gblab.forms import fiber_integrate
from gblab.forms import integrate
from gblab.frames import bianchi_residual
from gblab.frames import constant_curvature_residual
from gblab.frames import curvature
from gblab.frames import euler_form
from gblab.frames import gauss_equation_residual
from gblab.frames import principal_frame_residuals
from gblab.frames import signed_average_euler
from gblab.group import GroupElement
from gblab.group import character_sum
from gblab.pfaffian import SkewMatrix
from gblab.pfaffian import pfaffian
from gblab.pfaffian import pfaffian_by_definition
from gblab.pfaffian import pfaffian_by_expansion
from gblab.pfaffian import sphere_volume
from gblab.pseudosphere import DEFAULT_RECTANGLE
from gblab.pseudosphere import Rectangle
from gblab.pseudosphere import chebyshev_curvature_residual
from gblab.pseudosphere import convergence_table
from gblab.pseudosphere import corner_angle_fractions
from gblab.pseudosphere import gauss_bonnet_closed
from gblab.pseudosphere import hazzidakis_corner_sum
from gblab.pseudosphere import hyperbolic_area
from gblab.pseudosphere import one_soliton
from gblab.pseudosphere import principal_frame_data
from gblab.pseudosphere import sine_gordon_residual
from gblab.report import Check
from gblab.report import Report
from gblab.report import merge
from gblab.thom import SectionField
from gblab.thom import geodesic_curvature
from gblab.thom import geodesic_curvature_by_rays
from gblab.thom import geodesic_curvature_even
from gblab.thom import geodesic_curvature_odd
from gblab.thom import rotation_index_limit
from gblab.thom import thom_normalization
from gblab.thom import transgression_check

logger = logging.getLogger(__name__)

ROUNDOFF: Final[float] = 1e-12
PSEUDOSPHERE_ANGLE: Final[float] = 0.6
RECTANGLE_RESOLUTION: Final[int] = 129

CheckSource = Callable[[], Iterable[Check]]


def _run(report: Report, name: str, source: CheckSource) -> None:
    try:
        checks = list(source())
    except GBLabError as err:
        logger.warning("%s: %s raised %s", report.suite, name, err)
        report.add(Check.failure(name, err))
        return
    report.extend(checks)


def _expect_error(name: str, error: type[GBLabError], action: Callable[..., object], *args: object) -> Check:
    """A check that passes when ``action(*args)`` raises ``error``."""
    try:
        action(*args)
    except error as err:
        return Check(name, None, None, None, True, f"{type(err).__name__}: {err}")
    return Check(name, None, None, None, False, f"expected {error.__name__}")


def _rng(config: RunConfig, suite: str) -> np.random.Generator:
    return np.random.default_rng((config.seed, SUITES.index(suite)))


# pfaffian


def _pfaffian_squares(settings: PfaffianSettings, rng: np.random.Generator) -> Iterator[Check]:
    for dim in range(2, settings.max_dim + 1, 2):
        worst = 0.0
        for _ in range(settings.samples):
            skew = SkewMatrix.random(dim, rng)
            value = pfaffian(skew)
            det = float(np.linalg.det(skew.entries))
            worst = max(worst, abs(value * value - det) / max(abs(det), 1.0))
        yield Check.at_most(f"pf_squared_dim{dim}", worst, settings.tolerance, f"{settings.samples} samples")


def _pfaffian_conjugation(settings: PfaffianSettings, rng: np.random.Generator) -> Iterator[Check]:
    for dim in range(2, settings.max_dim + 1, 2):
        worst = 0.0
        for _ in range(settings.samples):
            skew = SkewMatrix.random(dim, rng)
            value = pfaffian(skew)
            rotation = np.asarray(special_ortho_group.rvs(dim=dim, random_state=rng), dtype=float)
            reflection = rotation.copy()
            reflection[0] *= -1.0
            scale = max(abs(value), 1.0)
            worst = max(
                worst,
                abs(pfaffian(skew.conjugate(rotation)) - value) / scale,
                abs(pfaffian(skew.conjugate(reflection)) + value) / scale,
            )
        yield Check.at_most(f"conjugation_dim{dim}", worst, settings.conjugation_tolerance)


def _pfaffian_definitions(settings: PfaffianSettings, rng: np.random.Generator) -> Iterator[Check]:
    for dim in (2, 4, 6):
        worst = 0.0
        for _ in range(settings.samples):
            skew = SkewMatrix.random(dim, rng)
            expansion = pfaffian_by_expansion(skew)
            worst = max(worst, abs(pfaffian_by_definition(skew) - expansion) / max(abs(expansion), 1.0))
        yield Check.at_most(f"definition_dim{dim}", worst, settings.definition_tolerance)
    values = rng.uniform(-2.0, 2.0, size=settings.max_dim // 2)
    block = pfaffian(SkewMatrix.from_blocks(values))
    yield Check.close("block_product", block, float(np.prod(values)), settings.tolerance)
    yield _expect_error("odd_dimension", DimensionError, pfaffian, SkewMatrix.random(3, rng))


def verify_pfaffian(config: RunConfig) -> Report:
    """``Pf(A)^2 = det(A)``, conjugation invariance and agreement of the two expansions."""
    settings = config.pfaffian
    rng = _rng(config, "pfaffian")
    report = Report("pfaffian")
    _run(report, "pf_squared", lambda: _pfaffian_squares(settings, rng))
    _run(report, "conjugation", lambda: _pfaffian_conjugation(settings, rng))
    _run(report, "definition", lambda: _pfaffian_definitions(settings, rng))
    return report


# forms


def _sphere_volumes(settings: FormsSettings) -> Iterator[Check]:
    for n in (2, 3, 4):
        yield Check.close(
            f"sphere_volume_n{n}",
            sphere_volume_quadrature(n, settings.resolution),
            sphere_volume(n),
            settings.sphere_tolerance,
        )


def _d_squared(settings: FormsSettings) -> Iterator[Check]:
    plane = ChartGrid.uniform(2, 0.0, 1.0, settings.derivative_resolution)
    x, y = plane.coordinates()
    function = MixedForm.scalar(plane, 0, np.sin(3.0 * x) * np.exp(y) + x * y**2)
    yield Check.at_most(
        "d_squared_function",
        exterior_derivative(exterior_derivative(function)).max_abs(),
        settings.derivative_tolerance,
    )
    space = ChartGrid.uniform(3, 0.0, 1.0, settings.derivative_resolution)
    u, v, w = space.coordinates()
    one_form = (
        MixedForm.monomial(space, 0, (0,), (), np.cos(u * v) + w)
        + MixedForm.monomial(space, 0, (1,), (), u * np.exp(w))
        + MixedForm.monomial(space, 0, (2,), (), np.sin(u + 2.0 * v))
    )
    yield Check.at_most(
        "d_squared_one_form",
        exterior_derivative(exterior_derivative(one_form)).max_abs(),
        settings.derivative_tolerance,
    )


def _fiber_stokes(settings: FormsSettings) -> Iterator[Check]:
    # quadratic in the fiber variable, so the one-sided differences and the quadrature are exact
    grid = ChartGrid.uniform(2, 0.0, 1.0, settings.derivative_resolution)
    x, t = grid.coordinates()
    theta = MixedForm.monomial(grid, 0, (0,), (), np.sin(x) * t**2) + MixedForm.monomial(
        grid, 0, (1,), (), np.cos(x) * (1.0 + t)
    )
    lhs = fiber_integrate(exterior_derivative(theta), (1,), decay_tol=None)
    inner = fiber_integrate(theta, (1,), decay_tol=None)
    rhs = exterior_derivative(inner) - boundary_fiber_integrate(theta, (1,))
    yield Check.at_most("fiber_stokes", (lhs - rhs).max_abs(), settings.stokes_tolerance)


def verify_forms(config: RunConfig) -> Report:
    """Sphere volumes by quadrature, ``d^2 = 0`` and Stokes for fiber integration."""
    settings = config.forms
    report = Report("forms")
    _run(report, "sphere_volume", lambda: _sphere_volumes(settings))
    _run(report, "d_squared", lambda: _d_squared(settings))
    _run(report, "fiber_stokes", lambda: _fiber_stokes(settings))
    return report


# frames


def _gauss_bonnet(settings: FramesSettings) -> Iterator[Check]:
    for name, chi in CLOSED_SURFACES.items():
        value = gauss_bonnet_closed(name, settings.resolution)
        tolerance = settings.gauss_bonnet_tolerance if chi else settings.flat_tolerance
        yield Check.close(f"gauss_bonnet_{name}", value, float(chi), tolerance)


def _constant_curvature(settings: FramesSettings) -> Iterator[Check]:
    sphere = round_sphere(settings.resolution)
    yield Check.at_most(
        "constant_curvature_sphere",
        constant_curvature_residual(sphere, 1.0),
        settings.curvature_tolerance,
    )
    yield Check.at_most(
        "constant_curvature_hyperbolic",
        constant_curvature_residual(hyperbolic_plane(settings.resolution), -1.0),
        settings.curvature_tolerance,
    )
    yield Check.at_most("flat_torus_curvature", curvature(flat_torus()).max_abs(), settings.flat_tolerance)
    signed = signed_average_euler(sphere) - euler_form(curvature(sphere))
    yield Check.at_most("signed_average_euler", signed.max_abs(), settings.flat_tolerance)


def _hypersurface(settings: FramesSettings) -> Iterator[Check]:
    surface = sphere_in_space(settings.hypersurface_resolution)
    ambient = surface.ambient_connection()
    form, operator = gauss_equation_residual(ambient, surface.boundary_connection())
    yield Check.at_most("gauss_equation_form", form, settings.flat_tolerance)
    yield Check.at_most("gauss_equation_operator", operator, settings.curvature_tolerance)
    yield Check.at_most("bianchi_ambient", bianchi_residual(ambient), settings.flat_tolerance)


def _principal_frame(settings: FramesSettings) -> Iterator[Check]:
    frame = principal_frame_data(one_soliton(1.0, DEFAULT_RECTANGLE, settings.principal_resolution))
    residuals = principal_frame_residuals(frame.data, frame.connection, frame.normal_forms)
    for key, value in residuals.as_dict().items():
        if value is not None:
            yield Check.at_most(f"principal_{key}", value, settings.curvature_tolerance)


def verify_frames(config: RunConfig) -> Report:
    """Gauss-Bonnet on closed surfaces, constant curvature fixtures, Gauss equation and principal frames."""
    settings = config.frames
    report = Report("frames")
    _run(report, "gauss_bonnet", lambda: _gauss_bonnet(settings))
    _run(report, "constant_curvature", lambda: _constant_curvature(settings))
    _run(report, "hypersurface", lambda: _hypersurface(settings))
    _run(report, "principal", lambda: _principal_frame(settings))
    return report


# thom


def _normalization(settings: ThomSettings) -> Iterator[Check]:
    for n, resolution in enumerate(settings.normalization_resolutions, start=1):
        yield Check.close(
            f"normalization_n{n}",
            thom_normalization(n, resolution),
            1.0,
            settings.normalization_tolerance,
            f"resolution {resolution}",
        )


def _rotation_indices(settings: ThomSettings) -> Iterator[Check]:
    conn = flat_box(2, settings.resolution)
    x, y = conn.grid.coordinates()
    for name, field, expected in (
        ("rotation_index_source", SectionField.of(conn.grid, (x, y)), 1.0),
        ("rotation_index_saddle", SectionField.of(conn.grid, (x, -y)), -1.0),
    ):
        value = rotation_index_limit(field, conn, scales=(settings.index_scale,))
        yield Check.close(name, value, expected, settings.index_tolerance, f"s = {settings.index_scale:g}")


def _boundary_integrals(settings: ThomSettings) -> Iterator[Check]:
    for fixture in (disk_boundary(settings.disk_resolution), cap_boundary(1.0, settings.disk_resolution)):
        field = SectionField.of(fixture.connection.grid, fixture.field)
        total = integrate(geodesic_curvature(field, fixture.connection))
        yield Check.close(f"boundary_{fixture.name}", total, fixture.boundary_total, settings.disk_tolerance)
        yield Check.close(
            f"euler_{fixture.name}",
            fixture.interior_euler + total,
            1.0,
            settings.disk_tolerance,
            "interior plus boundary",
        )
    disk = disk_boundary(settings.disk_resolution)
    field = SectionField.of(disk.connection.grid, disk.field)
    flipped = geodesic_curvature_even(-field, disk.connection) - geodesic_curvature_even(field, disk.connection)
    yield Check.at_most("parity_even", flipped.max_abs(), ROUNDOFF, "Pi(-V) = Pi(V)")

    ball = ball_boundary(settings.ball_resolution)
    field = SectionField.of(ball.connection.grid, ball.field)
    odd = geodesic_curvature_odd(field, ball.connection)
    closed_form = integrate(odd, "simpson")
    moments = integrate(geodesic_curvature(field, ball.connection), "simpson")
    yield Check.close("boundary_ball", closed_form, ball.boundary_total, settings.ball_tolerance)
    yield Check.close("boundary_ball_moments", moments, closed_form, settings.ball_tolerance)
    flipped = geodesic_curvature_odd(-field, ball.connection) + odd
    yield Check.at_most("parity_odd", flipped.max_abs(), ROUNDOFF, "Pi(-V) = -Pi(V)")


def _ray_integrals(settings: ThomSettings) -> Iterator[Check]:
    for fixture in (disk_boundary(settings.disk_resolution), ball_boundary(settings.rays_resolution)):
        field = SectionField.of(fixture.connection.grid, fixture.field)
        difference = geodesic_curvature_by_rays(field, fixture.connection) - geodesic_curvature(
            field,
            fixture.connection,
        )
        yield Check.at_most(f"rays_{fixture.name}", difference.max_abs(), settings.rays_tolerance, "quadrature in t")


def _transgression(settings: ThomSettings) -> Iterator[Check]:
    residual = transgression_check(round_sphere(settings.transgression_resolution))
    yield Check.at_most("transgression_sphere", residual, settings.transgression_tolerance)


def verify_thom(config: RunConfig) -> Report:
    """Thom form normalization, rotation indices, boundary curvature integrals and transgression."""
    settings = config.thom
    report = Report("thom")
    _run(report, "normalization", lambda: _normalization(settings))
    _run(report, "rotation_index", lambda: _rotation_indices(settings))
    _run(report, "boundary", lambda: _boundary_integrals(settings))
    _run(report, "rays", lambda: _ray_integrals(settings))
    _run(report, "transgression", lambda: _transgression(settings))
    return report


# complex


def _boundary_squared(settings: ComplexSettings) -> Iterator[Check]:
    for n in range(2, settings.homology_max_n + 1):
        for kind in ("simplex", "cube"):
            worst = 0
            for dimension in range(2, n):
                product = boundary_matrix(kind, n, dimension - 1) @ boundary_matrix(kind, n, dimension)
                worst = max(worst, int(np.max(np.abs(product), initial=0)))
            yield Check.exact(f"boundary_squared_{kind}_n{n}", worst, 0)


def _adjointness(settings: ComplexSettings) -> Iterator[Check]:
    for n in range(2, settings.adjoint_max_n + 1):
        mismatches = 0
        for size in range(1, n):
            boxes = [Chain("cube", n, {key: 1}) for key in cells("cube", n, size)]
            simplices = [Chain("simplex", n, {key: 1}) for key in cells("simplex", n, size + 1)]
            box_boundaries = [boundary(box) for box in boxes]
            simplex_boundaries = [boundary(s) for s in simplices]
            for box, box_boundary in zip(boxes, box_boundaries):
                for s, s_boundary in zip(simplices, simplex_boundaries):
                    if duality_pairing(box_boundary, s) != duality_pairing(box, s_boundary):
                        mismatches += 1
        yield Check.exact(f"adjoint_n{n}", mismatches, 0)


def _cycles(settings: ComplexSettings) -> Iterator[Check]:
    for n in range(2, settings.cycle_max_n + 1):
        z = fundamental_cycle(n)
        yield Check.exact(f"fundamental_cycle_n{n}", int(is_cycle(z)), 1)
        broken = sum(1 for h in GroupElement.elements(n) if not is_cycle(beta_action(h, z)))
        yield Check.exact(f"beta_action_cycles_n{n}", broken, 0, f"all {2**n} elements")
        yield Check.exact(f"fiber_part_n{n}", int(fiber_part(z) == fiber_class(n)), 1)
        yield Check.exact(f"fiber_class_cycle_n{n}", int(is_cycle(fiber_class(n))), 1)
        yield Check.exact(f"boundary_class_cycle_n{n}", int(is_cycle(boundary_class(n))), 1)


def _characters(settings: ComplexSettings) -> Iterator[Check]:
    for n in range(1, settings.character_max_n + 1):
        wrong = 0
        for size in range(n + 1):
            for indices in itertools.combinations(range(n), size):
                expected = 2**n if size == n else 0
                if character_sum(indices, n) != expected:
                    wrong += 1
        yield Check.exact(f"character_sums_n{n}", wrong, 0)


def _homology(settings: ComplexSettings) -> Iterator[Check]:
    for n in range(2, settings.homology_max_n + 1):
        sphere = (1,) + (0,) * (n - 2) + (1,)
        for kind in ("simplex", "cube"):
            betti = betti_numbers(kind, n)
            yield Check.exact(f"betti_{kind}_n{n}", int(betti == sphere), 1, f"betti {list(betti)}")
            torsion = sum(len(group.torsion) for group in homology(kind, n))
            yield Check.exact(f"torsion_{kind}_n{n}", torsion, 0)


def verify_complex(config: RunConfig) -> Report:
    """Exact chain identities on the cross-polytope and its dual sphere decomposition."""
    settings = config.complex
    report = Report("complex")
    _run(report, "boundary_squared", lambda: _boundary_squared(settings))
    _run(report, "adjoint", lambda: _adjointness(settings))
    _run(report, "cycles", lambda: _cycles(settings))
    _run(report, "characters", lambda: _characters(settings))
    _run(report, "homology", lambda: _homology(settings))
    return report


# flatform


def _seed(rng: np.random.Generator) -> int:
    return int(rng.integers(2**31))


def _planted_recovery(
    settings: FlatformSettings,
    rng: np.random.Generator,
    *,
    orthogonal_rows: bool,
) -> Iterator[Check]:
    prefix = "" if orthogonal_rows else "general_"
    for n in range(2, settings.max_n + 1):
        recovery = residual = flatness = 0.0
        for _ in range(settings.instances):
            instance = planted(n, rng, orthogonal_rows=orthogonal_rows)
            seed = _seed(rng)
            result = diagonalize(instance.tensor, seed=seed)
            recovery = max(recovery, recovery_error(instance.phi, result.phi))
            values = {
                key: value
                for key, value in result.residuals.items()
                if orthogonal_rows or key != "basis_orthonormality"
            }
            residual = max(residual, *values.values())
            flatness = max(flatness, flatness_residual(instance.tensor, seed=seed))
        detail = f"{settings.instances} instances"
        yield Check.at_most(f"{prefix}recovery_n{n}", recovery, settings.recovery_tolerance, detail)
        yield Check.at_most(f"{prefix}residuals_n{n}", residual, settings.residual_tolerance, detail)
        yield Check.at_most(f"{prefix}flatness_n{n}", flatness, settings.flatness_tolerance, detail)


def _rejections(settings: FlatformSettings, rng: np.random.Generator) -> Iterator[Check]:
    for n in range(2, settings.max_n + 1):
        instance = degenerate(n, rng)
        yield _expect_error(f"kernel_rejected_n{n}", KernelError, diagonalize, instance.tensor)
    raw = rng.standard_normal((3, 3, 3))
    generic = FlatBilinearTensor((raw + raw.transpose(0, 2, 1)) / 2.0)
    yield _expect_error("generic_rejected", CommutationError, diagonalize, generic, _seed(rng))


def _pseudosphere_form(settings: FlatformSettings) -> Iterator[Check]:
    x = np.array([math.cos(PSEUDOSPHERE_ANGLE), math.sin(PSEUDOSPHERE_ANGLE)])
    result = diagonalize(pseudosphere_instance(float(x[0]), float(x[1])))
    expected = np.diag(1.0 / np.sqrt(x))
    yield Check.at_most("pseudosphere_directions", recovery_error(expected, result.phi), settings.recovery_tolerance)
    lengths = np.sort(np.sum(result.phi**2, axis=1))
    yield Check.at_most(
        "pseudosphere_lengths",
        float(np.max(np.abs(lengths - np.sort(1.0 / x)))),
        settings.residual_tolerance,
        "|phi_i|^2 = 1/x_i",
    )


def verify_flatform(config: RunConfig) -> Report:
    """Recovery of planted splittings, rejection of degenerate input and the pseudosphere form."""
    settings = config.flatform
    rng = _rng(config, "flatform")
    report = Report("flatform")
    _run(report, "recovery", lambda: _planted_recovery(settings, rng, orthogonal_rows=True))
    _run(report, "general_recovery", lambda: _planted_recovery(settings, rng, orthogonal_rows=False))
    _run(report, "rejections", lambda: _rejections(settings, rng))
    _run(report, "pseudosphere", lambda: _pseudosphere_form(settings))
    return report


# hazzidakis


def _soliton_identity(settings: HazzidakisSettings) -> Iterator[Check]:
    for mu in settings.mus:
        sol = one_soliton(mu, DEFAULT_RECTANGLE, settings.resolution)
        area = hyperbolic_area(sol)
        corner = hazzidakis_corner_sum(sol)
        yield Check.close(f"area_vs_corners_mu{mu:g}", area, corner, settings.tolerance)
        fractions = corner_angle_fractions(sol)
        yield Check.close(
            f"angle_rhs_mu{mu:g}",
            hazzidakis_rhs(fractions),
            -area / (2.0 * math.pi),
            settings.tolerance,
        )
        yield Check.close(f"volume_bound_mu{mu:g}", volume_bound(fractions, 2), area, settings.tolerance)
        yield Check.at_most(f"sine_gordon_mu{mu:g}", sine_gordon_residual(sol), settings.residual_tolerance)
        yield Check.at_most(
            f"chebyshev_curvature_mu{mu:g}",
            chebyshev_curvature_residual(sol),
            settings.residual_tolerance,
        )


def _convergence(settings: HazzidakisSettings) -> Iterator[Check]:
    for mu in settings.mus:
        table = convergence_table(mu, settings.convergence_resolutions)
        yield Check.at_most(
            f"convergence_constant_mu{mu:g}",
            table.constant,
            settings.convergence_constant,
            "max |area - corners| / h^2, trapezoid",
        )
        yield Check.close(f"convergence_order_mu{mu:g}", table.order, 2.0, 0.25)


def _area_bound(settings: HazzidakisSettings, rng: np.random.Generator) -> Iterator[Check]:
    largest = 0.0
    for index in range(settings.rectangles):
        a, c = rng.uniform(0.05, 1.5, size=2)
        width, height = rng.uniform(0.1, 1.5, size=2)
        mu = settings.mus[index % len(settings.mus)]
        sol = one_soliton(mu, Rectangle(a, a + width, c, c + height), RECTANGLE_RESOLUTION)
        largest = max(largest, hyperbolic_area(sol))
    yield Check.at_most("area_below_two_pi", largest, 2.0 * math.pi, f"{settings.rectangles} rectangles")


def _random_coframe(n: int, rng: np.random.Generator) -> np.ndarray:
    while True:
        coframe = rng.standard_normal((n, n))
        if abs(np.linalg.det(coframe)) > 0.1:
            return coframe


def _solid_angles(settings: HazzidakisSettings, rng: np.random.Generator) -> Iterator[Check]:
    seed = _seed(rng)
    planar = _random_coframe(2, rng)
    fractions = solid_angles(planar, settings.samples, seed)
    exact = [planar_solid_angle(i, s, planar) for i in range(2) for s in (1, -1)]
    yield Check.at_most(
        "planar_monte_carlo",
        float(np.max(np.abs(np.subtract(fractions, exact)))),
        settings.tiling_tolerance,
    )
    for n in (2, 3, 4):
        total = sum(solid_angles(_random_coframe(n, rng), settings.samples, seed))
        yield Check.close(f"tiling_n{n}", total, 1.0, settings.tiling_tolerance)
    for n in (2, 3, 4):
        fractions = solid_angles(np.eye(n), settings.samples, seed)
        deviation = float(np.max(np.abs(np.subtract(fractions, 1.0 / (2 * n)))))
        yield Check.at_most(f"symmetric_n{n}", deviation, settings.symmetric_tolerance)
    for n in (2, 4):
        yield Check.close(f"euclidean_rhs_n{n}", hazzidakis_rhs([1.0 / (2 * n)] * (2 * n)), 0.0, 0.0, "analytic angles")
    yield Check.close("euclidean_boundary_rhs_n3", hazzidakis_boundary_rhs([1.0 / 6.0] * 6), 0.0, ROUNDOFF)


def verify_hazzidakis(config: RunConfig) -> Report:
    """Area against corner angles on one-soliton rectangles, convergence and cone fractions."""
    settings = config.hazzidakis
    rng = _rng(config, "hazzidakis")
    report = Report("hazzidakis")
    _run(report, "identity", lambda: _soliton_identity(settings))
    _run(report, "convergence", lambda: _convergence(settings))
    _run(report, "area_bound", lambda: _area_bound(settings, rng))
    _run(report, "solid_angles", lambda: _solid_angles(settings, rng))
    return report


SUITE_RUNNERS: Final[dict[str, Callable[[RunConfig], Report]]] = {
    "pfaffian": verify_pfaffian,
    "forms": verify_forms,
    "frames": verify_frames,
    "thom": verify_thom,
    "complex": verify_complex,
    "flatform": verify_flatform,
    "hazzidakis": verify_hazzidakis,
}


def run_suite(name: str, config: RunConfig) -> Report:
    """Run one suite, timed and stamped as the configuration asks."""
    settings = config.suite(name)
    runner = SUITE_RUNNERS[name]
    logger.info("running suite %s", name)
    start = time.perf_counter()
    report = runner(config)
    report.seconds = time.perf_counter() - start
    report.config = {"seed": config.seed, **dataclasses.asdict(settings)}
    logger.info("suite %s: %s in %.2f s", name, "pass" if report.passed else "FAIL", report.seconds)
    return report.stamp(enabled=config.timestamp)


def verify_all(config: RunConfig, suites: Iterable[str] = SUITES) -> Report:
    """Run several suites, ``config.jobs`` at a time, and merge them in the given order."""
    names = list(suites)
    with ThreadPoolExecutor(max_workers=config.jobs) as pool:
        reports = list(pool.map(lambda name: run_suite(name, config), names))
    merged = merge("all", reports)
    merged.config = config.as_dict()
    return merged.stamp(enabled=config.timestamp)
