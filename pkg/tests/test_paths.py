import numpy as np
import pytest

from src.errors import NotSymplectic, SchemaError, UnderResolved, UnknownGenerator
from src.models.documents import GeneratorSpec
from src.tools.maslov import step_angles
from src.tools.paths import (
    direct_sum_path,
    half_turn_path,
    interpolation_path,
    inverse_path,
    path_from_function,
    path_from_samples,
    quadratic_flow_path,
    repeat_path,
    rotation_path,
    symplectic_path_from_generator,
)
from src.tools.symplinalg import direct_sum, polar_unitary, rotation


def test_path_must_start_at_identity():
    with pytest.raises(NotSymplectic):
        path_from_function(lambda t: rotation(t + 1.0), 1)


def test_fast_rotation_is_refined():
    path = rotation_path(6 * np.pi)
    assert np.allclose(path.endpoint, np.eye(2))
    unitaries = [polar_unitary(S).entries for S in path.samples]
    for ua, ub in zip(unitaries, unitaries[1:]):
        assert np.max(np.abs(step_angles(ua, ub))) < np.pi / 2
    assert path.times[0] == 0.0 and path.times[-1] == 1.0


def test_half_turn_ends_at_minus_identity():
    assert np.allclose(half_turn_path(2).endpoint, -np.eye(4))


def test_quadratic_flow():
    path = quadratic_flow_path(np.eye(2), duration=1.0)
    assert np.allclose(path.endpoint, rotation(1.0))
    with pytest.raises(SchemaError):
        quadratic_flow_path([[1.0, 2.0], [0.0, 1.0]])


def test_path_from_samples_validation():
    with pytest.raises(SchemaError):
        path_from_samples([0.0, 0.0], [np.eye(2), rotation(0.1)])
    with pytest.raises(SchemaError):
        path_from_samples([0.5, 1.0], [np.eye(2), rotation(0.1)])
    with pytest.raises(NotSymplectic):
        path_from_samples([0.0, 1.0], [np.eye(2), np.diag([2.0, 1.0])])
    with pytest.raises(NotSymplectic):
        path_from_samples([0.0, 1.0], [rotation(0.1), rotation(0.2)])
    with pytest.raises(UnderResolved):
        path_from_samples([0.0, 1.0], [np.eye(2), rotation(2.0)])


def test_path_from_samples_accepts_row_major_lists():
    path = path_from_samples([0.0, 2.0], [[1.0, 0.0, 0.0, 1.0], rotation(0.5).ravel().tolist()])
    assert np.allclose(path.times, [0.0, 1.0])
    assert np.allclose(path.at(0.5), rotation(0.25))


def test_interpolation_prepends_identity():
    path = interpolation_path([rotation(0.5), rotation(1.0)])
    assert np.allclose(path.samples[0], np.eye(2))
    assert np.allclose(path.endpoint, rotation(1.0))


def test_combinators():
    a, b = rotation_path(0.6 * np.pi), half_turn_path()
    assert np.allclose(direct_sum_path(a, b).endpoint, direct_sum(rotation(0.6 * np.pi), -np.eye(2)))
    assert np.allclose(inverse_path(a).endpoint, rotation(-0.6 * np.pi))
    assert np.allclose(repeat_path(a, 3).endpoint, rotation(1.8 * np.pi))


def test_generator_table():
    path = symplectic_path_from_generator({"name": "alpha_power", "params": {"r": 2}})
    assert np.allclose(path.endpoint, np.eye(2))
    nested = symplectic_path_from_generator(
        GeneratorSpec(
            name="product",
            params={"first": {"name": "half_turn"}, "second": {"name": "rotation", "params": {"chi": 1.0}}},
        )
    )
    assert np.allclose(nested.endpoint, -rotation(1.0))


def test_generator_errors():
    with pytest.raises(UnknownGenerator):
        symplectic_path_from_generator({"name": "spiral", "params": {}})
    with pytest.raises(SchemaError):
        symplectic_path_from_generator({"name": "rotation", "params": {}})
