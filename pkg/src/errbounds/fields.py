"""Box domains and analytic scalar/vector fields.

Fields wrap vectorized numpy callables.  Elliptic fields are functions of a
point array ``X`` with shape ``(n, d)``; space-time fields take ``(t, X)``
where ``t`` has shape ``(n,)``.  Derivatives are never approximated
numerically: a field either carries an analytic evaluator for a derivative
or raises :class:`CapabilityError` when it is requested.
"""
from __future__ import annotations

import dataclasses
from typing import Callable, Optional

import numpy as np


class CapabilityError(Exception):
    """A derivative evaluator was requested that the field does not carry."""


class ConformityError(Exception):
    """A field violates the conformity contract of an estimator."""


@dataclasses.dataclass(frozen=True)
class BoxDomain:
    """Axis-aligned box, optionally extended by a time interval (0, T)."""

    lower: tuple
    upper: tuple
    time_horizon: Optional[float] = None

    def __post_init__(self):
        lower = tuple(float(v) for v in np.atleast_1d(self.lower))
        upper = tuple(float(v) for v in np.atleast_1d(self.upper))
        object.__setattr__(self, "lower", lower)
        object.__setattr__(self, "upper", upper)
        if len(lower) != len(upper):
            raise ValueError("lower and upper must have the same length")
        if not 1 <= len(lower) <= 3:
            raise ValueError("spatial dimension must be 1, 2 or 3")
        for lo, hi in zip(lower, upper):
            if not hi > lo:
                raise ValueError(f"degenerate axis: upper {hi} must exceed lower {lo}")
        if self.time_horizon is not None:
            t = float(self.time_horizon)
            if not t > 0.0:
                raise ValueError("time_horizon must be strictly positive")
            object.__setattr__(self, "time_horizon", t)

    @property
    def dim(self) -> int:
        return len(self.lower)

    @property
    def sides(self) -> tuple:
        return tuple(hi - lo for lo, hi in zip(self.lower, self.upper))

    @property
    def is_parabolic(self) -> bool:
        return self.time_horizon is not None

    def spatial(self) -> "BoxDomain":
        """The spatial box without the time interval."""
        if not self.is_parabolic:
            return self
        return BoxDomain(self.lower, self.upper)

    def boundary_points(self, per_axis: int = 8) -> np.ndarray:
        """Deterministic sample points on the spatial boundary, shape (m, d)."""
        d = self.dim
        if d == 1:
            return np.array([[self.lower[0]], [self.upper[0]]])
        # midpoint grids on each face, avoiding edges/corners
        pts = []
        for axis in range(d):
            grids = []
            for j in range(d):
                if j == axis:
                    continue
                u = (np.arange(per_axis) + 0.5) / per_axis
                grids.append(self.lower[j] + u * (self.upper[j] - self.lower[j]))
            mesh = np.meshgrid(*grids, indexing="ij")
            face = np.stack([m.ravel() for m in mesh], axis=1)
            for val in (self.lower[axis], self.upper[axis]):
                full = np.empty((face.shape[0], d))
                cols = [j for j in range(d) if j != axis]
                full[:, cols] = face
                full[:, axis] = val
                pts.append(full)
        return np.concatenate(pts, axis=0)


def _lift2(op, f, g):
    if f is None or g is None:
        return None

    def h(*args):
        return op(f(*args), g(*args))

    return h


def _scale(f, c):
    if f is None:
        return None

    def h(*args):
        return c * f(*args)

    return h


def _freeze_time(f, t0):
    if f is None:
        return None

    def h(X):
        return f(np.full(X.shape[0], t0), X)

    return h


class ScalarField:
    """Pointwise-evaluable scalar field with optional analytic derivatives."""

    __slots__ = ("_value", "_grad", "_laplacian", "_dt", "dim",
                 "time_dependent", "vanishes_on_boundary")

    def __init__(self, value: Callable, grad: Callable | None = None,
                 laplacian: Callable | None = None, dt: Callable | None = None,
                 *, dim: int, time_dependent: bool = False,
                 vanishes_on_boundary: bool = False):
        self._value = value
        self._grad = grad
        self._laplacian = laplacian
        self._dt = dt
        self.dim = dim
        self.time_dependent = time_dependent
        self.vanishes_on_boundary = vanishes_on_boundary

    # capability flags
    @property
    def has_grad(self) -> bool:
        return self._grad is not None

    @property
    def has_laplacian(self) -> bool:
        return self._laplacian is not None

    @property
    def has_dt(self) -> bool:
        return self._dt is not None

    # evaluation
    def value(self, *args) -> np.ndarray:
        return self._value(*args)

    def grad(self, *args) -> np.ndarray:
        if self._grad is None:
            raise CapabilityError("scalar field carries no gradient evaluator")
        return self._grad(*args)

    def laplacian(self, *args) -> np.ndarray:
        if self._laplacian is None:
            raise CapabilityError("scalar field carries no laplacian evaluator")
        return self._laplacian(*args)

    def dt(self, *args) -> np.ndarray:
        if self._dt is None:
            raise CapabilityError("scalar field carries no time-derivative evaluator")
        return self._dt(*args)

    # algebra
    def _check_compatible(self, other: "ScalarField"):
        if not isinstance(other, ScalarField):
            raise TypeError("can only combine ScalarField with ScalarField")
        if self.dim != other.dim or self.time_dependent != other.time_dependent:
            raise ValueError("fields live on incompatible domains")

    def __add__(self, other: "ScalarField") -> "ScalarField":
        self._check_compatible(other)
        return ScalarField(
            _lift2(np.add, self._value, other._value),
            _lift2(np.add, self._grad, other._grad),
            _lift2(np.add, self._laplacian, other._laplacian),
            _lift2(np.add, self._dt, other._dt),
            dim=self.dim, time_dependent=self.time_dependent,
            vanishes_on_boundary=self.vanishes_on_boundary and other.vanishes_on_boundary)

    def __sub__(self, other: "ScalarField") -> "ScalarField":
        return self + (-1.0) * other

    def __mul__(self, c) -> "ScalarField":
        c = float(c)
        return ScalarField(
            _scale(self._value, c), _scale(self._grad, c),
            _scale(self._laplacian, c), _scale(self._dt, c),
            dim=self.dim, time_dependent=self.time_dependent,
            vanishes_on_boundary=self.vanishes_on_boundary)

    __rmul__ = __mul__

    def __neg__(self) -> "ScalarField":
        return (-1.0) * self

    # derived fields
    def gradient_field(self) -> "VectorField":
        if self._grad is None:
            raise CapabilityError("scalar field carries no gradient evaluator")
        return VectorField(self._grad, div=self._laplacian,
                           dim=self.dim, time_dependent=self.time_dependent)

    def laplacian_field(self) -> "ScalarField":
        if self._laplacian is None:
            raise CapabilityError("scalar field carries no laplacian evaluator")
        return ScalarField(self._laplacian, dim=self.dim,
                           time_dependent=self.time_dependent)

    def dt_field(self) -> "ScalarField":
        if self._dt is None:
            raise CapabilityError("scalar field carries no time-derivative evaluator")
        return ScalarField(self._dt, dim=self.dim,
                           time_dependent=self.time_dependent)

    def at_time(self, t0: float) -> "ScalarField":
        """Spatial slice at a fixed time; the result is an elliptic field."""
        if not self.time_dependent:
            raise ValueError("at_time requires a space-time field")
        return ScalarField(
            _freeze_time(self._value, t0), _freeze_time(self._grad, t0),
            _freeze_time(self._laplacian, t0), None,
            dim=self.dim, time_dependent=False,
            vanishes_on_boundary=self.vanishes_on_boundary)

    def restricted(self, *, grad: bool = False, laplacian: bool = False,
                   dt: bool = False, boundary_flag: bool = False) -> "ScalarField":
        """Copy with only the selected capabilities retained."""
        return ScalarField(
            self._value,
            self._grad if grad else None,
            self._laplacian if laplacian else None,
            self._dt if dt else None,
            dim=self.dim, time_dependent=self.time_dependent,
            vanishes_on_boundary=self.vanishes_on_boundary and boundary_flag)


class VectorField:
    """Pointwise-evaluable vector field with optional divergence."""

    __slots__ = ("_value", "_div", "_dt", "dim", "time_dependent")

    def __init__(self, value: Callable, div: Callable | None = None,
                 dt: Callable | None = None, *, dim: int,
                 time_dependent: bool = False):
        self._value = value
        self._div = div
        self._dt = dt
        self.dim = dim
        self.time_dependent = time_dependent

    @property
    def has_div(self) -> bool:
        return self._div is not None

    @property
    def has_dt(self) -> bool:
        return self._dt is not None

    def value(self, *args) -> np.ndarray:
        return self._value(*args)

    def div(self, *args) -> np.ndarray:
        if self._div is None:
            raise CapabilityError("vector field carries no divergence evaluator")
        return self._div(*args)

    def dt(self, *args) -> np.ndarray:
        if self._dt is None:
            raise CapabilityError("vector field carries no time-derivative evaluator")
        return self._dt(*args)

    def _check_compatible(self, other: "VectorField"):
        if not isinstance(other, VectorField):
            raise TypeError("can only combine VectorField with VectorField")
        if self.dim != other.dim or self.time_dependent != other.time_dependent:
            raise ValueError("fields live on incompatible domains")

    def __add__(self, other: "VectorField") -> "VectorField":
        self._check_compatible(other)
        return VectorField(
            _lift2(np.add, self._value, other._value),
            _lift2(np.add, self._div, other._div),
            _lift2(np.add, self._dt, other._dt),
            dim=self.dim, time_dependent=self.time_dependent)

    def __sub__(self, other: "VectorField") -> "VectorField":
        return self + (-1.0) * other

    def __mul__(self, c) -> "VectorField":
        c = float(c)
        return VectorField(
            _scale(self._value, c), _scale(self._div, c), _scale(self._dt, c),
            dim=self.dim, time_dependent=self.time_dependent)

    __rmul__ = __mul__

    def __neg__(self) -> "VectorField":
        return (-1.0) * self

    def div_field(self) -> ScalarField:
        if self._div is None:
            raise CapabilityError("vector field carries no divergence evaluator")
        return ScalarField(self._div, dim=self.dim,
                           time_dependent=self.time_dependent)

    def at_time(self, t0: float) -> "VectorField":
        if not self.time_dependent:
            raise ValueError("at_time requires a space-time field")
        return VectorField(
            _freeze_time(self._value, t0), _freeze_time(self._div, t0), None,
            dim=self.dim, time_dependent=False)

    def restricted(self, *, div: bool = False, dt: bool = False) -> "VectorField":
        """Copy with only the selected capabilities retained."""
        return VectorField(
            self._value,
            self._div if div else None,
            self._dt if dt else None,
            dim=self.dim, time_dependent=self.time_dependent)


def constant_scalar(c: float, dom: BoxDomain) -> ScalarField:
    c = float(c)
    d = dom.dim

    def value(*args):
        return np.full(args[-1].shape[0], c)

    def zero(*args):
        return np.zeros(args[-1].shape[0])

    def zero_vec(*args):
        return np.zeros((args[-1].shape[0], d))

    return ScalarField(value, zero_vec, zero,
                       zero if dom.is_parabolic else None,
                       dim=d, time_dependent=dom.is_parabolic,
                       vanishes_on_boundary=(c == 0.0))


def zero_scalar(dom: BoxDomain) -> ScalarField:
    return constant_scalar(0.0, dom)


def zero_vector(dom: BoxDomain) -> VectorField:
    d = dom.dim

    def value(*args):
        return np.zeros((args[-1].shape[0], d))

    def zero(*args):
        return np.zeros(args[-1].shape[0])

    return VectorField(value, zero, value if dom.is_parabolic else None,
                       dim=d, time_dependent=dom.is_parabolic)
