"""This module contains the exceptions raised by the package and the validator for run
configurations."""

from typing import TYPE_CHECKING, Any, Optional, Sequence, Union

if TYPE_CHECKING:
    from .config import RunConfig


class ValidationError(ValueError):
    """Exception raised when an input fails validation.

    Args:
        validation_msgs (Sequence, str): A Sequence of error messages describing which validators
            failed or a single custom message. If ``None`` then a generic error message is used.
        subject (str): what was being validated, used as the message prefix
    """

    def __init__(
        self, validation_msgs: Union[None, Sequence, str] = None, subject: str = "Input"
    ) -> None:
        if isinstance(validation_msgs, str):
            self.message = f"{subject} is invalid: {validation_msgs}"

        elif isinstance(validation_msgs, Sequence) and validation_msgs:
            validations_str = "\n\t-> " + "\n\t-> ".join(map(str, validation_msgs))
            self.message = (
                f"{subject} is invalid: the following issues have been detected:"
                f"{validations_str}"
            )

        else:
            self.message = f"{subject} is invalid."

        self.issues = [validation_msgs] if isinstance(validation_msgs, str) else list(
            validation_msgs or []
        )
        super().__init__(self.message)


class ConfigurationError(ValidationError):
    """Exception raised when a computation is requested without the inputs it requires."""

    def __init__(self, validation_msgs: Union[None, Sequence, str] = None) -> None:
        super().__init__(validation_msgs, subject="Configuration")


class ConvergenceError(RuntimeError):
    """Exception raised when an eigen-decomposition does not meet its accuracy contract.

    Args:
        message (str): description of the failed check
        residual (float): the offending residual
    """

    def __init__(self, message: str, residual: Optional[float] = None) -> None:
        self.residual = residual
        if residual is not None:
            message = f"{message} (residual {residual:.3e})"
        super().__init__(message)


class NumericalError(RuntimeError):
    """Exception raised when an internal mathematical invariant is violated.

    This signals an implementation or numerical defect rather than bad user input, e.g. a
    non-monotone spectral decay or an Orlicz profile evaluated on its infinite branch for an
    admissible state.
    """


VALID_INSTANCE_KINDS = ("cycle", "torus", "cayley-table", "complex-file", "matrix-file", "random")
VALID_MATRIX_FORMATS = ("dense", "triplets")

REQUIRED_INSTANCE_KEYS = {
    "cycle": ("size",),
    "torus": ("d", "size"),
    "cayley-table": ("table", "generators"),
    "complex-file": ("path",),
    "matrix-file": ("path",),
    "random": ("dimension",),
}


def _is_int(value: Any) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value: Any) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


class Validator:
    """Validator used to validate a run configuration.

    :meth:`RunConfig.from_dict` only rejects unknown keys; the validator checks that the values
    are logically valid: instance kinds and their required keys, referenced files, grids and
    numeric ranges.

    Args:
        config (RunConfig): the configuration which is to be validated

    **Example:**

    .. code-block:: python

        config = RunConfig.from_dict(data, validate=False)
        issues = Validator(config).run(raise_exception=False)
    """

    def __init__(self, config: "RunConfig") -> None:
        self._validation_messages = []
        self._config = config

    def run(self, raise_exception: bool = True) -> Optional[Sequence[str]]:
        """Runs the validation checks.

        Args:
            raise_exception (bool): whether to raise a ``ValidationError``
                if any issues are found

        Returns:
            Sequence[str], None: list of potential issues iff ``raise_exception`` is ``False``
            and at least one validation error was detected

        Raises:
            ValidationError: if any issues are found and ``raise_exception`` is ``True``
        """
        # reset validation messages in case previously run
        self._validation_messages = []

        self._check_top_level()
        self._check_instances()
        self._check_profile()
        self._check_suite()
        self._check_scaling()
        self._check_continuum()

        if self._validation_messages and raise_exception:
            raise ValidationError(self._validation_messages, subject="Configuration")

        return self._validation_messages or None

    def _add(self, message: str) -> None:
        self._validation_messages.append(message)

    def _check_grid(self, name: str, grid: Any, allow_zero: bool = False) -> None:
        """Checks that a grid is a non-empty, strictly increasing list of positive numbers."""
        if grid is None:
            return
        if not isinstance(grid, list) or not grid or not all(_is_number(v) for v in grid):
            self._add(f"'{name}' must be a non-empty list of numbers.")
            return
        if any(v < 0 or (v == 0 and not allow_zero) for v in grid):
            self._add(f"'{name}' must be positive.")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            self._add(f"'{name}' must be strictly increasing.")

    def _check_window(self, name: str, window: Any) -> None:
        if window is None:
            return
        if not isinstance(window, list) or len(window) != 2 or not all(map(_is_number, window)):
            self._add(f"'{name}' must be a pair [lo, hi].")
        elif not 0 < window[0] < window[1]:
            self._add(f"'{name}' must satisfy 0 < lo < hi.")

    def _check_file(self, name: str, path: Any) -> None:
        if not isinstance(path, str):
            self._add(f"'{name}' must be a path.")
        elif not self._config.resolve(path).is_file():
            self._add(f"File '{path}' referenced by '{name}' does not exist.")

    def _check_top_level(self) -> None:
        """Checks the seed, the worker cap and the output directory."""
        seed = self._config.seed
        if seed is not None and (not _is_int(seed) or not 0 <= seed < 2**64):
            self._add(f"Seed {seed!r} must be an unsigned 64-bit integer.")
        if not _is_int(self._config.jobs) or self._config.jobs < 1:
            self._add(f"Worker cap {self._config.jobs!r} must be a positive integer.")
        if not isinstance(self._config.output, str) or not self._config.output:
            self._add("Output directory must be a non-empty string.")

    def _check_instances(self) -> None:
        """Checks that every instance has a valid kind and the keys its kind requires."""
        for i, spec in enumerate(self._config.instances):
            name = f"instances[{i}]"
            kind = spec.get("kind")
            if kind not in VALID_INSTANCE_KINDS:
                self._add(f"Instance kind {kind!r} must be one of {VALID_INSTANCE_KINDS}.")
                continue

            missing = [k for k in REQUIRED_INSTANCE_KEYS[kind] if spec.get(k) is None]
            if missing:
                self._add(f"Instance '{name}' of kind '{kind}' requires {missing}.")
                continue

            size = spec.get("size")
            if size is not None and (not _is_int(size) or size < 2):
                self._add(f"'{name}.size' must be an integer of at least 2.")
            for key, lower in (("d", 1), ("k", 0), ("dimension", 1), ("rank", 1)):
                value = spec.get(key)
                if value is not None and (not _is_int(value) or value < lower):
                    self._add(f"'{name}.{key}' must be an integer of at least {lower}.")
            if kind in ("complex-file", "matrix-file"):
                self._check_file(f"{name}.path", spec["path"])
            if spec.get("format", "dense") not in VALID_MATRIX_FORMATS:
                self._add(f"'{name}.format' must be one of {VALID_MATRIX_FORMATS}.")

    def _check_profile(self) -> None:
        """Checks the profile grids."""
        profile = self._config.profile
        self._check_grid("profile.y_grid", profile["y_grid"])
        self._check_grid("profile.t_grid", profile["t_grid"])
        self._check_window("profile.window", profile["window"])
        if not _is_number(profile["epsilon"]) or profile["epsilon"] <= 0:
            self._add("'profile.epsilon' must be positive.")

    def _check_suite(self) -> None:
        """Checks the suite counts and parameters."""
        suite = self._config.suite
        if not _is_int(suite["states"]) or suite["states"] < 0:
            self._add("'suite.states' must be a nonnegative integer.")
        self._check_grid("suite.t_grid", suite["t_grid"])
        for key, lower in (("density_scale", 0.0), ("epsilon", 0.0), ("alpha", 1.0)):
            if not _is_number(suite[key]) or suite[key] <= lower:
                self._add(f"'suite.{key}' must be greater than {lower}.")

    def _check_scaling(self) -> None:
        """Checks the tower sizes and the Sobolev exponent."""
        scaling = self._config.scaling
        sizes = scaling["sizes"]
        if not isinstance(sizes, list) or not sizes:
            self._add("'scaling.sizes' must be a non-empty list.")
        elif not all(_is_int(s) and s >= 2 for s in sizes):
            self._add("'scaling.sizes' must hold integers of at least 2.")
        if not _is_int(scaling["d"]) or scaling["d"] < 0:
            self._add("'scaling.d' must be a nonnegative integer.")
        if not _is_int(scaling["k"]) or scaling["k"] < 0:
            self._add("'scaling.k' must be a nonnegative integer.")
        p = scaling["p"]
        if p is not None and (not _is_number(p) or p < 2):
            self._add("'scaling.p' must be at least 2.")
        self._check_window("scaling.window", scaling["window"])
        if scaling["path"] is not None:
            self._check_file("scaling.path", scaling["path"])

    def _check_continuum(self) -> None:
        """Checks the symbol, the λ grid and the sample budget."""
        continuum = self._config.continuum
        if not _is_int(continuum["n"]) or continuum["n"] < 1:
            self._add("'continuum.n' must be a positive integer.")
        if not _is_int(continuum["budget"]) or continuum["budget"] < 10_000:
            self._add("'continuum.budget' must be an integer of at least 10000.")
        self._check_grid("continuum.lambdas", continuum["lambdas"], allow_zero=True)
        self._check_window("continuum.window", continuum["window"])

        monomials = continuum["monomials"]
        if monomials is not None and not (
            isinstance(monomials, list)
            and all(isinstance(m, list) and len(m) == 2 and _is_number(m[1]) for m in monomials)
        ):
            self._add("'continuum.monomials' must be a list of [multi-index, coefficient] pairs.")
