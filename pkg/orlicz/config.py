"""This module contains the :class:`RunConfig` class describing one command-line run."""
from __future__ import annotations

import copy
import json
import os
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence, Union

from .validator import ValidationError, Validator

SECTION_DEFAULTS: Dict[str, Dict[str, Any]] = {
    "profile": {
        "y_grid": [1 / 64, 1 / 16, 1 / 4],
        "t_grid": [0.1, 0.5, 1.0, 2.0, 5.0],
        "k_candidates": [0, 1, 2],
        "window": None,
        "epsilon": 1.0,
    },
    "suite": {
        "states": 100,
        "generators": ["random"],
        "checks": None,
        "density_scale": 1.0,
        "epsilon": 1.0,
        "alpha": 2.0,
        "t_grid": None,
    },
    "scaling": {
        "d": 1,
        "sizes": [64, 128, 256],
        "k": 0,
        "p": None,
        "samples": 64,
        "window": None,
        "k_candidates": [0, 1, 2],
        "path": None,
    },
    "continuum": {
        "n": 3,
        "monomials": None,
        "domain": None,
        "lambdas": None,
        "budget": 1_000_000,
        "window": None,
        "half_width": None,
        "k_candidates": [0, 1, 2],
    },
}

TOP_LEVEL_DEFAULTS: Dict[str, Any] = {"seed": None, "jobs": 1, "output": "out"}

INSTANCE_KEYS = {
    "kind",
    "name",
    "size",
    "d",
    "k",
    "path",
    "format",
    "table",
    "generators",
    "dimension",
    "rank",
    "seed",
    "auto_complete",
}


class RunConfig:
    """Structured representation of a run configuration.

    A configuration is a JSON document with the sections ``instances`` (a list of instance
    specifications; ``instance`` is accepted for a single one), ``profile``, ``suite``,
    ``scaling`` and ``continuum``, and the top-level keys ``seed``, ``jobs`` and ``output``. Missing
    keys take their defaults, so serializing a parsed configuration gives its canonical form.

    Args:
        instances (Sequence[Mapping]): instance specifications
        sections (Mapping[str, Mapping]): section options, merged with their defaults
        seed (int): master seed
        jobs (int): worker cap
        output (str): output directory
        base_dir (str, os.PathLike): directory against which relative paths are resolved

    **Example:**

    .. code-block:: python

        config = RunConfig.from_dict({"instance": {"kind": "cycle", "size": 4}, "seed": 7})
        config.serialize()
    """

    def __init__(
        self,
        instances: Sequence[Mapping[str, Any]] = (),
        sections: Optional[Mapping[str, Mapping[str, Any]]] = None,
        seed: Optional[int] = None,
        jobs: int = 1,
        output: str = "out",
        base_dir: Union[None, str, os.PathLike] = None,
    ) -> None:
        self._instances = [dict(spec) for spec in instances]
        self._sections = {}
        for name, defaults in SECTION_DEFAULTS.items():
            given = dict((sections or {}).get(name) or {})
            self._sections[name] = {**copy.deepcopy(defaults), **given}
        self._seed = seed
        self._jobs = jobs
        self._output = output
        self._base_dir = Path(base_dir) if base_dir is not None else Path.cwd()

    def __repr__(self) -> str:
        return f"<RunConfig: instances={len(self._instances)}, seed={self._seed}>"

    def __eq__(self, other) -> bool:
        if not isinstance(other, RunConfig):
            return NotImplemented
        return self.to_dict() == other.to_dict()

    @property
    def instances(self) -> List[Dict[str, Any]]:
        """Returns copies of the instance specifications."""
        return copy.deepcopy(self._instances)

    @property
    def profile(self) -> Dict[str, Any]:
        """Returns the profile options."""
        return copy.deepcopy(self._sections["profile"])

    @property
    def suite(self) -> Dict[str, Any]:
        """Returns the certification suite options."""
        return copy.deepcopy(self._sections["suite"])

    @property
    def scaling(self) -> Dict[str, Any]:
        """Returns the quotient-tower options."""
        return copy.deepcopy(self._sections["scaling"])

    @property
    def continuum(self) -> Dict[str, Any]:
        """Returns the continuum reference options."""
        return copy.deepcopy(self._sections["continuum"])

    @property
    def seed(self) -> Optional[int]:
        """Returns the master seed."""
        return self._seed

    @property
    def jobs(self) -> int:
        """Returns the worker cap."""
        return self._jobs

    @property
    def output(self) -> str:
        """Returns the output directory as written in the configuration."""
        return self._output

    @property
    def base_dir(self) -> Path:
        """Returns the directory against which relative paths are resolved."""
        return self._base_dir

    def resolve(self, path: Union[str, os.PathLike]) -> Path:
        """Resolves a path of the configuration against :attr:`base_dir`."""
        path = Path(path)
        return path if path.is_absolute() else self._base_dir / path

    def to_dict(self) -> Dict[str, Any]:
        """Returns the canonical JSON-compatible form of the configuration."""
        return {
            "instances": self.instances,
            **{name: copy.deepcopy(options) for name, options in self._sections.items()},
            "seed": self._seed,
            "jobs": self._jobs,
            "output": self._output,
        }

    def serialize(self) -> str:
        """Serializes the configuration as JSON with sorted keys."""
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def replace(self, **overrides: Any) -> RunConfig:
        """Returns a copy with top-level keys replaced; ``None`` values are ignored.

        Args:
            overrides: values for ``seed``, ``jobs`` or ``output``
        """
        unknown = set(overrides) - set(TOP_LEVEL_DEFAULTS)
        if unknown:
            raise ValidationError(f"Cannot override {sorted(unknown)}.", "Configuration")

        values = {"seed": self._seed, "jobs": self._jobs, "output": self._output}
        values.update({k: v for k, v in overrides.items() if v is not None})
        return RunConfig(self._instances, self._sections, base_dir=self._base_dir, **values)

    @classmethod
    def from_dict(
        cls,
        data: Mapping[str, Any],
        base_dir: Union[None, str, os.PathLike] = None,
        validate: bool = True,
    ) -> RunConfig:
        """Creates a configuration from a parsed JSON document.

        Args:
            data (Mapping[str, Any]): the document
            base_dir (str, os.PathLike): directory against which relative paths are resolved
            validate (bool): whether to run the :class:`~orlicz.validator.Validator`

        Raises:
            ValidationError: if keys are unknown or, with ``validate``, values are invalid
        """
        if not isinstance(data, Mapping):
            raise ValidationError("the document must be a JSON object.", "Configuration")

        issues = []
        known = {"instance", "instances", *SECTION_DEFAULTS, *TOP_LEVEL_DEFAULTS}
        for key in sorted(set(data) - known):
            issues.append(f"Unknown key '{key}'.")
        if "instance" in data and "instances" in data:
            issues.append("Use either 'instance' or 'instances', not both.")
        for name, defaults in SECTION_DEFAULTS.items():
            section = data.get(name) or {}
            if not isinstance(section, Mapping):
                issues.append(f"Section '{name}' must be an object.")
                continue
            for key in sorted(set(section) - set(defaults)):
                issues.append(f"Unknown key '{name}.{key}'.")

        instances = data.get("instances", [data["instance"]] if "instance" in data else [])
        if not isinstance(instances, list):
            issues.append("'instances' must be a list.")
            instances = []
        for i, spec in enumerate(instances):
            if not isinstance(spec, Mapping):
                issues.append(f"Instance {i} must be an object.")
                continue
            for key in sorted(set(spec) - INSTANCE_KEYS):
                issues.append(f"Unknown key 'instances[{i}].{key}'.")
        if issues:
            raise ValidationError(issues, subject="Configuration")

        config = cls(
            instances,
            {name: data.get(name) for name in SECTION_DEFAULTS},
            seed=data.get("seed"),
            jobs=data.get("jobs", TOP_LEVEL_DEFAULTS["jobs"]),
            output=data.get("output", TOP_LEVEL_DEFAULTS["output"]),
            base_dir=base_dir,
        )
        if validate:
            Validator(config).run(raise_exception=True)
        return config

    @classmethod
    def load(cls, path: Union[str, os.PathLike], validate: bool = True) -> RunConfig:
        """Reads a configuration file; relative paths in it resolve against its directory."""
        path = Path(path)
        if not path.is_file():
            raise ValidationError(f"file '{path}' does not exist.", "Configuration")
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ValidationError(
                f"line {exc.lineno}, column {exc.colno}: {exc.msg}.", "Configuration"
            ) from exc
        return cls.from_dict(data, base_dir=path.parent, validate=validate)
