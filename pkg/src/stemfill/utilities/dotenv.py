import os
from typing import Any, Dict, Tuple

# name -> (cast, default) for every key stemfill reads.
SETTINGS: Dict[str, Tuple[type, Any]] = {
    "STEMFILL_DEBUG": (bool, False),
    "STEMFILL_LOG_FILE": (str, None),
    "STEMFILL_MAX_ITERS": (int, 1000),
    "STEMFILL_REL_TOL": (float, 1e-5),
}


class EnvLoader:
    """Process environment first, then a .env file in the working directory."""

    _instance = None

    def __new__(cls, *args, **kwargs):
        if cls._instance is None:
            cls._instance = super(EnvLoader, cls).__new__(cls)
            cls._instance._initialized = False
        return cls._instance

    def __init__(self, filepath=None):
        if not self._initialized:
            if filepath is None:
                filepath = os.path.join(os.getcwd(), ".env")

            self._env_vars = {}
            self._load_dotenv(filepath)
            self._initialized = True

    def _load_dotenv(self, filepath):
        if not os.path.exists(filepath):
            return

        with open(filepath) as file:
            for line in file:
                line = line.strip()
                if not line or line.startswith("#") or "=" not in line:
                    continue
                key, value = (part.strip() for part in line.split("=", 1))
                if len(value) >= 2 and value[0] == value[-1] and value[0] in "\"'":
                    value = value[1:-1]
                self._env_vars[key] = value

    def _cast_bool(self, value):
        return value.lower() in ["true", "1", "yes", "on"]

    def get(self, key, default=None, required=False, cast_type=None):
        if key in os.environ:
            value = os.environ[key]
        elif key in self._env_vars:
            value = self._env_vars[key]
        else:
            if required:
                raise ValueError(f"Required environment variable '{key}' is missing.")
            return default

        if cast_type is bool:
            return self._cast_bool(value)

        if cast_type:
            try:
                value = cast_type(value)
            except ValueError:
                raise ValueError(
                    f"Environment variable '{key}' cannot be cast to {cast_type.__name__}."
                )

        return value

    def setting(self, key):
        if key not in SETTINGS:
            raise KeyError(f"Unknown setting '{key}'")
        cast_type, default = SETTINGS[key]
        return self.get(key, default=default, cast_type=cast_type)


env = EnvLoader()
