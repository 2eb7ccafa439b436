"""Process-wide numerical settings.

The values here are defaults; most operations also take explicit keyword
overrides. ``settings.override(...)`` is a context manager for tests and the CLI.
"""

import contextlib
import dataclasses


@dataclasses.dataclass
class Settings:
    degree_cap: int = 12
    strict: bool = False
    prune_tol: float = 1e-15
    mc_samples: int = 200_000
    mc_rel_tol: float = 0.01
    mc_chunk: int = 8192
    seed: int = 42
    psd_tol: float = 1e-10
    cond_max: float = 1e12

    @contextlib.contextmanager
    def override(self, **kwargs):
        old = {k: getattr(self, k) for k in kwargs}
        for k, v in kwargs.items():
            if not hasattr(self, k):
                raise AttributeError(k)
            setattr(self, k, v)
        try:
            yield self
        finally:
            for k, v in old.items():
                setattr(self, k, v)


settings = Settings()
