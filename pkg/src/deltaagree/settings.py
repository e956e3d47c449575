"""The 48 built-in population settings of the simulation study.

Settings are numbered 1-48 in order.  The published listing prints the ids
of settings 29 and 39 as "28" and "38"; ``label`` keeps the printed id.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import PopulationParams


@dataclass(frozen=True)
class SimulationSetting:
    id: int
    label: str
    n: int
    params: PopulationParams

    @property
    def K(self) -> int:
        return self.params.K


_PI3 = (0.2, 0.3, 0.5)
_PI5 = (0.1, 0.15, 0.2, 0.25, 0.3)

# (alpha pair per block of four rows) for K = 3 and K = 5, low then high Delta
_ALPHA3 = [((0.05, 0.15, 0.2), (0.13, 0.13, 0.14)), ((0.15, 0.25, 0.4), (0.26, 0.26, 0.28))]
_ALPHA5 = [
    ((0.05, 0.05, 0.05, 0.1, 0.15), (0.08,) * 5),
    ((0.1, 0.15, 0.15, 0.2, 0.2), (0.16,) * 5),
]
_PRINTED_LABELS = {29: "28", 39: "38"}


def _block(start_id, alphas, pi, n_values):
    out = []
    sid = start_id
    for a_pair in alphas:
        for n in n_values:
            for alpha in a_pair:
                for pi2 in (pi, tuple(reversed(pi))):
                    params = PopulationParams(alpha, pi, pi2)
                    label = _PRINTED_LABELS.get(sid, str(sid))
                    out.append(SimulationSetting(sid, label, n, params))
                    sid += 1
    return out


_SETTINGS = tuple(_block(1, _ALPHA3, _PI3, (30, 50, 100)) + _block(25, _ALPHA5, _PI5, (30, 50, 100)))


def builtin_settings() -> list[SimulationSetting]:
    return list(_SETTINGS)


def get_setting(setting_id: int) -> SimulationSetting:
    if not 1 <= setting_id <= len(_SETTINGS):
        raise KeyError(f"unknown setting {setting_id}; valid ids are 1-{len(_SETTINGS)}")
    return _SETTINGS[setting_id - 1]
