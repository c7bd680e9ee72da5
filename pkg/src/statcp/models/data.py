"""Worked-example datasets and seeded synthetic generators."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# noisy linear series v_t = t - 5 + N(0, 5^2), t = 1..20
LINEAR_SERIES = (
    -2.119453760526702, 5.290814814602713, 3.3477370212059263, -1.524427844666869,
    -2.11767611724241, -3.1393019984876567, 0.031583398832589316, 4.492170566086558,
    12.075689120209544, -5.734583134742884, 4.817685166491335, -0.38732268295202754,
    -0.2451087678267534, 5.476406521028064, 13.513668326933141, 7.824341452223766,
    9.279650356164751, 11.640247250501195, 16.724560475349527, 9.74407257497221,
)

# three normal groups, means (4, 9, 10), sd 3
GROUPS = (
    (3.57329, 6.5655, -2.06033, 0.469477, 3.05632, 5.54063),
    (9.83132, 9.7379, 6.6339, 8.20049, 7.19737, 9.19586),
    (9.80335, 8.79726, 13.6045, 9.4932, 8.50685, 9.22433),
)

# ten one-hot multinomial draws over three categories
ONEHOT = (
    (0, 1, 0), (0, 1, 0), (0, 0, 1), (1, 0, 0), (0, 1, 0),
    (0, 1, 0), (0, 1, 0), (1, 0, 0), (0, 0, 1), (1, 0, 0),
)

# goodness-of-fit example lists, bins of width 5 on [0, 30)
GOF_LIST_1 = (13, 7, 6, 12, 10, 14, 8, 19, 5, 3, 20, 12, 18, 11, 11, 17, 12, 2, 12, 28, 6, 25, 21, 1)
GOF_LIST_2 = (26, 9, 6, 12, 16, 10, 8, 28, 5, 21, 0, 12, 1, 12, 11, 10, 17, 19, 24, 11, 16, 19, 13, 11)
GOF_TARGETS = (2, 4, 10, 4, 2, 2)


@dataclass
class Dataset:
    """Observations for one model builder.

    ``kind`` is one of "variates" (list of reals), "series" (AR data),
    "groups" (list of equal-length lists) or "onehot" (0/1 rows).
    """

    kind: str
    values: list
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("variates", "series", "groups", "onehot"):
            raise ValueError(f"unknown dataset kind {self.kind!r}")
        if self.kind in ("variates", "series"):
            self.values = [float(x) for x in self.values]
        elif self.kind == "groups":
            self.values = [[float(x) for x in g] for g in self.values]
        else:
            rows = [[int(x) for x in r] for r in self.values]
            if rows and any(len(r) != len(rows[0]) for r in rows):
                raise ValueError("one-hot rows must have equal length")
            if any(sorted(set(r)) != [0, 1] or sum(r) != 1 for r in rows):
                raise ValueError("one-hot rows must contain a single 1")
            self.values = rows

    @property
    def size(self) -> int:
        return len(self.values)

    @classmethod
    def from_json(cls, obj: dict) -> "Dataset":
        for kind in ("variates", "series", "groups", "onehot"):
            if kind in obj:
                meta = {k: v for k, v in obj.items() if k != kind}
                return cls(kind, obj[kind], meta)
        raise ValueError("dataset JSON needs one of variates, series, groups, onehot")

    def to_json(self) -> dict:
        return {self.kind: self.values, **self.meta}


def linear_example() -> Dataset:
    return Dataset("variates", list(LINEAR_SERIES))


def groups_example() -> Dataset:
    return Dataset("groups", [list(g) for g in GROUPS])


def onehot_example() -> Dataset:
    return Dataset("onehot", [list(r) for r in ONEHOT])


def generate_linear(a: float, b: float, sigma: float, T: int, rng: np.random.Generator) -> Dataset:
    t = np.arange(1, T + 1)
    return Dataset("variates", list(a * t + b + rng.normal(0.0, sigma, T)))


def generate_ar1(c: float, beta: float, lam: float, T: int, rng: np.random.Generator,
                 x0: float = 0.0) -> Dataset:
    """x_t = c + beta x_{t-1} + eps_t with Poisson(lam) noise."""
    xs = []
    prev = x0
    for eps in rng.poisson(lam, T):
        prev = c + beta * prev + float(eps)
        xs.append(prev)
    return Dataset("series", xs)


def generate_multinomial(p, N: int, rng: np.random.Generator) -> Dataset:
    k = len(p)
    draws = rng.choice(k, size=N, p=np.asarray(p, dtype=float))
    return Dataset("onehot", [[int(j == d) for j in range(k)] for d in draws])
