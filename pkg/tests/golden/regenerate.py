"""Rewrite the golden SVGs from the current code: python3 tests/golden/regenerate.py"""

from pathlib import Path

from skodom.conformal import trace
from skodom.fourier import cosine_coefficients
from skodom.io import load_distribution
from skodom.svg import render_svg

HERE = Path(__file__).parent
DATA = HERE.parent / "data"
FIXTURES = ["uniform", "bernoulli", "three_atom", "gaussian", "cantor", "geometric"]
GRID = 2001


def build(name: str) -> str:
    dist = load_distribution(DATA / f"{name}.json")
    series = cosine_coefficients(dist)
    return render_svg(trace(series, dist, GRID), title=name)


if __name__ == "__main__":
    for name in FIXTURES:
        (HERE / f"{name}.svg").write_text(build(name), encoding="utf-8")
        print("wrote", name)
