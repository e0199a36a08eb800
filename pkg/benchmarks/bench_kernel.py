"""Compare the compiled and pure-Python search backends.

Usage: python3 benchmarks/bench_kernel.py [--replicates 20] [--distance 20]
"""
import argparse
import os
import time

from froglab import passage
from froglab.field import FieldSpec, RandomField
from froglab.passage import Config, first_passage


def run(backend: str, replicates: int, distance: int, r: float) -> tuple[float, list]:
    if backend == "python":
        os.environ["FROGLAB_BACKEND"] = "python"
    else:
        os.environ.pop("FROGLAB_BACKEND", None)
    H = 8 * distance
    values = []
    start = time.perf_counter()
    for i in range(replicates):
        f = RandomField(FieldSpec(2024, 2, H, H, i))
        values.append(first_passage(f, Config.at(f, r), (0, 0), (distance, 0)).value)
    return (time.perf_counter() - start) / replicates, values


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--replicates", type=int, default=20)
    ap.add_argument("--distance", type=int, default=20)
    ap.add_argument("--r", type=float, default=0.7)
    args = ap.parse_args()
    if not passage.compiled_available():
        raise SystemExit("compiled kernel not built; run pip install -e . --no-build-isolation")
    py, vp = run("python", args.replicates, args.distance, args.r)
    cc, vc = run("compiled", args.replicates, args.distance, args.r)
    assert vp == vc, "backends disagree"
    print(f"distance {args.distance}, r {args.r}, {args.replicates} replicates")
    print(f"python    {py * 1e3:9.2f} ms/replicate")
    print(f"compiled  {cc * 1e3:9.2f} ms/replicate")
    print(f"speedup   {py / cc:9.1f}x")


if __name__ == "__main__":
    main()
