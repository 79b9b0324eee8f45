"""Write one CSV per figure preset into an output directory.

    python scripts/reproduce_figures.py --out data/
"""

import argparse
import time
from pathlib import Path

from mpchain import analysis


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default="data", help="output directory")
    ap.add_argument("--presets", nargs="+", default=["fig1", "fig2", "fig3", "fig4", "fig5", "fig5odd", "fig6"])
    args = ap.parse_args()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name in args.presets:
        t0 = time.perf_counter()
        if name == "fig6":
            rows = analysis.scaling_rows(analysis.scaling_analysis())
        else:
            rows = [row for spec in analysis.preset(name) for row in analysis.run_sweep(spec)]
        path = out / f"{name}.csv"
        path.write_bytes(analysis.report(rows))
        bad = sum(1 for r in rows if r.error)
        print(f"{name}: {len(rows)} rows ({bad} error rows) -> {path} in {time.perf_counter() - t0:.1f}s")


if __name__ == "__main__":
    main()
