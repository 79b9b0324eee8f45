"""Peak scaling fits and the N*E vs N*g collapse, with a window scan.

Prints the fitted laws for the default size list, then the collapse spread
for a few alternative upper ends of the Ng window to show how the statistic
depends on it.
"""

import argparse
import json

from mpchain.analysis import COLLAPSE_WINDOW, DEFAULT_SCALING_NS, scaling_analysis


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n-list", type=int, nargs="+", default=list(DEFAULT_SCALING_NS))
    ap.add_argument("--upper", type=float, nargs="+", default=[0.5, 0.8, 1.0, 1.5])
    ap.add_argument("--json", action="store_true", help="dump the full fit for the default window")
    args = ap.parse_args()

    fit = scaling_analysis(args.n_list)
    print(f"log10 g_m = {fit.slope_gm:.4f} log10 N + {fit.intercept_gm:.4f}   (rss {fit.rss_gm:.2e})")
    print(f"log10 E_m = {fit.slope_Em:.4f} log10 N + {fit.intercept_Em:.4f}   (rss {fit.rss_Em:.2e})")
    for pk in fit.peaks:
        print(f"  N={pk.N:3d}  g_m={pk.g_m:.6f}  N*g_m={pk.N * pk.g_m:.4f}  E_m={pk.E_m:.6f}  certified={pk.certified}")
    for hi in args.upper:
        f = scaling_analysis(args.n_list, window=(COLLAPSE_WINDOW[0], hi))
        print(f"window Ng in [{COLLAPSE_WINDOW[0]:g}, {hi:g}]: scatter {f.collapse_scatter:.4f} over {f.collapse_decades:.2f} decades")
    if args.json:
        print(json.dumps(fit.to_dict(), indent=1))


if __name__ == "__main__":
    main()
