"""Write the surface data behind the figure presets (x y numeric analytic per line)."""

import argparse
from pathlib import Path

from fitted_mpfa.experiment import dump_surface, make_config


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=Path("results"))
    ap.add_argument("--n", type=int, default=None, help="override the preset grid size")
    args = ap.parse_args(argv)
    args.out.mkdir(parents=True, exist_ok=True)
    for fig in ("fig1", "fig2", "fig3"):
        cfg = make_config(fig)
        n = args.n or cfg.n_list[0]
        if fig == "fig1":
            dump_surface(cfg, cfg.schemes[0], n, args.out / "fig1_analytic.txt", analytic_only=True)
            continue
        for scheme in cfg.schemes:
            dump_surface(cfg, scheme, n, args.out / f"{fig}_{scheme}.txt")
            print(f"{fig}: {scheme} N={n}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
