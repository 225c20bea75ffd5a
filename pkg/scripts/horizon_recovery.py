"""Recover a known horizon from noisy two-band landscapes at several sizes and noise levels."""
import argparse
import tempfile
import time
from pathlib import Path

from artdissect.corpus import analyze_image
from artdissect.synth import landscape, generate, save_png


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--horizons", type=float, nargs="+", default=[0.2, 1 / 3, 0.4, 0.5, 0.62])
    ap.add_argument("--sigmas", type=float, nargs="+", default=[0, 8, 16, 32])
    ap.add_argument("--size", type=int, default=512)
    args = ap.parse_args()

    print("horizon,sigma,first_cut,r_c,abs_err,seconds")
    with tempfile.TemporaryDirectory() as tmp:
        for h in args.horizons:
            for sigma in args.sigmas:
                path = save_png(generate(landscape(h, args.size, args.size, sigma=sigma, seed=1)),
                                Path(tmp) / "img.png")
                t0 = time.perf_counter()
                _, comp = analyze_image(path)
                dt = time.perf_counter() - t0
                rc = comp.r_c
                err = "" if rc is None else f"{abs(rc - h):.4f}"
                print(f"{h:.4f},{sigma:g},{comp.first_cut_direction.value if comp.first_cut_direction else ''},"
                      f"{'' if rc is None else f'{rc:.4f}'},{err},{dt:.3f}")


if __name__ == "__main__":
    main()
