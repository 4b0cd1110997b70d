"""Write classifier rasters for several dimensions."""

import argparse
from pathlib import Path

from quadcurv import hypotheses as H

ap = argparse.ArgumentParser(description=__doc__)
ap.add_argument("--dims", default="3,4,5,6")
ap.add_argument("--t-range", default="-2:1")
ap.add_argument("--s-range", default="-1.5:0.5")
ap.add_argument("--res", type=int, default=201)
ap.add_argument("--out-dir", default="scan_out")
args = ap.parse_args()

out = Path(args.out_dir)
out.mkdir(parents=True, exist_ok=True)
for n in (int(d) for d in args.dims.split(",")):
    text = H.scan_region(n, args.t_range, args.s_range, args.res)
    path = out / f"scan_n{n}.csv"
    path.write_text(text)
    covered = sum(1 for line in text.splitlines()[1:] if line.split(",")[3])
    print(f"n={n}: {text.count(chr(10)) - 1} rows, {covered} in some system -> {path}")
