#!/usr/bin/env python3
"""Extract the benchmark datasets that are redistributed inside PyPI packages
and write them as plain comma-separated files under data/.

    python3 tools/fetch_datasets.py [--out data]

Sources
  boston.csv  MASS::Boston       (pydataset sdist, Rdatasets csv)
  vaso.csv    robustbase::vaso   (pydataset sdist, Rdatasets csv)
  mroz.csv    wooldridge::mroz   (wooldridge wheel)

Pima (392 complete cases), German credit and California housing are not
redistributed by any package on the mirror; see data/DATASETS.md for the
upstream locations and expected layout.
"""
import argparse
import bz2
import csv
import hashlib
import io
import pathlib
import subprocess
import sys
import tarfile
import tempfile
import zipfile


def pip_download(pkg: str, dest: pathlib.Path) -> pathlib.Path:
    subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps",
                    "-q", "-d", str(dest), pkg], check=True)
    hits = [p for p in dest.iterdir()
            if p.name.lower().startswith(pkg.lower())]
    if not hits:
        raise SystemExit(f"download of {pkg} produced nothing")
    return hits[0]


def rdata_csv(sdist: pathlib.Path, member: str) -> list[list[str]]:
    with tarfile.open(sdist) as outer:
        res = outer.extractfile(next(m for m in outer.getmembers()
                                     if m.name.endswith("resources.tar.gz")))
        with tarfile.open(fileobj=io.BytesIO(res.read())) as inner:
            f = inner.extractfile(f"resources/rdata/csv/{member}")
            rows = list(csv.reader(io.TextIOWrapper(f, "utf-8")))
    # Drop the R row-name column.
    return [r[1:] for r in rows]


def write(path: pathlib.Path, rows: list[list[str]]) -> None:
    with path.open("w", newline="") as f:
        csv.writer(f, lineterminator="\n").writerows(rows)
    digest = hashlib.sha256(path.read_bytes()).hexdigest()
    print(f"{path.name}: {len(rows) - 1} rows  sha256={digest}")


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="data")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    with tempfile.TemporaryDirectory() as tmp:
        tmp = pathlib.Path(tmp)
        sdist = pip_download("pydataset", tmp)
        write(out / "boston.csv", rdata_csv(sdist, "MASS/Boston.csv"))
        write(out / "vaso.csv", rdata_csv(sdist, "robustbase/vaso.csv"))

        wheel = pip_download("wooldridge", tmp)
        with zipfile.ZipFile(wheel) as z:
            raw = bz2.decompress(z.read("wooldridge/datasets/mroz.csv.bz2"))
        rows = list(csv.reader(io.StringIO(raw.decode("utf-8"))))
        write(out / "mroz.csv", rows)


if __name__ == "__main__":
    main()
