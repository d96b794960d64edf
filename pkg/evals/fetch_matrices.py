"""
Download the SuiteSparse (formerly University of Florida) test matrices.

    python -m evals.fetch_matrices                # the default set
    python -m evals.fetch_matrices qa8fm cfd2     # selected matrices

Each archive is unpacked to data/matrices/<name>.mtx. Nothing else in the
toolkit touches the network; tests marked `network` skip until these files exist.
"""

import os
import io
import tarfile
import argparse
from typing import Dict, List

import requests

from src.sparse_gridkit.config import MATRIX_DIR

BASE_URL = "https://sparse.tamu.edu/MM"

# matrix name -> collection group
MATRICES: Dict[str, str] = {
    "qa8fm": "Cunningham",
    "2cubes_sphere": "Um",
    "thermomech_dM": "Botonakis",
    "thermomech_TK": "Botonakis",
    "finan512": "Mittelmann",
    "cfd2": "Rothberg",
    "Dubcova2": "UTEP",
    "af_shell8": "Schenk_AFE",
    "thermal2": "Schmid",
}
DEFAULT_SET = ("qa8fm", "2cubes_sphere", "thermomech_dM", "finan512")


def matrix_url(name: str) -> str:
    return f"{BASE_URL}/{MATRICES[name]}/{name}.tar.gz"


def fetch_matrix(name: str, out_dir: str = MATRIX_DIR, timeout: float = 60.0) -> str:
    """Download and unpack one matrix; returns the .mtx path"""
    target = os.path.join(out_dir, f"{name}.mtx")
    if os.path.exists(target):
        print(f"    {name}: already present")
        return target

    url = matrix_url(name)
    print(f"    {name}: downloading {url}")
    response = requests.get(url, timeout=timeout)
    response.raise_for_status()

    with tarfile.open(fileobj=io.BytesIO(response.content), mode="r:gz") as archive:
        member = next((m for m in archive.getmembers() if m.name.endswith(f"/{name}.mtx")), None)
        if member is None:
            raise FileNotFoundError(f"{url} holds no {name}.mtx")
        source = archive.extractfile(member)
        os.makedirs(out_dir, exist_ok=True)
        with open(target, "wb") as f:
            f.write(source.read())
    print(f"    {name}: saved to {target}")
    return target


def fetch_all(names: List[str], out_dir: str = MATRIX_DIR) -> List[str]:
    paths = []
    for name in names:
        try:
            paths.append(fetch_matrix(name, out_dir))
        except (requests.RequestException, OSError, tarfile.TarError) as e:
            print(f"    {name}: failed ({e})")
    return paths


if __name__ == "__main__":
    parser = argparse.ArgumentParser(description="Download SuiteSparse test matrices")
    parser.add_argument("names", nargs="*", help=f"Matrices to fetch, any of {sorted(MATRICES)}")
    parser.add_argument("--out-dir", default=MATRIX_DIR)
    args = parser.parse_args()
    unknown = [n for n in args.names if n not in MATRICES]
    if unknown:
        parser.error(f"unknown matrices: {unknown}")

    print("\n" + "=" * 80)
    print("FETCHING TEST MATRICES")
    print("=" * 80)
    fetched = fetch_all(args.names or list(DEFAULT_SET), args.out_dir)
    print(f"\n{len(fetched)} matrices in {args.out_dir}")
