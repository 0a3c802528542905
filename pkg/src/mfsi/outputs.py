"""CSV/PGM writers and the run manifest.

All numeric CSV values use ``%.12e`` so byte-identical reruns are possible;
the manifest is written atomically and records a SHA-256 per emitted file.
"""

import hashlib
import json
import os
import tempfile

import numpy as np

FMT = "%.12e"


def _fmt(x):
    return FMT % x


def write_field_csv(path, field):
    """Field rows in grid row-major order with a coordinate header."""
    grid = field.grid
    cols = ["x", "y", "z"][: grid.dim]
    cells = grid.cell_centers()
    with open(path, "w") as fh:
        fh.write(",".join(cols + ["value"]) + "\n")
        for cell, v in zip(cells, field.values):
            fh.write(",".join(_fmt(c) for c in cell) + "," + _fmt(v) + "\n")


def write_field_pgm(path, field):
    """P2 image of a 2D field, values mapped linearly onto [0, 65535].

    Rows run from the top of the image (largest y) down; columns left to
    right with growing x.
    """
    grid = field.grid
    if grid.dim != 2:
        raise ValueError("PGM output is defined for 2D fields only")
    nx, ny = grid.resolution
    img = field.values.reshape(nx, ny)
    peak = img.max()
    scale = 65535.0 / peak if peak > 0 else 0.0
    levels = np.clip(np.rint(img * scale), 0, 65535).astype(int)
    with open(path, "w") as fh:
        fh.write(f"P2\n{nx} {ny}\n65535\n")
        for iy in range(ny - 1, -1, -1):
            fh.write(" ".join(str(levels[ix, iy]) for ix in range(nx)) + "\n")


def write_profile_csv(path, etas, h):
    with open(path, "w") as fh:
        fh.write("eta,h\n")
        for e, v in zip(etas, h):
            fh.write(f"{_fmt(e)},{_fmt(v)}\n")


def write_band_csv(path, bands):
    """Far-field samples of one pulse, all directions in one file.

    Rows are grouped by direction (index into the scenario's expanded
    direction list) and ordered by ascending frequency within each group.
    """
    with open(path, "w") as fh:
        fh.write("direction_index,omega,re,im\n")
        for idx, band in enumerate(bands):
            omegas = band.grid.ladder()
            vals = band.ladder_samples()
            for w, u in zip(omegas, vals):
                fh.write(f"{idx},{_fmt(w)},{_fmt(u.real)},{_fmt(u.imag)}\n")


def write_matrix_csv(path, entries):
    entries = np.asarray(entries)
    with open(path, "w") as fh:
        fh.write("row,col,re,im\n")
        for r in range(entries.shape[0]):
            for c in range(entries.shape[1]):
                v = entries[r, c]
                fh.write(f"{r},{c},{_fmt(v.real)},{_fmt(v.imag)}\n")


def write_estimates_csv(path, rows):
    """Per-pulse recovery summary (one row per pulse)."""
    with open(path, "w") as fh:
        fh.write("pulse_index,t_nominal,eta1,eta2,t0_estimate,width\n")
        for r in rows:
            fh.write(f"{r['pulse_index']},{_fmt(r['t_nominal'])},{_fmt(r['eta1'])},"
                     f"{_fmt(r['eta2'])},{_fmt(r['t0'])},{_fmt(r['width'])}\n")


def write_trajectory_csv(path, rows, dim):
    axes = ["x", "y", "z"][:dim]
    cen = ",".join(f"centroid_{a}" for a in axes)
    tru = ",".join(f"true_{a}" for a in axes)
    with open(path, "w") as fh:
        fh.write(f"pulse_index,t_nominal,t0_estimate,{cen},{tru},error,status\n")
        for r in rows:
            parts = [str(r["pulse_index"]), _fmt(r["t_nominal"])]
            if r["status"] == "ok":
                parts.append(_fmt(r["t0"]))
                parts.extend(_fmt(v) for v in r["centroid"])
                parts.extend(_fmt(v) for v in r["true"])
                parts.append(_fmt(r["error"]))
            else:
                parts.append("nan")
                parts.extend(["nan"] * (2 * dim + 1))
            parts.append(r["status"])
            fh.write(",".join(parts) + "\n")


def write_signal_csv(path, t_grid, u):
    with open(path, "w") as fh:
        fh.write("t,u\n")
        for t, v in zip(t_grid, u):
            fh.write(f"{_fmt(t)},{_fmt(v)}\n")


def sha256_file(path):
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


def write_manifest(out_dir, data):
    """Atomically write manifest.json next to the run outputs."""
    path = os.path.join(out_dir, "manifest.json")
    fd, tmp = tempfile.mkstemp(dir=out_dir, prefix=".manifest-")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(data, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def load_manifest(out_dir):
    with open(os.path.join(out_dir, "manifest.json")) as fh:
        return json.load(fh)
