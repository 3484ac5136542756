#!/usr/bin/env python3
"""Generate the synthetic ranking fixtures under data/fixtures/.

The fixtures mimic the shape of a national engineering-institute ranking
table (five parameter scores, composite score, top-100 ranks) for two
consecutive years. They are synthetic and only used for tests and demos.

    python3 tools/make_fixtures.py [--out data/fixtures]
"""

import argparse
import csv
import pathlib

import numpy as np

WEIGHTS = {"tlr": 0.3, "rpc": 0.3, "go": 0.2, "oi": 0.1, "pr": 0.1}
N_POOL = 160
N_RANKED = 100


def clip2(x):
    return np.round(np.clip(x, 0.0, 100.0), 2)


def latent_pool(rng):
    quality = rng.normal(0.0, 1.0, N_POOL)
    return {
        "quality": quality,
        "tlr": 61 + 7 * quality + rng.normal(0, 6, N_POOL),
        "rpc": 26 * np.exp(0.75 * quality + rng.normal(0, 0.25, N_POOL)),
        "go": 62 + 6 * quality + rng.normal(0, 6, N_POOL),
        "oi": 52 + rng.normal(0, 8, N_POOL),
        "pr": 13 * np.exp(1.0 * quality + rng.normal(0, 0.4, N_POOL)),
    }


def year_table(pool, rng, drift):
    cols = {}
    for key in WEIGHTS:
        noise = rng.normal(0, drift[key], N_POOL)
        cols[key] = clip2(pool[key] + noise)
    score = sum(cols[k] * w for k, w in WEIGHTS.items())
    order = np.argsort(-score, kind="stable")[:N_RANKED]
    rows = []
    for rank, idx in enumerate(order, start=1):
        row = {k: float(cols[k][idx]) for k in WEIGHTS}
        exact = sum(row[k] * w for k, w in WEIGHTS.items())
        row["score"] = float(np.floor(exact * 100 + 0.5 + 1e-9) / 100)
        row["institute_id"] = f"IR-E-{idx + 1:04d}"
        row["name"] = f"Synthetic Institute {idx + 1:03d}"
        row["rank"] = rank
        rows.append(row)
    return rows


def tlr_subparameters(rows, rng):
    # TLR = SS (20) + FSR (30) + FQE (20) + FRU (30), each scaled to 0..100 here.
    out = []
    for row in rows:
        tlr = row["tlr"]
        fqe = clip2(tlr + 12 * (tlr - 61) / 7 + rng.normal(0, 5))
        ss = clip2(tlr + rng.normal(0, 12))
        fru = clip2(tlr + rng.normal(0, 12))
        fsr = clip2((tlr - 0.2 * ss - 0.2 * fqe - 0.3 * fru) / 0.3)
        out.append({
            "institute_id": row["institute_id"], "name": row["name"],
            "rank": row["rank"], "tlr": tlr, "rpc": row["rpc"], "go": row["go"],
            "oi": row["oi"], "ss": float(ss), "fsr": float(fsr),
            "fqe": float(fqe), "fru": float(fru),
        })
    return out


def write(path, rows, fields):
    with open(path, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields, lineterminator="\n")
        w.writeheader()
        for row in rows:
            w.writerow({k: (f"{row[k]:.2f}" if isinstance(row[k], float) else row[k])
                        for k in fields})


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parents[1] / "data" / "fixtures"))
    ap.add_argument("--seed", type=int, default=2018)
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    rng = np.random.default_rng(args.seed)
    pool = latent_pool(rng)
    y2018 = year_table(pool, rng, {"tlr": 1.0, "rpc": 1.0, "go": 1.0, "oi": 1.0, "pr": 1.0})
    y2019 = year_table(pool, rng, {"tlr": 2.5, "rpc": 3.0, "go": 2.5, "oi": 2.5, "pr": 2.0})

    fields = ["institute_id", "name", "rank", "tlr", "rpc", "go", "oi", "pr", "score"]
    write(out / "synthetic_2018.csv", y2018, fields)
    write(out / "synthetic_2019.csv", y2019, fields)
    write(out / "synthetic_tlr_sub_2018.csv", tlr_subparameters(y2018, rng),
          ["institute_id", "name", "rank", "tlr", "rpc", "go", "oi", "ss", "fsr", "fqe", "fru"])


if __name__ == "__main__":
    main()
