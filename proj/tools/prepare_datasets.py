#!/usr/bin/env python3
"""Writes the four UCI benchmark datasets as CSV (features..., class) under data/.

Iris and Wine come from scikit-learn's bundled copies. Heart (Statlog) and
New Thyroid come from the keel-ds wheel (New Thyroid as hyper vs. rest).

usage: prepare_datasets.py <keel_ds package dir> <out dir>
"""
import csv
import os
import sys

from sklearn import datasets


def keel_rows(path):
    rows = []
    with open(path) as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("@"):
                continue
            rows.append([c.strip() for c in line.split(",")])
    return rows


def write(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)


def main():
    keel, out = sys.argv[1], sys.argv[2]
    os.makedirs(out, exist_ok=True)

    iris = datasets.load_iris()
    write(os.path.join(out, "iris.csv"),
          ["sepal_length", "sepal_width", "petal_length", "petal_width", "species"],
          [[repr(float(v)) for v in x] + [iris.target_names[t]]
           for x, t in zip(iris.data, iris.target)])

    wine = datasets.load_wine()
    write(os.path.join(out, "wine.csv"),
          list(wine.feature_names) + ["class"],
          [[repr(float(v)) for v in x] + [f"class_{t + 1}"]
           for x, t in zip(wine.data, wine.target)])

    heart = keel_rows(os.path.join(keel, "data/balanced/raw/heart.dat"))
    names = ["age", "sex", "chest_pain", "rest_bp", "cholesterol", "fasting_sugar",
             "rest_ecg", "max_heart_rate", "exercise_angina", "oldpeak", "slope",
             "major_vessels", "thal", "class"]
    write(os.path.join(out, "heart.csv"), names,
          [r[:-1] + ["absent" if r[-1] == "1" else "present"] for r in heart])

    # Only the hyperthyroid-vs-rest split is available offline; both KEEL
    # one-vs-rest files carry the same 35 positives, so the hypo class cannot
    # be separated from normal. The dataset is written with two classes.
    thyroid = keel_rows(os.path.join(keel, "data/imbalanced/raw/new-thyroid1.dat"))
    write(os.path.join(out, "newthyroid.csv"),
          ["t3_resin", "thyroxin", "triiodothyronine", "tsh", "tsh_diff", "class"],
          [r[:-1] + ["hyper" if r[-1] == "positive" else "other"] for r in thyroid])

if __name__ == "__main__":
    main()
