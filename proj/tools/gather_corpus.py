#!/usr/bin/env python3
# Copyright 2026 The msblade Authors
# SPDX-License-Identifier: Apache-2.0
"""Builds a public color-photo corpus for training and evaluation.

Images are pulled from sample-data folders shipped inside PyPI archives,
converted to 8-bit RGB PNG and split into train/ and heldout/.  Archives
are cached, so reruns are offline.

    gather_corpus.py OUT_DIR [--cache DIR]
"""

import argparse
import bz2
import hashlib
import io
import json
import re
import sys
import tarfile
import urllib.parse
import urllib.request
import zipfile
from pathlib import Path

import numpy as np
from PIL import Image

INDEX = "https://pypi.org/simple"

# project -> filename pattern picked from the simple index
ARCHIVES = {
    "scikit-image": r"scikit_image-0\.25\.2-cp310-cp310-manylinux_2_17_x86_64[^\"#]*\.whl",
    "scikit-learn": r"scikit_learn-1\.7\.2-cp310-cp310-manylinux[^\"#]*x86_64[^\"#]*\.whl",
    "matplotlib": r"matplotlib-3\.10\.\d+-cp310-cp310-manylinux[^\"#]*x86_64[^\"#]*\.whl",
    "sporco": r"sporco-0\.2\.2\.post1-py3-none-any\.whl",
    "mahotas": r"mahotas-1\.4\.19-cp310-cp310-manylinux[^\"#]*x86_64[^\"#]*\.whl",
    "pyiqa": r"pyiqa-0\.1\.16-py3-none-any\.whl",
    "ultralytics": r"ultralytics-8\.4\.177-py3-none-any\.whl",
    "imgaug": r"imgaug-0\.4\.0-py2\.py3-none-any\.whl",
    "scipy": r"scipy-1\.9\.3-cp310-cp310-manylinux_2_17_x86_64[^\"#]*\.whl",
    "caer": r"caer-2\.1\.1-py3-none-any\.whl",
    "insightface": r"insightface-2\.1-py3-none-any\.whl",
    "pillow": r"pillow-11\.0\.0\.tar\.gz",
    "opencv-python": r"opencv-python-4\.9\.0\.80\.tar\.gz",
    "opencv-contrib-python": r"opencv-contrib-python-4\.9\.0\.80\.tar\.gz",
}

# (project, member suffix, output stem, split)
IMAGES = [
    ("scikit-image", "skimage/data/astronaut.png", "astronaut", "heldout"),
    ("scikit-image", "skimage/data/chelsea.png", "chelsea", "heldout"),
    ("scikit-image", "skimage/data/coffee.png", "coffee", "heldout"),
    ("scikit-image", "skimage/data/hubble_deep_field.jpg", "hubble", "train"),
    ("scikit-image", "skimage/data/ihc.png", "ihc", "train"),
    ("scikit-image", "skimage/data/motorcycle_left.png", "motorcycle", "train"),
    ("scikit-image", "skimage/data/retina.jpg", "retina", "train"),
    ("scikit-image", "skimage/data/rocket.jpg", "rocket", "train"),
    ("scikit-learn", "sklearn/datasets/images/china.jpg", "china", "train"),
    ("scikit-learn", "sklearn/datasets/images/flower.jpg", "sklearn_flower", "train"),
    ("matplotlib", "mpl-data/sample_data/grace_hopper.jpg", "grace_hopper", "train"),
    ("sporco", "sporco/data/kodim23.png", "kodim23", "heldout"),
    ("sporco", "sporco/data/monarch.png", "monarch", "heldout"),
    ("sporco", "sporco/data/sail.png", "sail", "train"),
    ("sporco", "sporco/data/tulips.png", "tulips", "train"),
    ("sporco", "sporco/data/barbara.png", "barbara", "train"),
    ("mahotas", "mahotas/demos/data/DepartmentStore.jpg", "department_store", "train"),
    ("mahotas", "mahotas/demos/data/lena.jpg", "lena", "train"),
    ("pyiqa", "ResultsCalibra/ref_dir/I03.bmp", "calibra_i03", "train"),
    ("pyiqa", "ResultsCalibra/ref_dir/I04.bmp", "calibra_i04", "train"),
    ("pyiqa", "ResultsCalibra/ref_dir/I06.bmp", "calibra_i06", "train"),
    ("pyiqa", "ResultsCalibra/ref_dir/I08.bmp", "calibra_i08", "train"),
    ("pyiqa", "ResultsCalibra/ref_dir/I19.bmp", "calibra_i19", "train"),
    ("pyiqa", "tests/test_efficiency_img_dir/SPAQ_10241.jpg", "spaq_10241", "train"),
    ("pyiqa", "tests/test_efficiency_img_dir/frame_4wrwr48cdk6rbcjl.jpg", "frame_a", "train"),
    ("pyiqa", "tests/test_efficiency_img_dir/frame_7gzdcz9sif0ekg31.jpg", "frame_b", "train"),
    ("pyiqa", "tests/test_efficiency_img_dir/frame_9ogwhvvy7gfj6jzh.jpg", "frame_c", "train"),
    ("ultralytics", "ultralytics/assets/bus.jpg", "bus", "train"),
    ("ultralytics", "ultralytics/assets/zidane.jpg", "zidane", "train"),
    ("imgaug", "imgaug/quokka.jpg", "quokka", "train"),
    ("scipy", "scipy/misc/face.dat", "raccoon", "train"),
    ("caer", "caer/data/black_cat.jpg", "black_cat", "train"),
    ("caer", "caer/data/camera.jpg", "caer_camera", "train"),
    ("caer", "caer/data/fighter_fish.jpg", "fighter_fish", "train"),
    ("caer", "caer/data/gold_fish.jpg", "gold_fish", "train"),
    ("caer", "caer/data/guitar.jpg", "guitar", "train"),
    ("caer", "caer/data/puppy.jpg", "puppy", "heldout"),
    ("caer", "caer/data/snow.jpg", "snow", "train"),
    ("caer", "caer/data/sunrise.jpg", "sunrise", "train"),
    ("caer", "caer/data/tent.jpg", "tent", "train"),
    ("insightface", "insightface/data/images/t1.jpg", "group_photo", "train"),
    ("pillow", "Tests/images/exif-72dpi-int.jpg", "mountain", "train"),
    ("pillow", "Tests/images/exif_gps_typeerror.jpg", "aircraft", "train"),
    ("pillow", "Tests/images/flower.jpg", "pillow_flower", "heldout"),
    ("pillow", "Tests/images/iptc.jpg", "facade", "train"),
    ("pillow", "Tests/images/junk_jpeg_header.jpg", "meadow", "train"),
    ("opencv-python", "samples/data/aero1.jpg", "aero", "train"),
    ("opencv-python", "samples/data/aloeL.jpg", "aloe", "train"),
    ("opencv-python", "samples/data/apple.jpg", "apple", "train"),
    ("opencv-python", "samples/data/baboon.jpg", "baboon", "heldout"),
    ("opencv-python", "samples/data/board.jpg", "board", "train"),
    ("opencv-python", "samples/data/building.jpg", "building", "train"),
    ("opencv-python", "samples/data/butterfly.jpg", "butterfly", "heldout"),
    ("opencv-python", "samples/data/ela_original.jpg", "ela", "train"),
    ("opencv-python", "samples/data/fruits.jpg", "fruits", "heldout"),
    ("opencv-python", "samples/data/graf1.png", "graffiti", "train"),
    ("opencv-python", "samples/data/home.jpg", "home", "train"),
    ("opencv-python", "samples/data/leuvenA.jpg", "leuven", "train"),
    ("opencv-python", "samples/data/messi5.jpg", "messi", "heldout"),
    ("opencv-python", "samples/data/orange.jpg", "orange", "train"),
    ("opencv-python", "samples/data/pca_test1.jpg", "pca_objects", "train"),
    ("opencv-python", "samples/data/rubberwhale1.png", "rubberwhale", "train"),
    ("opencv-python", "samples/data/squirrel_cls.jpg", "squirrel", "train"),
    ("opencv-python", "samples/data/stuff.jpg", "stuff", "train"),
    ("opencv-python", "samples/data/smarties.png", "smarties", "train"),
    ("opencv-contrib-python", "alphamat/samples/input_images/plant.jpg", "plant", "heldout"),
    ("opencv-contrib-python", "sfm/samples/data/images/resized_IMG_2889.jpg", "sfm_scene", "train"),
    ("opencv-contrib-python", "text/samples/scenetext01.jpg", "scenetext01", "train"),
    ("opencv-contrib-python", "text/samples/scenetext02.jpg", "scenetext02", "train"),
    ("opencv-contrib-python", "text/samples/scenetext03.jpg", "scenetext03", "train"),
    ("opencv-contrib-python", "text/samples/scenetext04.jpg", "scenetext04", "train"),
    ("opencv-contrib-python", "text/samples/scenetext05.jpg", "scenetext05", "train"),
    ("opencv-contrib-python", "text/samples/scenetext06.jpg", "scenetext06", "train"),
    ("opencv-contrib-python", "samples/data/corridor.jpg", "corridor", "train"),
]


def resolve_url(project):
    page_url = f"{INDEX}/{project}/"
    with urllib.request.urlopen(page_url, timeout=60) as r:
        html = r.read().decode("utf-8", "replace")
    for href in re.findall(r'href="([^"]+)"', html):
        path = href.split("#", 1)[0]
        if re.fullmatch(ARCHIVES[project], path.rsplit("/", 1)[-1]):
            return urllib.parse.urljoin(page_url, path)
    raise RuntimeError(f"no archive matching {ARCHIVES[project]!r} for {project}")


def fetch(project, cache):
    hits = [p for p in cache.glob("*") if re.fullmatch(ARCHIVES[project], p.name)]
    if hits:
        return hits[0]
    url = resolve_url(project)
    dest = cache / url.rsplit("/", 1)[-1]
    print(f"fetching {dest.name}", file=sys.stderr)
    tmp = dest.with_suffix(dest.suffix + ".part")
    with urllib.request.urlopen(url, timeout=600) as r, open(tmp, "wb") as f:
        while chunk := r.read(1 << 20):
            f.write(chunk)
    tmp.rename(dest)
    return dest


class Archive:
    def __init__(self, path):
        self.path = path
        if path.suffix == ".whl":
            self._zip = zipfile.ZipFile(path)
            self._names = self._zip.namelist()
        else:
            self._tar = tarfile.open(path)
            self._names = [m.name for m in self._tar.getmembers() if m.isfile()]
            self._zip = None

    def read(self, suffix):
        hits = [n for n in self._names if n.endswith("/" + suffix) or n == suffix]
        if len(hits) != 1:
            raise RuntimeError(f"{self.path.name}: {len(hits)} members match {suffix}")
        if self._zip is not None:
            return self._zip.read(hits[0])
        return self._tar.extractfile(hits[0]).read()


def decode(member, data):
    if member.endswith("face.dat"):
        raw = np.frombuffer(bz2.decompress(data), dtype=np.uint8)
        return Image.fromarray(raw.reshape(768, 1024, 3))
    im = Image.open(io.BytesIO(data))
    if im.mode not in ("RGB", "RGBA"):
        raise RuntimeError(f"{member}: unexpected mode {im.mode}")
    return im.convert("RGB")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("out_dir", type=Path)
    ap.add_argument("--cache", type=Path, default=Path.home() / ".cache" / "msblade-corpus")
    args = ap.parse_args()

    args.cache.mkdir(parents=True, exist_ok=True)
    stats = {"train": {"images": 0, "megapixels": 0.0}, "heldout": {"images": 0, "megapixels": 0.0}}
    files = []
    archives = {}
    for project, member, stem, split in IMAGES:
        if project not in archives:
            archives[project] = Archive(fetch(project, args.cache))
        img = decode(member, archives[project].read(member))
        out = args.out_dir / split / f"{stem}.png"
        out.parent.mkdir(parents=True, exist_ok=True)
        img.save(out)
        mp = img.width * img.height / 1e6
        stats[split]["images"] += 1
        stats[split]["megapixels"] += mp
        files.append({
            "file": f"{split}/{stem}.png",
            "source": f"{archives[project].path.name}:{member}",
            "width": img.width,
            "height": img.height,
            "sha256": hashlib.sha256(out.read_bytes()).hexdigest(),
        })
    (args.out_dir / "corpus.json").write_text(json.dumps({"splits": stats, "files": files}, indent=1))
    for split, s in stats.items():
        print(f"{split}: images={s['images']} megapixels={s['megapixels']:.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
