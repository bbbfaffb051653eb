import warnings

import numpy as np
import pytest

from ridgeclass.errors import (
    CorruptHeaderError,
    EmptyDatasetError,
    InvalidFingerNumberError,
    InvalidGenderError,
    ManifestParseError,
    RegionOutOfBoundsError,
    UnsupportedFormatError,
)
from ridgeclass.image_io import (
    AgeGroup,
    CropRegion,
    Gender,
    GrayImage,
    compose_regions,
    crop,
    load_image,
    load_manifest,
    split_dataset,
    write_image,
    SampleMeta,
)


def make_image(rows, cols, seed=0):
    rng = np.random.default_rng(seed)
    return GrayImage(rng.integers(0, 256, size=(rows, cols), dtype=np.uint8))


class TestPgm:
    def test_decode_handwritten_2x2(self, tmp_path):
        path = tmp_path / "tiny.pgm"
        path.write_bytes(b"P5\n2 2\n255\n" + bytes([0, 255, 128, 7]))
        img = load_image(path)
        assert img.rows == 2 and img.cols == 2
        assert img.pixels.flatten().tolist() == [0, 255, 128, 7]

    def test_260x300_orientation(self, tmp_path):
        # header stores width then height: a 260-wide, 300-tall file
        path = tmp_path / "full.pgm"
        write_image(make_image(300, 260), path)
        img = load_image(path)
        assert img.rows == 300
        assert img.cols == 260

    def test_header_comments_are_skipped(self, tmp_path):
        path = tmp_path / "c.pgm"
        path.write_bytes(b"P5\n# a comment\n2 1\n# another\n255\n" + bytes([9, 10]))
        img = load_image(path)
        assert img.pixels.flatten().tolist() == [9, 10]

    def test_truncated_payload(self, tmp_path):
        path = tmp_path / "short.pgm"
        path.write_bytes(b"P5\n2 2\n255\n" + bytes([1, 2, 3]))
        with pytest.raises(CorruptHeaderError):
            load_image(path)

    def test_excess_payload(self, tmp_path):
        path = tmp_path / "long.pgm"
        path.write_bytes(b"P5\n2 2\n255\n" + bytes(range(6)))
        with pytest.raises(CorruptHeaderError):
            load_image(path)

    def test_color_rejected(self, tmp_path):
        path = tmp_path / "color.ppm"
        path.write_bytes(b"P6\n1 1\n255\n" + bytes([1, 2, 3]))
        with pytest.raises(UnsupportedFormatError):
            load_image(path)

    def test_16bit_rejected(self, tmp_path):
        path = tmp_path / "deep.pgm"
        path.write_bytes(b"P5\n1 1\n65535\n" + bytes([0, 1]))
        with pytest.raises(UnsupportedFormatError):
            load_image(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(FileNotFoundError):
            load_image(tmp_path / "nope.pgm")

    @pytest.mark.parametrize("seed", range(5))
    def test_round_trip(self, tmp_path, seed):
        original = make_image(17, 23, seed=seed)
        path = tmp_path / "rt.pgm"
        write_image(original, path)
        assert load_image(path) == original


class TestCrop:
    def test_identity(self):
        img = make_image(4, 4)
        assert crop(img, CropRegion(0, 0, 4, 4)) == img

    def test_inner_region(self):
        img = GrayImage(np.arange(16, dtype=np.uint8).reshape(4, 4))
        out = crop(img, CropRegion(1, 1, 2, 2))
        assert out.pixels.flatten().tolist() == [5, 6, 9, 10]

    def test_out_of_bounds(self):
        img = make_image(4, 4)
        with pytest.raises(RegionOutOfBoundsError):
            crop(img, CropRegion(3, 3, 2, 2))

    def test_negative_origin(self):
        with pytest.raises(RegionOutOfBoundsError):
            crop(make_image(4, 4), CropRegion(-1, 0, 2, 2))

    def test_composition(self):
        rng = np.random.default_rng(7)
        img = make_image(32, 40, seed=1)
        for _ in range(25):
            h1 = int(rng.integers(4, img.rows + 1))
            w1 = int(rng.integers(4, img.cols + 1))
            t1 = int(rng.integers(0, img.rows - h1 + 1))
            l1 = int(rng.integers(0, img.cols - w1 + 1))
            r1 = CropRegion(t1, l1, h1, w1)
            h2 = int(rng.integers(1, h1 + 1))
            w2 = int(rng.integers(1, w1 + 1))
            t2 = int(rng.integers(0, h1 - h2 + 1))
            l2 = int(rng.integers(0, w1 - w2 + 1))
            r2 = CropRegion(t2, l2, h2, w2)
            assert crop(crop(img, r1), r2) == crop(img, compose_regions(r1, r2))


class TestManifest:
    def write(self, tmp_path, rows):
        path = tmp_path / "manifest.csv"
        path.write_text("path,gender,finger,age_group\n" + "\n".join(rows) + "\n")
        return path

    def test_basic_rows(self, tmp_path):
        path = self.write(tmp_path, ["imgs/a.pgm,M,1,20-25", "imgs/b.pgm,F,10,"])
        samples = load_manifest(path)
        assert len(samples) == 2
        assert samples[0].gender is Gender.MALE
        assert samples[0].finger_no == 1
        assert samples[0].age_group is AgeGroup.Y20_TO_25
        assert samples[0].image_path == tmp_path / "imgs/a.pgm"
        assert samples[1].gender is Gender.FEMALE
        assert samples[1].age_group is None

    def test_all_age_groups(self, tmp_path):
        rows = [f"x.pgm,M,1,{a.value}" for a in AgeGroup]
        samples = load_manifest(self.write(tmp_path, rows))
        assert [s.age_group for s in samples] == list(AgeGroup)

    def test_invalid_finger(self, tmp_path):
        path = self.write(tmp_path, ["a.pgm,M,1,", "c.pgm,M,11,20-25"])
        with pytest.raises(InvalidFingerNumberError) as err:
            load_manifest(path)
        assert err.value.line_no == 3

    def test_invalid_gender(self, tmp_path):
        path = self.write(tmp_path, ["a.pgm,X,1,"])
        with pytest.raises(InvalidGenderError):
            load_manifest(path)

    def test_invalid_age_group(self, tmp_path):
        path = self.write(tmp_path, ["a.pgm,M,1,80-90"])
        with pytest.raises(ManifestParseError):
            load_manifest(path)

    def test_bad_header(self, tmp_path):
        path = tmp_path / "manifest.csv"
        path.write_text("file,sex,digit,age\na.pgm,M,1,\n")
        with pytest.raises(ManifestParseError) as err:
            load_manifest(path)
        assert err.value.line_no == 1

    def test_wrong_field_count(self, tmp_path):
        path = self.write(tmp_path, ["a.pgm,M,1"])
        with pytest.raises(ManifestParseError):
            load_manifest(path)


def make_samples(spec):
    """spec: list of (gender, finger, count) triples."""
    samples = []
    for gender, finger, count in spec:
        for i in range(count):
            samples.append(
                SampleMeta(
                    image_path=f"{gender.value}{finger}_{i}.pgm",
                    gender=gender,
                    finger_no=finger,
                )
            )
    return samples


class TestSplit:
    def test_two_thirds_floor(self):
        samples = make_samples([(Gender.MALE, 1, 9)])
        split = split_dataset(samples, seed=0)
        assert len(split.learning) == 6
        assert len(split.testing) == 3

    def test_degenerate_stratum_warns(self):
        samples = make_samples([(Gender.FEMALE, 2, 1)])
        with pytest.warns(UserWarning):
            split = split_dataset(samples, seed=0)
        assert split.learning == []
        assert len(split.testing) == 1

    def test_partition_property(self):
        rng = np.random.default_rng(3)
        for trial in range(20):
            spec = [
                (gender, finger, int(rng.integers(1, 8)))
                for gender in Gender
                for finger in rng.choice(10, size=3, replace=False) + 1
            ]
            samples = make_samples(spec)
            with warnings.catch_warnings():
                warnings.simplefilter("ignore")
                split = split_dataset(samples, seed=trial)
            combined = split.learning + split.testing
            assert sorted(map(id, combined)) == sorted(map(id, samples))
            assert not set(map(id, split.learning)) & set(map(id, split.testing))

    def test_stratified_counts(self):
        samples = make_samples([(Gender.MALE, 1, 6), (Gender.FEMALE, 1, 4)])
        split = split_dataset(samples, seed=5)
        male_learn = sum(s.gender is Gender.MALE for s in split.learning)
        female_learn = sum(s.gender is Gender.FEMALE for s in split.learning)
        assert male_learn == 4  # floor(2/3 * 6)
        assert female_learn == 2  # floor(2/3 * 4)

    def test_determinism(self):
        samples = make_samples(
            [(Gender.MALE, f, 5) for f in range(1, 6)]
            + [(Gender.FEMALE, f, 5) for f in range(1, 6)]
        )
        first = split_dataset(samples, seed=42)
        second = split_dataset(samples, seed=42)
        assert first.learning == second.learning
        assert first.testing == second.testing

    def test_empty_dataset(self):
        with pytest.raises(EmptyDatasetError):
            split_dataset([], seed=0)
