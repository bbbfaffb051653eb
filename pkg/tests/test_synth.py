import numpy as np
import pytest

from ridgeclass.dwt import decompose, energy_vector
from ridgeclass.errors import InvalidSpecError
from ridgeclass.image_io import Gender, load_image, load_manifest
from ridgeclass.synth import SynthClass, SynthSpec, generate, write_dataset


def simple_spec(**overrides):
    defaults = dict(
        classes=(
            SynthClass(Gender.MALE, ridge_period_px=10.0, orientation_jitter_deg=15.0, count=12),
            SynthClass(Gender.FEMALE, ridge_period_px=6.0, orientation_jitter_deg=15.0, count=12),
        ),
        image_shape=(64, 52),
        noise_sigma=5.0,
        seed=7,
    )
    defaults.update(overrides)
    return SynthSpec(**defaults)


class TestValidation:
    def test_duplicate_periods(self):
        with pytest.raises(InvalidSpecError):
            generate(
                simple_spec(
                    classes=(
                        SynthClass(Gender.MALE, 8.0, 0.0, 4),
                        SynthClass(Gender.FEMALE, 8.0, 0.0, 4),
                    )
                )
            )

    def test_zero_count(self):
        with pytest.raises(InvalidSpecError):
            generate(simple_spec(classes=(SynthClass(Gender.MALE, 8.0, 0.0, 0),)))

    def test_negative_sigma(self):
        with pytest.raises(InvalidSpecError):
            generate(simple_spec(noise_sigma=-1.0))

    def test_no_classes(self):
        with pytest.raises(InvalidSpecError):
            generate(simple_spec(classes=()))

    def test_bad_period(self):
        with pytest.raises(InvalidSpecError):
            generate(simple_spec(classes=(SynthClass(Gender.MALE, 0.0, 0.0, 4),)))


class TestGeneration:
    def test_deterministic(self):
        spec = simple_spec()
        first = generate(spec)
        second = generate(spec)
        assert len(first) == len(second) == 24
        for (img_a, meta_a), (img_b, meta_b) in zip(first, second):
            assert np.array_equal(img_a.pixels, img_b.pixels)
            assert meta_a == meta_b

    def test_noiseless_zero_jitter_images_identical(self):
        spec = simple_spec(
            classes=(SynthClass(Gender.MALE, 8.0, 0.0, 6),),
            noise_sigma=0.0,
        )
        dataset = generate(spec)
        reference = dataset[0][0].pixels
        for image, _ in dataset[1:]:
            assert np.array_equal(image.pixels, reference)

    def test_noiseless_grating_periodicity(self):
        # with zero jitter the wave runs along the rows; period 8 repeats
        spec = simple_spec(
            classes=(SynthClass(Gender.MALE, 8.0, 0.0, 1),),
            image_shape=(32, 48),
            noise_sigma=0.0,
        )
        pixels = generate(spec)[0][0].pixels
        assert np.array_equal(pixels[:, :-8], pixels[:, 8:])
        # constant along the wavefront (columns)
        assert np.all(pixels == pixels[0:1, :])

    def test_finger_round_robin(self):
        dataset = generate(simple_spec())
        male_fingers = [m.finger_no for _, m in dataset if m.gender is Gender.MALE]
        assert male_fingers == [(i % 10) + 1 for i in range(12)]

    def test_labels_and_counts(self):
        dataset = generate(simple_spec())
        males = [m for _, m in dataset if m.gender is Gender.MALE]
        females = [m for _, m in dataset if m.gender is Gender.FEMALE]
        assert len(males) == 12 and len(females) == 12

    def test_shapes(self):
        for image, _ in generate(simple_spec()):
            assert (image.rows, image.cols) == (64, 52)

    def test_distinct_seeds_differ(self):
        a = generate(simple_spec(seed=1))
        b = generate(simple_spec(seed=2))
        assert any(
            not np.array_equal(ia.pixels, ib.pixels) for (ia, _), (ib, _) in zip(a, b)
        )


class TestClassSignal:
    def test_high_frequency_class_has_larger_detail_energy(self):
        spec = simple_spec(
            classes=(
                SynthClass(Gender.MALE, ridge_period_px=10.0, orientation_jitter_deg=15.0, count=20),
                SynthClass(Gender.FEMALE, ridge_period_px=6.0, orientation_jitter_deg=15.0, count=20),
            ),
            noise_sigma=0.0,
        )
        sums = {Gender.MALE: [], Gender.FEMALE: []}
        for image, meta in generate(spec):
            vec = energy_vector(decompose(image, 1)).energies
            sums[meta.gender].append(vec[1] + vec[2] + vec[3])  # LH + HL + HH
        assert np.mean(sums[Gender.FEMALE]) > np.mean(sums[Gender.MALE])


class TestWriteDataset:
    def test_manifest_round_trip(self, tmp_path):
        dataset = generate(simple_spec())
        manifest = write_dataset(dataset, tmp_path / "data")
        samples = load_manifest(manifest)
        assert len(samples) == len(dataset)
        for (image, meta), loaded in zip(dataset, samples):
            assert loaded.gender is meta.gender
            assert loaded.finger_no == meta.finger_no
            assert loaded.age_group is None
            assert load_image(loaded.image_path) == image
