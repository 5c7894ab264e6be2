import numpy as np
import pytest
from conftest import rect_mask, write_mask, write_rgb, write_unit_map
from scipy import ndimage

from camobench.attributes.classify import AttributeFlags, classify_attributes, classify_dataset
from camobench.attributes.csvio import load_attribute_csv, write_attribute_csv
from camobench.attributes.features import (
    chi_square,
    combined_distance,
    lab_histogram,
    lbp_bins,
    lbp_codes,
    texture_histogram,
    to_lab,
)
from camobench.attributes.flags import bm_flag, cb_flag, cp_flag, sa_flag, so_flag
from camobench.attributes.gabrat import dc_gabrat
from camobench.attributes.superpixels import (
    Side,
    Superpixel,
    slic_superpixels,
    superpixel_features,
)
from camobench.core.imageio import RgbImage
from camobench.core.maps import BinaryMask
from camobench.errors import (
    DegenerateBoundary,
    InvalidConfig,
    LengthMismatch,
    ManifestError,
    NoBackground,
    NoForeground,
    TooManySuperpixels,
)
from camobench.models import (
    AttributeConfig,
    CenterDirection,
    ChiSquareMode,
    DatasetManifest,
    ManifestEntry,
)

GREEN = (0, 255, 0)
MAGENTA = (255, 0, 255)


def solid(color, shape=(8, 8)) -> RgbImage:
    return RgbImage(np.broadcast_to(np.array(color, dtype=np.uint8), (*shape, 3)))


def superpixel(color, side, index=0) -> Superpixel:
    image = solid(color)
    lab = to_lab(image).reshape(-1, 3)
    return Superpixel(
        id=index,
        members=np.ones((8, 8), dtype=bool),
        mean_lab=lab.mean(axis=0),
        color_hist=lab_histogram(lab, 32),
        texture_hist=texture_histogram(lbp_codes(image)),
        side=side,
    )


def mask_100(rows, cols) -> BinaryMask:
    return BinaryMask(rect_mask(100, 100, rows, cols))


class TestFeatures:
    def test_chi_square_identical(self):
        h = np.array([0.25, 0.25, 0.5])
        assert chi_square(h, h) == 0.0

    def test_chi_square_disjoint(self):
        assert chi_square([1.0, 0.0], [0.0, 1.0]) == pytest.approx(1.0)

    def test_chi_square_shape(self):
        with pytest.raises(LengthMismatch):
            chi_square([1.0], [0.5, 0.5])

    def test_uniform_lbp_bins(self):
        assert lbp_bins(8) == 59

    def test_texture_histogram_is_normalized(self):
        pixels = np.random.default_rng(0).integers(0, 256, size=(16, 16, 3))
        hist = texture_histogram(lbp_codes(RgbImage(pixels)))
        assert hist.shape == (59,)
        assert hist.sum() == pytest.approx(1.0)

    def test_lab_histogram_channels_sum_to_one(self):
        hist = lab_histogram(to_lab(solid(GREEN)).reshape(-1, 3), 16)
        np.testing.assert_allclose(hist.sum(axis=1), 1.0)

    def test_combined_modes(self):
        a, b = superpixel(GREEN, Side.FOREGROUND), superpixel(MAGENTA, Side.BACKGROUND)
        hists = (a.color_hist, a.texture_hist, b.color_hist, b.texture_hist)
        assert combined_distance(*hists, ChiSquareMode.COLOR) == pytest.approx(1.0)
        assert combined_distance(*hists, ChiSquareMode.TEXTURE) == pytest.approx(0.0)
        assert combined_distance(*hists, ChiSquareMode.MEAN) == pytest.approx(0.5)


class TestBackgroundMatching:
    def test_distinct_colors_do_not_match(self):
        superpixels = [superpixel(GREEN, Side.FOREGROUND), superpixel(MAGENTA, Side.BACKGROUND, 1)]
        flag, score = bm_flag(superpixels, AttributeConfig(chi_mode=ChiSquareMode.COLOR))
        assert not flag
        assert score == pytest.approx(1.0)

    def test_same_color_matches(self):
        superpixels = [superpixel(GREEN, Side.FOREGROUND), superpixel(GREEN, Side.BACKGROUND, 1)]
        flag, score = bm_flag(superpixels, AttributeConfig(chi_mode=ChiSquareMode.COLOR))
        assert flag
        assert score == pytest.approx(0.0)

    def test_threshold_is_strict(self):
        superpixels = [superpixel(GREEN, Side.FOREGROUND), superpixel(MAGENTA, Side.BACKGROUND, 1)]
        _, score = bm_flag(superpixels)
        flag, again = bm_flag(superpixels, AttributeConfig(bm_threshold=score))
        assert again == score
        assert not flag

    def test_background_order_does_not_matter(self):
        fg = superpixel(GREEN, Side.FOREGROUND)
        bg = [
            superpixel(MAGENTA, Side.BACKGROUND, 1),
            superpixel((0, 200, 40), Side.BACKGROUND, 2),
            superpixel((90, 90, 90), Side.BACKGROUND, 3),
        ]
        _, forward = bm_flag([fg, *bg])
        _, backward = bm_flag([*reversed(bg), fg])
        assert backward == pytest.approx(forward, abs=1e-12)

    def test_missing_sides(self):
        with pytest.raises(NoForeground):
            bm_flag([superpixel(GREEN, Side.BACKGROUND)])
        with pytest.raises(NoBackground):
            bm_flag([superpixel(GREEN, Side.FOREGROUND)])

    def test_slic_labels_are_consecutive(self):
        pixels = np.random.default_rng(1).integers(0, 256, size=(32, 32, 3))
        labels = slic_superpixels(RgbImage(pixels), AttributeConfig(slic_segments=20))
        assert labels.shape == (32, 32)
        assert set(np.unique(labels)) == set(range(labels.max() + 1))

    def test_too_many_superpixels(self):
        with pytest.raises(TooManySuperpixels):
            slic_superpixels(solid(GREEN), AttributeConfig(slic_segments=65))


class TestSuperpixels:
    def test_single_segment_covers_the_image(self):
        pixels = np.random.default_rng(3).integers(0, 256, size=(16, 16, 3))
        labels = slic_superpixels(RgbImage(pixels), AttributeConfig(slic_segments=1))
        assert np.all(labels == 0)

    def test_uniform_image_splits_evenly(self):
        # 42 = 2 * 21: seeds sit at 10 and 31, so no pixel is equidistant
        labels = slic_superpixels(solid((90, 140, 60), (42, 42)), AttributeConfig(slic_segments=4))
        areas = np.bincount(labels.ravel())
        assert areas.size == 4
        assert np.all(np.abs(areas - 42 * 42 / 4) <= 0.1 * 42 * 42 / 4)

    def test_labels_partition_into_connected_regions(self):
        pixels = np.random.default_rng(4).integers(0, 256, size=(32, 32, 3))
        labels = slic_superpixels(RgbImage(pixels), AttributeConfig(slic_segments=20))
        assert labels.shape == (32, 32)
        for label in np.unique(labels):
            _, components = ndimage.label(labels == label)
            assert components == 1

    def test_uniform_superpixel_has_impulse_color_histograms(self):
        image = solid((30, 160, 200), (12, 12))
        labels = np.zeros((12, 12), dtype=np.int64)
        [sp] = superpixel_features(image, labels, BinaryMask(np.zeros((12, 12), dtype=bool)))
        assert sp.color_hist.shape == (3, 32)
        np.testing.assert_allclose(sp.color_hist.max(axis=1), 1.0)
        assert np.count_nonzero(sp.color_hist) == 3

    def test_side_follows_the_mask_majority(self):
        image = solid(GREEN, (8, 8))
        labels = np.zeros((8, 8), dtype=np.int64)
        labels[:, 4:] = 1
        mask = BinaryMask(rect_mask(8, 8, slice(0, 8), slice(0, 4)))
        inside, outside = superpixel_features(image, labels, mask)
        assert inside.side is Side.FOREGROUND
        assert outside.side is Side.BACKGROUND

    def test_flat_region_fills_the_flat_lbp_bin(self):
        image = solid((120, 120, 120), (10, 10))
        [sp] = superpixel_features(
            image, np.zeros((10, 10), dtype=np.int64), BinaryMask(np.ones((10, 10), dtype=bool))
        )
        assert sp.side is Side.FOREGROUND
        # all neighbors >= center: the all-ones uniform pattern, P(P-1) + 1
        assert sp.texture_hist[lbp_bins(8) - 2] == pytest.approx(1.0)


class TestComplexBackground:
    MASK = BinaryMask(rect_mask(32, 32, slice(12, 20), slice(12, 20)))

    @staticmethod
    def gray(values) -> RgbImage:
        return RgbImage(np.repeat((values * 255).astype(np.uint8)[:, :, None], 3, axis=2))

    def test_pixel_checkerboard_is_near_maximum(self):
        yy, xx = np.mgrid[0:32, 0:32]
        flag, score = cb_flag(self.gray((yy + xx) % 2), self.MASK)
        assert flag
        assert score > 0.95

    def test_pixel_stripes(self):
        _, xx = np.mgrid[0:32, 0:32]
        flag, score = cb_flag(self.gray(xx % 2), self.MASK)
        assert flag
        # 960 background pixels, the 32 in the last column have no forward step
        assert score == pytest.approx(928 / 960 / np.sqrt(2), abs=1e-3)

    def test_coarse_checkerboard_is_complex(self):
        yy, xx = np.mgrid[0:32, 0:32]
        flag, score = cb_flag(self.gray(((yy // 2) + (xx // 2)) % 2), self.MASK)
        assert flag
        assert 0.3 < score < 0.95

    def test_flat_background_is_simple(self):
        flag, score = cb_flag(solid((120, 120, 120), (32, 32)), self.MASK)
        assert not flag
        assert score == 0.0

    def test_unknown_measure(self):
        with pytest.raises(InvalidConfig):
            cb_flag(solid(GREEN, (32, 32)), self.MASK, AttributeConfig(cb_measure="entropy"))

    def test_no_background(self):
        with pytest.raises(NoBackground):
            cb_flag(solid(GREEN), BinaryMask(np.ones((8, 8), dtype=bool)))


class TestGeometricFlags:
    def test_center_position_far(self):
        assert cp_flag(mask_100(slice(49, 51), slice(94, 96)), (100, 100))

    def test_center_position_centered(self):
        assert not cp_flag(mask_100(slice(49, 51), slice(49, 51)), (100, 100))

    def test_center_position_near_direction(self):
        config = AttributeConfig(cp_direction=CenterDirection.NEAR)
        assert cp_flag(mask_100(slice(49, 51), slice(49, 51)), (100, 100), config)

    def test_small_object_boundary(self):
        assert not so_flag(mask_100(slice(0, 2), slice(0, 100)), (100, 100))
        bits = rect_mask(100, 100, slice(0, 2), slice(0, 100))
        bits[1, 99] = False
        assert so_flag(BinaryMask(bits), (100, 100))

    def test_saliency_unknown(self):
        assert sa_flag(None, mask_100(slice(0, 10), slice(0, 10))) is None

    def test_saliency_matches_object(self):
        mask = mask_100(slice(10, 30), slice(10, 30))
        assert sa_flag(mask.as_map(), mask)

    def test_saliency_elsewhere(self):
        mask = mask_100(slice(10, 30), slice(10, 30))
        other = mask_100(slice(60, 80), slice(60, 80))
        assert not sa_flag(other.as_map(), mask)


class TestDisruptiveColoration:
    MASK = BinaryMask(rect_mask(64, 96, slice(24, 40), slice(4, 92)))

    @staticmethod
    def stripes(vertical: bool) -> RgbImage:
        yy, xx = np.mgrid[0:64, 0:96]
        phase = xx if vertical else yy
        gray = np.rint(127.5 + 127.5 * np.cos(2 * np.pi * phase / 8.0)).astype(np.uint8)
        return RgbImage(np.repeat(gray[:, :, None], 3, axis=2))

    def test_stripes_crossing_the_outline(self):
        flag, score = dc_gabrat(self.stripes(vertical=True), self.MASK)
        assert flag
        assert score > 0.6

    def test_stripes_along_the_outline(self):
        flag, score = dc_gabrat(self.stripes(vertical=False), self.MASK)
        assert not flag
        assert score < 0.35

    def test_quarter_turn_invariant(self):
        image = self.stripes(vertical=True)
        _, score = dc_gabrat(image, self.MASK)
        turned = RgbImage(np.rot90(image.pixels))
        _, turned_score = dc_gabrat(turned, BinaryMask(np.rot90(self.MASK.bits)))
        assert turned_score == pytest.approx(score, abs=1e-6)

    def test_degenerate_outline(self):
        bits = np.zeros((64, 96), dtype=bool)
        bits[30, 30:32] = True
        with pytest.raises(DegenerateBoundary):
            dc_gabrat(self.stripes(vertical=True), BinaryMask(bits))


@pytest.fixture
def attr_entry(tmp_path):
    pixels = np.full((32, 32, 3), 110, dtype=np.uint8)
    pixels[8:24, 8:24] = (200, 30, 30)
    bits = rect_mask(32, 32, slice(8, 24), slice(8, 24))
    write_rgb(tmp_path / "images" / "obj.png", pixels)
    write_mask(tmp_path / "instances" / "obj_0.png", bits)
    write_unit_map(tmp_path / "saliency" / "obj.png", bits.astype(float))
    entry = ManifestEntry(
        id="obj",
        image="images/obj.png",
        width=32,
        height=32,
        instances=[{"mask": "instances/obj_0.png"}],
        saliency_map="saliency/obj.png",
        mm=True,
        oc=False,
    )
    return entry, tmp_path


class TestClassify:
    def test_flags_for_every_attribute(self, attr_entry):
        entry, base = attr_entry
        result = classify_attributes(entry, base, AttributeConfig(slic_segments=40))
        assert result.errors == []
        [row] = result.flags
        assert (row.image_id, row.instance_id) == ("obj", "0")
        assert isinstance(row.BM, bool) and isinstance(row.CB, bool)
        assert row.CB is False
        assert row.CP is False
        assert row.SO is False
        assert row.SA is True
        assert (row.MM, row.OC) == (True, False)
        assert 0.0 <= row.gabrat <= 1.0

    def test_missing_image_keeps_geometry(self, attr_entry):
        entry, base = attr_entry
        (base / "images" / "obj.png").unlink()
        result = classify_attributes(entry, base)
        [row] = result.flags
        assert row.BM is None and row.CB is None and row.DC is None
        assert row.CP is False and row.SO is False
        assert [e.kind for e in result.errors] == ["FileMissing"]
        assert result.errors[0].operation == "load_rgb_image"

    def test_dataset_order(self, attr_entry):
        entry, base = attr_entry
        second = entry.model_copy(update={"id": "obj2"})
        manifest = DatasetManifest(dataset="toy", entries=[second, entry])
        manifest._base_dir = base
        result = classify_dataset(manifest, AttributeConfig(slic_segments=40))
        assert [r.image_id for r in result.flags] == ["obj2", "obj"]


class TestAttributeCsv:
    def test_unknown_stays_unknown(self, tmp_path):
        rows = [
            AttributeFlags(image_id="a", instance_id="0", BM=True, CP=False, bm_score=0.25),
            AttributeFlags(image_id="b", instance_id="1", SO=True),
        ]
        path = write_attribute_csv(rows, tmp_path / "attrs.csv")
        assert path.read_text().splitlines()[1] == "a,0,true,,false,,,,,,0.25,,"
        assert load_attribute_csv(path) == rows
        assert rows[1].carries("SO") and not rows[1].carries("BM")

    def test_malformed_flag(self, tmp_path):
        path = tmp_path / "bad.csv"
        path.write_text("image_id,instance_id,BM\na,0,maybe\n")
        with pytest.raises(ManifestError):
            load_attribute_csv(path)
