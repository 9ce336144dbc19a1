"""Phantom scene construction and rendering."""

import json
import math

import numpy as np
import pytest
from scipy import stats

from sargsc import DataError, G0Params, GammaParams, fit_g0_mle
from sargsc.simulate import (
    FOREST,
    Region,
    SEA,
    ScenePhantom,
    URBAN,
    default_scene,
    load_scene,
    render_phantom,
)

# 1% two-sided Kolmogorov-Smirnov critical constant.
KS_CRIT = 1.63


def g0_oracle(p: G0Params):
    """Heavy-tailed law as a scaled beta prime (independent route)."""
    return stats.betaprime(p.looks, -p.alpha, scale=p.gamma / p.looks)


def two_tile_scene(seed=0):
    sea = Region(rect=(0, 0, 50, 40), model=SEA)
    urb = Region(rect=(50, 0, 50, 40), model=URBAN)
    return ScenePhantom(width=100, height=40, regions=(sea, urb), seed=seed)


class TestSceneValidation:
    def test_region_rect_checks(self):
        with pytest.raises(DataError):
            Region(rect=(0, 0, 0, 5), model=SEA)
        with pytest.raises(DataError):
            Region(rect=(-1, 0, 5, 5), model=SEA)
        with pytest.raises(DataError):
            Region(rect=(0, 0, 5), model=SEA)
        with pytest.raises(DataError):
            Region(rect=(0, 0, 5, 5), model="sea")

    def test_region_leaving_scene(self):
        reg = Region(rect=(0, 0, 101, 40), model=SEA)
        with pytest.raises(DataError) as err:
            ScenePhantom(width=100, height=40, regions=(reg,))
        assert "leaves" in str(err.value)

    def test_overlap_reports_both_regions(self):
        a = Region(rect=(0, 0, 60, 40), model=SEA)
        b = Region(rect=(50, 0, 50, 40), model=URBAN)
        with pytest.raises(DataError) as err:
            ScenePhantom(width=100, height=40, regions=(a, b))
        msg = str(err.value)
        assert "overlap" in msg and "0" in msg and "1" in msg

    def test_uncovered_pixels_located(self):
        reg = Region(rect=(0, 0, 99, 40), model=SEA)
        with pytest.raises(DataError) as err:
            ScenePhantom(width=100, height=40, regions=(reg,))
        msg = str(err.value)
        assert "40 pixels uncovered" in msg
        assert "x=99" in msg and "y=0" in msg

    def test_looks_mismatch(self):
        reg = Region(rect=(0, 0, 10, 10), model=G0Params(-2.0, 0.2, 8.0))
        with pytest.raises(DataError) as err:
            ScenePhantom(width=10, height=10, regions=(reg,), looks=4.0)
        assert "looks" in str(err.value)

    def test_channel_id_check(self):
        reg = Region(rect=(0, 0, 4, 4), model=SEA)
        with pytest.raises(DataError):
            ScenePhantom(width=4, height=4, regions=(reg,), channel_id="XX")


class TestRenderPhantom:
    def test_region_means(self):
        ch = render_phantom(two_tile_scene(seed=7))
        sea_tile = ch.values[:, :50]
        urb_tile = ch.values[:, 50:]
        for tile, p in ((sea_tile, SEA), (urb_tile, URBAN)):
            mean = p.gamma / (-p.alpha - 1.0)
            m2 = p.gamma**2 * (p.looks + 1) / (
                p.looks * (-p.alpha - 1.0) * (-p.alpha - 2.0)
            )
            se = math.sqrt((m2 - mean**2) / tile.size)
            assert abs(tile.mean() - mean) < 3.0 * se

    def test_per_region_distribution(self):
        ch = render_phantom(two_tile_scene(seed=11))
        for sl, p in (((slice(None), slice(0, 50)), SEA),
                      ((slice(None), slice(50, 100)), URBAN)):
            draws = ch.values[sl].ravel()
            stat = stats.kstest(draws, g0_oracle(p).cdf).statistic
            assert stat < KS_CRIT / math.sqrt(draws.size)

    def test_texture_ordering_recovered(self):
        scene = default_scene(seed=3)["HH"]
        ch = render_phantom(scene)
        tiles = [ch.values[:, k * 101 : (k + 1) * 101] for k in range(3)]
        alphas = [fit_g0_mle(t, looks=4.0).params.alpha for t in tiles]
        # sea is the smoothest class, urban the most textured
        assert alphas[0] < alphas[1] < alphas[2] < 0.0

    def test_determinism(self):
        a = render_phantom(two_tile_scene(seed=5))
        b = render_phantom(two_tile_scene(seed=5))
        assert a.values.tobytes() == b.values.tobytes()
        c = render_phantom(two_tile_scene(seed=6))
        assert a.values.tobytes() != c.values.tobytes()

    def test_substream_isolation(self):
        """Editing one region's law must not disturb the other region."""
        base = render_phantom(two_tile_scene(seed=9))
        sea = Region(rect=(0, 0, 50, 40), model=SEA)
        gam = Region(rect=(50, 0, 50, 40), model=GammaParams(0.5, 4.0))
        swapped = render_phantom(
            ScenePhantom(width=100, height=40, regions=(sea, gam), seed=9)
        )
        assert (
            base.values[:, :50].tobytes() == swapped.values[:, :50].tobytes()
        )
        assert base.values[:, 50:].tobytes() != swapped.values[:, 50:].tobytes()

    def test_gamma_region(self):
        reg = Region(rect=(0, 0, 120, 100), model=GammaParams(0.25, 4.0))
        ch = render_phantom(ScenePhantom(width=120, height=100, regions=(reg,), seed=2))
        draws = ch.values.ravel()
        oracle = stats.gamma(a=4.0, scale=0.25 / 4.0)
        assert stats.kstest(draws, oracle.cdf).statistic < KS_CRIT / math.sqrt(
            draws.size
        )

    def test_channel_metadata(self):
        reg = Region(rect=(0, 0, 4, 4), model=SEA)
        ch = render_phantom(
            ScenePhantom(width=4, height=4, regions=(reg,), channel_id="VV")
        )
        assert ch.channel_id == "VV"
        assert ch.looks == 4.0


class TestDefaultScene:
    def test_layout(self):
        scene = default_scene(seed=42)
        assert sorted(scene) == ["HH", "HV", "VV"]
        for k, cid in enumerate(("HH", "HV", "VV")):
            p = scene[cid]
            assert (p.width, p.height) == (303, 101)
            assert p.seed == 42 + k
            assert p.channel_id == cid
            assert len(p.regions) == 3

    def test_power_factors_scale_gamma_only(self):
        scene = default_scene()
        hh = scene["HH"].regions[1].model
        hv = scene["HV"].regions[1].model
        assert hv.alpha == hh.alpha == FOREST.alpha
        assert hv.gamma == pytest.approx(0.3 * hh.gamma)

    def test_channels_differ(self):
        scene = default_scene(seed=0)
        a = render_phantom(scene["HH"]).values
        b = render_phantom(scene["HV"]).values
        assert a.tobytes() != b.tobytes()

    def test_custom_tile(self):
        scene = default_scene(tile=11)
        assert scene["HH"].width == 33
        render_phantom(scene["HH"])  # exercises the tiling


class TestLoadScene:
    def write_spec(self, tmp_path, spec):
        path = tmp_path / "scene.json"
        path.write_text(json.dumps(spec), encoding="utf-8")
        return path

    def good_spec(self):
        return {
            "width": 8,
            "height": 4,
            "looks": 4.0,
            "seed": 17,
            "channels": [
                {
                    "name": "HH",
                    "regions": [
                        {
                            "rect": [0, 0, 4, 4],
                            "model": {"kind": "g0", "alpha": -3.0, "gamma": 0.4},
                        },
                        {
                            "rect": [4, 0, 4, 4],
                            "model": {"kind": "gamma", "sigma2": 0.2},
                        },
                    ],
                }
            ],
        }

    def test_load_and_render(self, tmp_path):
        scene = load_scene(self.write_spec(tmp_path, self.good_spec()))
        assert list(scene) == ["HH"]
        p = scene["HH"]
        assert p.seed == 17
        assert isinstance(p.regions[0].model, G0Params)
        assert isinstance(p.regions[1].model, GammaParams)
        render_phantom(p)

    def test_overrides(self, tmp_path):
        path = self.write_spec(tmp_path, self.good_spec())
        scene = load_scene(path, seed=99, looks=8.0)
        assert scene["HH"].seed == 99
        assert scene["HH"].looks == 8.0
        assert scene["HH"].regions[0].model.looks == 8.0

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json", encoding="utf-8")
        with pytest.raises(DataError) as err:
            load_scene(path)
        assert "invalid JSON" in str(err.value)

    def test_unknown_model_kind(self, tmp_path):
        spec = self.good_spec()
        spec["channels"][0]["regions"][0]["model"]["kind"] = "rayleigh"
        with pytest.raises(DataError) as err:
            load_scene(self.write_spec(tmp_path, spec))
        assert "rayleigh" in str(err.value)

    def test_missing_field(self, tmp_path):
        spec = self.good_spec()
        del spec["width"]
        with pytest.raises(DataError) as err:
            load_scene(self.write_spec(tmp_path, spec))
        assert "malformed" in str(err.value)

    def test_no_channels(self, tmp_path):
        spec = self.good_spec()
        spec["channels"] = []
        with pytest.raises(DataError) as err:
            load_scene(self.write_spec(tmp_path, spec))
        assert "no channels" in str(err.value)
