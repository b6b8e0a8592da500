import math

import numpy as np
import pytest

import eisndt


def test_exports_and_version():
    assert eisndt.__version__
    assert eisndt.NUM_ELECTRODES == 16
    assert eisndt.VACUUM_PERMITTIVITY == pytest.approx(8.85e-12)


def test_scene_roundtrip_and_validation():
    scene = eisndt.builtin_model(1)
    assert len(scene.cracks) == 2
    assert len(scene.bars) == 2
    assert scene.domain_radius == pytest.approx(0.1)

    gaps = eisndt.validate_scene(scene)
    assert gaps["bar_bar"] >= scene.d0

    text = eisndt.scene_to_json(scene)
    back = eisndt.scene_from_json(text)
    assert len(back.cracks) == len(scene.cracks)
    assert back.cracks[0].half_thickness == pytest.approx(scene.cracks[0].half_thickness)
    assert back.bars[1].center == pytest.approx(scene.bars[1].center)

    empty = eisndt.without_defects(scene)
    assert not empty.cracks and not empty.bars

    # Region lookup: bar disk of model 1 sits at (0.05, 0).
    assert eisndt.region_at(scene, (0.05, 0.0)) == len(scene.cracks) + 2
    assert eisndt.region_at(scene, (0.0, 0.09)) == 0
    with pytest.raises(ValueError):
        eisndt.region_at(scene, (0.2, 0.0))


def test_mesh_arrays():
    scene = eisndt.builtin_model(1)
    mesh = eisndt.build_mesh(scene)
    assert mesh.nodes.shape == (mesh.num_nodes, 2)
    assert mesh.triangles.shape == (mesh.num_tris, 3)
    assert mesh.regions.shape == (mesh.num_tris,)
    assert mesh.num_interfaces == len(scene.cracks)
    theta = eisndt.rim_angles(mesh)
    assert np.all(np.diff(theta) > 0.0)
    assert 0.0 <= theta[0] < theta[-1] < 2.0 * math.pi


def test_forward_frame_identities():
    scene = eisndt.builtin_model(1)
    mesh = eisndt.build_mesh(scene)
    solver = eisndt.ForwardSolver(mesh, scene, 2.0 * math.pi * 8e5, shunt_electrodes=True)
    frame = solver.measure_frame()
    a = frame.array
    assert a.shape == (16, 16)
    scale = eisndt.frame_max(frame)
    assert scale > 0.0
    assert eisndt.reciprocity_defect(frame) <= 1e-8 * scale
    assert eisndt.telescope_defect(frame) <= 1e-10 * scale
    # The matrix property agrees with the defect helpers.
    assert np.max(np.abs(a - a.T)) == pytest.approx(eisndt.reciprocity_defect(frame))


def test_trace_operator():
    ones = np.ones(256, dtype=complex)
    assert np.max(np.abs(eisndt.disk_trace_operator(ones) - 0.5)) <= 1e-12
    rng = np.random.default_rng(7)
    w = rng.standard_normal(256) + 1j * rng.standard_normal(256)
    w -= w.mean()
    assert np.max(np.abs(eisndt.disk_trace_operator(w))) <= 1e-10


def test_contrast_scalars_and_regimes():
    scene = eisndt.builtin_model(1)
    lam_d = eisndt.lambda_d(scene.bar_material, scene.background, 2.0 * math.pi * 1e6)
    assert 0.4 <= abs(lam_d) <= 0.6
    lo = abs(eisndt.lambda_c(scene.crack_material, scene.background, 2.0 * math.pi * 10.0))
    hi = abs(eisndt.lambda_c(scene.crack_material, scene.background, 2.0 * math.pi * 8e5))
    assert lo < hi
    delta = scene.cracks[0].half_thickness
    args = (delta, scene.crack_material, scene.background)
    assert eisndt.classify_regime(*args, 2.0 * math.pi * 10.0) == "Low"
    assert eisndt.classify_regime(*args, 2.0 * math.pi * 8e5) == "High"


def test_synthetic_pole_recovery():
    scene = eisndt.builtin_model(1)
    omega = 2.0 * math.pi * 8e5
    a = (math.cos(math.radians(30.0)), math.sin(math.radians(30.0)))
    model = eisndt.model_from_scene(scene, omega, a, True)

    R = scene.domain_radius
    theta = 2.0 * math.pi * np.arange(4096) / 4096.0
    values = np.array([model.evaluate(R * complex(math.cos(t), math.sin(t))).real for t in theta])
    fit = eisndt.recover_terms(R, theta, values, len(scene.cracks), len(scene.bars))

    true_bars = sorted((complex(*b.center) for b in scene.bars), key=lambda z: (z.real, z.imag))
    got_bars = sorted((z for z, _ in fit.bars), key=lambda z: (z.real, z.imag))
    for t, g in zip(true_bars, got_bars):
        assert abs(t - g) <= 1e-9 * R


def test_locate_on_model_1():
    scene = eisndt.builtin_model(1)
    fit = eisndt.locate(scene, 2.0 * math.pi * 8e5)
    R = scene.domain_radius
    centers = [z for z, _ in fit.bars]
    for bar in scene.bars:
        truth = complex(*bar.center)
        assert min(abs(truth - z) for z in centers) <= 0.1 * R
    endpoints = [e for p, q, _ in fit.cracks for e in (p, q)]
    for crack in scene.cracks:
        for end in (crack.polyline[0], crack.polyline[-1]):
            truth = complex(*end)
            assert min(abs(truth - z) for z in endpoints) <= 0.1 * R


def test_sweep_and_visibility():
    scene = eisndt.builtin_model(1)
    mesh = eisndt.build_mesh(scene)
    inverse = eisndt.build_mesh(
        eisndt.without_defects(scene), target_h=scene.domain_radius / 10.0
    )
    images = eisndt.sweep(
        scene, mesh, [10.0, 8e5], alpha_rel=1e-3, inverse_mesh=inverse
    )
    assert [im.frequency for im in images] == [10.0, 8e5]
    assert images[0].delta_sigma.shape == (inverse.num_tris,)

    vis_lo = eisndt.visibility(images[0], scene, inverse)
    vis_hi = eisndt.visibility(images[1], scene, inverse)
    # Cracks block the low-frequency current and fade at high frequency; the
    # bars only light up once the crack contrast opens.
    for k in range(len(scene.cracks)):
        assert vis_lo["crack"][k] >= 2.0 * (vis_hi["crack"][k] + 1e-300)
    for k in range(len(scene.bars)):
        assert vis_hi["bar"][k] >= 2.0 * (vis_lo["bar"][k] + 1e-300)
