use lkreg::engine::{Mode, Termination};
use lkreg_web::demo::{denoise, noisy_phantom, Scene};

#[test]
fn denoising_moves_toward_clean_image() {
    let (clean, noisy) = noisy_phantom(32, 0.2, 3).unwrap();
    let before = noisy.distance(&clean);
    let out = denoise(&noisy, 0.05, true).unwrap();
    assert!(out.gap_rel <= 1e-4);
    assert!(out.image.distance(&clean) < before);
    assert!(out.image.min_value() >= 0.0);
}

#[test]
fn larger_mu_smooths_more() {
    let (_, noisy) = noisy_phantom(24, 0.1, 1).unwrap();
    let weak = denoise(&noisy, 0.01, false).unwrap();
    let strong = denoise(&noisy, 1.0, false).unwrap();
    assert!(strong.tv < weak.tv);
}

#[test]
fn bad_inputs_are_rejected() {
    assert!(noisy_phantom(4, 0.0, 0).is_err());
    assert!(noisy_phantom(1000, 0.0, 0).is_err());
    let (_, f) = noisy_phantom(16, 0.0, 0).unwrap();
    assert!(denoise(&f, 0.0, false).is_err());
    assert!(Scene::new(16, 0, 0.01, 0).is_err());
}

#[test]
fn both_modes_reduce_the_error() {
    let scene = Scene::new(24, 12, 0.01, 5).unwrap();
    let sino = &scene.instance.noisy.data;
    assert_eq!(sino.shape(), (12, lkreg::ct::default_rays(24)));
    for mode in [Mode::Plain, Mode::Accelerated] {
        let rec = scene.reconstruct(mode, 400).unwrap();
        assert_eq!(rec.rel_errors.len(), rec.n_final + 1);
        assert_eq!(rec.residuals.len(), rec.n_final + 1);
        assert!(rec.rel_errors.last().unwrap() < &0.5, "{mode:?}: {:?}", rec.rel_errors.last());
        assert_ne!(rec.terminated_by, Termination::InnerFailure);
    }
}
