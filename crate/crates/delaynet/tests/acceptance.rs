//! Acceptance suite: one test per criterion, each printing a PASS line.
//!
//! Expected values marked as derived come from independent oracles
//! computed inside this file (closed forms, dense linear solves, an
//! eigensolver for the Z-matrix generator), never from the implementation
//! path they check.

use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use delaynet::certify::{
    corollary22_certificate, corollary22_lambda, corollary22_margins, corollary23_certificate,
    empirical_certificate, lambda_empirical, m_matrix_witness, operator_norm_audit, BoundSpec,
    CertMode, CertifyError, RateBound,
};
use delaynet::engine::{
    abstract_solve, evolution_matrix, j_fixed_point, voc_reconstruct, AbstractSystem,
    Perturbation,
};
use delaynet::harness::rng::{random_segment, rng_from, seed_for};
use delaynet::harness::{run_validate, DiscreteModel, ModelFile};
use delaynet::model::{Activation, HistorySegment, SequenceSpec, XuWuModel};
use delaynet::periodic::{find_periodic, verify_attraction};

fn model_path(name: &str) -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("models")
        .join(name)
}

fn load_model(name: &str) -> DiscreteModel {
    ModelFile::load(&model_path(name))
        .expect("bundled model parses")
        .as_discrete()
        .expect("bundled models are discrete")
}

/// Random linear history system with bounded coefficient rows.
fn random_linear_system(rng: &mut impl Rng, components: usize, r: i32) -> AbstractSystem {
    let width = (1 - r) as usize;
    let lin = (0..components)
        .map(|_| {
            (0..width)
                .map(|_| {
                    let value = rng.random_range(-0.9..0.9) / width as f64;
                    if rng.random_range(0.0..1.0) < 0.3 {
                        SequenceSpec::periodic(vec![value, rng.random_range(-0.9..0.9) / width as f64])
                    } else {
                        SequenceSpec::constant(value)
                    }
                })
                .collect()
        })
        .collect();
    AbstractSystem::linear(r, lin).expect("random rows are valid")
}

/// Adds bounded sine perturbations reading one window entry per component.
fn random_perturbed_system(rng: &mut impl Rng, components: usize, r: i32) -> AbstractSystem {
    let linear = random_linear_system(rng, components, r);
    let perturbations = (0..components)
        .map(|_| {
            let scale = rng.random_range(0.01..0.2);
            let offset = rng.random_range(r..=0);
            let source = rng.random_range(0..components);
            Perturbation::new(SequenceSpec::constant(scale), move |_, w: &HistorySegment| {
                scale * w.get(offset, source).sin()
            })
        })
        .collect();
    let lin = (0..components)
        .map(|i| {
            (0..(1 - r) as usize)
                .map(|t| {
                    let j = r + t as i32;
                    linear_spec(&linear, i, j)
                })
                .collect()
        })
        .collect();
    AbstractSystem::new(r, lin, perturbations).expect("perturbed system is valid")
}

fn linear_spec(sys: &AbstractSystem, i: usize, j: i32) -> SequenceSpec {
    // probe two indices to reconstruct constant/period-2 rows used here
    let a = sys.linear_coefficient(i, j, 0);
    let b = sys.linear_coefficient(i, j, 1);
    if a == b {
        SequenceSpec::constant(a)
    } else {
        SequenceSpec::periodic(vec![a, b])
    }
}

#[test]
fn criterion_01_cocycle_suite() {
    let start = Instant::now();
    let mut rng = rng_from(seed_for(0xACC, 1));
    for _ in 0..100 {
        let components = rng.random_range(1..=4usize);
        let r = -rng.random_range(0..=5i32);
        let sys = random_linear_system(&mut rng, components, r);
        let n = rng.random_range(0..8i64);
        let m = n + rng.random_range(0..=12i64);
        let l = m + rng.random_range(0..=12i64);
        for i in 0..components {
            let a_mm = evolution_matrix(&sys, i, m, m).unwrap();
            let width = (1 - r) as usize;
            assert_eq!(a_mm.matrix, DMatrix::identity(width, width));

            let a_lm = evolution_matrix(&sys, i, l, m).unwrap();
            let a_mn = evolution_matrix(&sys, i, m, n).unwrap();
            let a_ln = evolution_matrix(&sys, i, l, n).unwrap();
            let product = &a_lm.matrix * &a_mn.matrix;
            let defect = (&product - &a_ln.matrix).abs().max();
            assert!(
                defect <= 1e-12,
                "cocycle defect {defect} at (l,m,n)=({l},{m},{n})"
            );
        }
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 10.0, "took {elapsed:?}");
    println!("criterion 01 (cocycle suite, 100 systems): PASS in {elapsed:?}");
}

#[test]
fn criterion_02_variation_of_constants() {
    let start = Instant::now();
    let mut rng = rng_from(seed_for(0xACC, 2));
    for case in 0..100 {
        let components = rng.random_range(1..=4usize);
        let r = -rng.random_range(0..=5i32);
        let sys = random_perturbed_system(&mut rng, components, r);
        let n = rng.random_range(0..4i64);
        let m = n + rng.random_range(1..=200i64);
        let alpha = random_segment(&mut rng, components, r, 1.0);
        let rebuilt = voc_reconstruct(&sys, n, &alpha, m).unwrap();
        let trajectory = abstract_solve(&sys, n, &alpha, m).unwrap();
        let direct = trajectory.history_at(m).unwrap();
        // relative to the solution scale over the window, where the
        // reconstruction's rounding errors live
        let scale = (n..=m)
            .map(|k| trajectory.history_norm(k))
            .fold(1e-30, f64::max);
        let rel = rebuilt.sup_distance(&direct) / scale;
        assert!(rel <= 1e-10, "case {case}: relative defect {rel}");
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}");
    println!("criterion 02 (variation of constants, 100 systems): PASS in {elapsed:?}");
}

#[test]
fn criterion_03_certificate_cross_check() {
    // scalar reference model: a ≡ 1, h = 1, b⁺ = 0.3, F = 1
    let model = delaynet::model::scalar_model(0.3, 0.0, Activation::Identity, 0);

    // oracle: closed form λ(μ) = (e − 1)/(e^{1−μ} − 1)·0.3, bisected for the
    // root λ(μ) = 1 (equivalently μ = 1 − ln(1 + 0.3(e − 1)))
    let lambda_oracle = |mu: f64| 1.0_f64.exp_m1() / (1.0 - mu).exp_m1() * 0.3;
    let (mut lo, mut hi) = (1e-12, 1.0 - 1e-12);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if lambda_oracle(mid) < 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let supremal_oracle = lo;
    assert!((supremal_oracle - (1.0 - (1.0 + 0.3 * 1.0_f64.exp_m1()).ln())).abs() < 1e-12);

    let cert = corollary22_certificate(&model, 0.99).unwrap();
    let supremal = cert.mu_supremal.unwrap();
    assert!(
        (supremal - supremal_oracle).abs() <= 1e-6,
        "supremal μ = {supremal} vs oracle {supremal_oracle}"
    );
    assert!((supremal - 0.584_264_778).abs() <= 1e-6);

    let lambda_03 = corollary22_lambda(&model, 0.3).unwrap();
    assert!((lambda_03 - lambda_oracle(0.3)).abs() <= 1e-12);
    assert!((lambda_03 - 0.508_492).abs() <= 1e-6);
    assert!((1.0 / (1.0 - lambda_03) - 2.034_55).abs() <= 1e-4);

    let empirical = lambda_empirical(
        &model.as_general(),
        &RateBound::exponential(0.3),
        500,
        CertMode::Paper,
    );
    assert!(
        (empirical.lambda - lambda_03).abs() <= 1e-6,
        "λ̂ = {} vs closed form {lambda_03}",
        empirical.lambda
    );
    println!(
        "criterion 03 (certificate cross-check): PASS (supremal μ = {supremal:.9}, λ(0.3) = {lambda_03:.9})"
    );
}

#[test]
fn criterion_04_envelope_suite() {
    let start = Instant::now();
    let names = [
        "scalar_reference.json",
        "scalar_delay.json",
        "planar_mmatrix.json",
        "periodic_forcing.json",
        "ring3.json",
        "planar_periodic.json",
    ];
    for name in names {
        let model = load_model(name);
        let cert = match empirical_certificate(&model.general(), CertMode::Strict, 0.9, 400) {
            Ok(cert) => cert,
            Err(CertifyError::NotContractive { .. }) => {
                // row-wise search fails; the delay-free M-matrix transfer is
                // still exact-norm-backed
                corollary23_certificate(model.as_xu_wu().unwrap(), 0.99).unwrap()
            }
            Err(other) => panic!("{name}: {other}"),
        };
        assert_eq!(cert.mode, CertMode::Strict, "{name} must certify strictly");
        let report = run_validate(&model, &cert, 0, 1000, 300, 1.0, 42).unwrap();
        assert!(
            report.pass,
            "{name}: max ratio {} at trial {:?} index {}",
            report.global_max, report.worst_trial, report.worst_index
        );
    }

    // a hand-falsified certificate (rate inflated by 20%) must fail
    let model = load_model("scalar_reference.json");
    let mut falsified = corollary22_certificate(model.as_xu_wu().unwrap(), 0.99).unwrap();
    falsified.mu *= 1.2;
    let report = run_validate(&model, &falsified, 0, 1000, 300, 1.0, 42).unwrap();
    assert!(
        !report.pass && report.global_max > 1.0,
        "falsified certificate was not caught (max ratio {})",
        report.global_max
    );

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 60.0, "took {elapsed:?}");
    println!(
        "criterion 04 (envelope suite, {} models + falsification): PASS in {elapsed:?}",
        names.len()
    );
}

#[test]
fn criterion_05_m_matrix_suite() {
    let mut rng = rng_from(seed_for(0xACC, 5));
    for case in 0..1000 {
        let n = rng.random_range(1..=6usize);
        let b = DMatrix::from_fn(n, n, |_, _| rng.random_range(0.0..1.0));
        // generator oracle: dense eigensolver, independent of both
        // verification paths
        let rho_true = b
            .clone()
            .complex_eigenvalues()
            .iter()
            .map(|z| z.norm())
            .fold(0.0, f64::max);
        let factor = if case % 2 == 0 {
            rng.random_range(1.05..1.5)
        } else {
            rng.random_range(0.55..0.95)
        };
        let shift = rho_true * factor;
        let matrix = DMatrix::from_fn(n, n, |i, j| {
            if i == j {
                shift - b[(i, j)]
            } else {
                -b[(i, j)]
            }
        });
        let witness = m_matrix_witness(&matrix)
            .unwrap_or_else(|err| panic!("case {case}: paths disagree: {err}"));
        let spectral = witness.spectral.as_ref().expect("Z-matrix gets a cross-check");
        assert_eq!(
            witness.is_m_matrix, spectral.is_m_matrix,
            "case {case}: verdicts differ"
        );
        assert_eq!(
            witness.is_m_matrix,
            factor > 1.0,
            "case {case}: verdict contradicts the generator (ρ = {rho_true}, factor = {factor})"
        );
        if let Some(d) = &witness.d {
            assert!(d.iter().all(|&v| v > 0.0));
        }
    }

    // the two pinned examples
    let accept = m_matrix_witness(&DMatrix::from_row_slice(2, 2, &[2.0, -1.0, -1.0, 2.0])).unwrap();
    let d = accept.d.unwrap();
    assert!(accept.is_m_matrix && (d[0] - 1.0).abs() < 1e-12 && (d[1] - 1.0).abs() < 1e-12);
    let reject = m_matrix_witness(&DMatrix::from_row_slice(2, 2, &[1.0, -2.0, -2.0, 1.0])).unwrap();
    assert!(!reject.is_m_matrix);
    println!("criterion 05 (M-matrix suite, 1000 random Z-matrices): PASS");
}

#[test]
fn criterion_06_corollary_23_transfer() {
    let model = load_model("planar_mmatrix.json");
    let xu_wu = model.as_xu_wu().unwrap();

    // row 0 violates the plain condition…
    assert!(matches!(
        corollary22_certificate(xu_wu, 0.99),
        Err(CertifyError::ConditionViolated { i: 0, .. })
    ));
    assert!(corollary22_margins(xu_wu)[0] <= 0.0);

    // …but ℳ is an M-matrix and the transfer certifies
    let cert = corollary23_certificate(xu_wu, 0.99).unwrap();
    let d = cert.d.clone().unwrap();
    assert!(d.iter().all(|&v| v > 0.0));
    assert_eq!(cert.mode, CertMode::Strict);

    // the constant is the rescaled certificate's, inflated by max d / min d
    let rescaled = delaynet::certify::rescale(xu_wu, &d).unwrap();
    let base = corollary22_certificate(&rescaled, 0.99).unwrap();
    let spread = d.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        / d.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!((cert.c - base.c * spread).abs() <= 1e-9 * cert.c);
    assert!((cert.mu - base.mu).abs() <= 1e-12, "rates are coordinate-free");

    // and the envelope holds in the original coordinates
    let report = run_validate(&model, &cert, 0, 1000, 300, 1.0, 42).unwrap();
    assert!(report.pass, "max ratio {}", report.global_max);
    println!(
        "criterion 06 (M-matrix transfer): PASS (d = {d:?}, C inflated ×{spread:.4})"
    );
}

#[test]
fn criterion_07_periodic_orbit() {
    let model = load_model("periodic_forcing.json");
    let xu_wu = model.as_xu_wu().unwrap();
    let cert = empirical_certificate(&model.general(), CertMode::Strict, 0.9, 400).unwrap();
    let orbit = find_periodic(xu_wu, 0, 2, &cert, 1e-12, None).unwrap();

    // oracle: the 2-periodic values solve the dense 2×2 linear system
    //   φ1 = c·φ0 + θ·I(0),  φ0 = c·φ1 + θ·I(1)
    let c = (-1.0_f64).exp();
    let theta = 1.0 - c;
    let system = DMatrix::from_row_slice(2, 2, &[-c, 1.0, 1.0, -c]);
    let rhs = DVector::from_column_slice(&[theta * 1.0, theta * 2.0]);
    let solution = system.lu().solve(&rhs).expect("oracle system is regular");
    let phi0 = solution[0];
    assert!(
        (orbit.phi.get(0, 0) - phi0).abs() <= 1e-10,
        "φ(0) = {} vs oracle {phi0}",
        orbit.phi.get(0, 0)
    );
    assert!(orbit.shift_defect <= 1e-11);

    let attraction =
        verify_attraction(xu_wu, 0, 2, &orbit.phi, Some(&cert), 100, 300, 1.0, 42).unwrap();
    assert_eq!(attraction.envelope_ok, Some(true));
    assert!(
        attraction.tail_step_ratio <= (-cert.mu).exp() + 0.02,
        "tail ratio {} vs e^{{−μ}} + 0.02",
        attraction.tail_step_ratio
    );

    // zero inputs give the zero orbit exactly
    let zero_model = delaynet::model::XuWuModel::new(
        1.0,
        vec![SequenceSpec::constant(1.0)],
        vec![vec![SequenceSpec::constant(0.0)]],
        vec![SequenceSpec::constant(0.0)],
        vec![Activation::Identity],
        SequenceSpec::constant(0.0),
        0,
        None,
    )
    .unwrap();
    let zero_cert =
        empirical_certificate(&zero_model.as_general(), CertMode::Strict, 0.9, 400).unwrap();
    let zero_orbit = find_periodic(&zero_model, 0, 2, &zero_cert, 1e-12, None).unwrap();
    assert_eq!(zero_orbit.phi.sup_norm(), 0.0);
    assert_eq!(zero_orbit.residual, 0.0);
    println!(
        "criterion 07 (periodic orbit): PASS (φ0 = {phi0:.12}, {} iterations)",
        orbit.iterations
    );
}

#[test]
fn criterion_08_fixed_point_suite() {
    // delay-free certified scalar: λ ≈ 0.419 with a' = e^{−0.5(m−n)}
    let scalar = AbstractSystem::new(
        0,
        vec![vec![SequenceSpec::constant((-1.0_f64).exp())]],
        vec![Perturbation::new(SequenceSpec::constant(0.1), |_, w| {
            0.1 * w.get(0, 0).sin()
        })],
    )
    .unwrap();
    let alpha = HistorySegment::from_rows(0, &[vec![1.0]]).unwrap();
    let weights = RateBound::exponential(0.5);
    let tol = 1e-12;
    let result = j_fixed_point(&scalar, 0, &alpha, &weights, tol, 500, 80).unwrap();
    assert!(result.lambda < 0.5);
    for pair in result.distances.windows(2) {
        if pair[0] > 1e-13 {
            assert!(pair[1] / pair[0] <= result.lambda + 0.01);
        }
    }
    assert!(result.weighted_norm <= 1.0 / (1.0 - result.lambda) + tol);

    // delayed two-component system under a table weight that dominates the
    // exact norms (flat over the delay window, exponential after). The
    // second perturbation reads two window entries, so its declared
    // constant is 0.05·2 = 0.1.
    let delayed = AbstractSystem::new(
        -2,
        vec![
            vec![
                SequenceSpec::constant(0.0),
                SequenceSpec::constant(0.0),
                SequenceSpec::constant(0.5),
            ],
            vec![
                SequenceSpec::constant(0.0),
                SequenceSpec::constant(0.0),
                SequenceSpec::periodic(vec![0.45, 0.55]),
            ],
        ],
        vec![
            Perturbation::new(SequenceSpec::constant(0.08), |_, w: &HistorySegment| {
                0.08 * w.get(-2, 1).sin()
            }),
            Perturbation::new(SequenceSpec::constant(0.1), |_, w: &HistorySegment| {
                0.05 * (w.get(-1, 0) + w.get(0, 0)).sin()
            }),
        ],
    )
    .unwrap();
    let alpha2 = HistorySegment::from_fn(2, -2, |o, i| 0.3 * f64::from(o) + 0.4 * i as f64 + 0.9);
    let table: Vec<f64> = (0..=120)
        .map(|d: i32| (-0.25 * f64::from((d - 2).max(0))).exp())
        .collect();
    let weights2 = RateBound::Table { values: table };
    let result2 = j_fixed_point(&delayed, 0, &alpha2, &weights2, tol, 500, 120).unwrap();
    assert!(result2.lambda < 1.0);
    for pair in result2.distances.windows(2) {
        if pair[0] > 1e-13 {
            assert!(
                pair[1] / pair[0] <= result2.lambda + 0.01,
                "ratio {} vs λ = {}",
                pair[1] / pair[0],
                result2.lambda
            );
        }
    }
    assert!(result2.weighted_norm <= 1.0 / (1.0 - result2.lambda) + tol);

    // f ≡ 0 terminates in one corrective iteration
    let linear = AbstractSystem::diagonal_linear(0, &[SequenceSpec::constant(0.5)]).unwrap();
    let result3 = j_fixed_point(&linear, 0, &alpha, &weights, tol, 50, 60).unwrap();
    assert_eq!(result3.iterations, 1);
    println!(
        "criterion 08 (fixed-point suite): PASS (λ = {:.6} and {:.6}, norms {:.6}, {:.6})",
        result.lambda, result2.lambda, result.weighted_norm, result2.weighted_norm
    );
}

#[test]
fn criterion_09_operator_norm_audit() {
    let model = delaynet::model::HopfieldModel::linear_scalar_with_bound(
        SequenceSpec::constant(0.5),
        2,
    )
    .unwrap();
    let audit = operator_norm_audit(&model, 0, 0, 20).unwrap();
    for entry in &audit.entries {
        let gap = entry.m - entry.n;
        let expected = if gap <= 2 {
            1.0
        } else {
            0.5_f64.powi(gap as i32 - 2)
        };
        assert!(
            (entry.exact - expected).abs() <= 1e-12,
            "exact norm {} vs {expected} at gap {gap}",
            entry.exact
        );
        assert_eq!(entry.exceeded, gap >= 1, "flagging at gap {gap}");
    }
    assert_eq!(audit.flagged.len(), 20, "every positive gap is flagged");
    println!("criterion 09 (operator-norm audit): PASS (paper bound exceeded at all 20 gaps)");
}

#[test]
fn criterion_10_determinism() {
    use delaynet::harness::cli;
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    let model = model_path("planar_periodic.json");
    for dir in [&dir_a, &dir_b] {
        let code = cli::run([
            "delaynet",
            "validate",
            "--model",
            model.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "--seed",
            "12345",
            "--trials",
            "64",
            "--horizon",
            "200",
        ]);
        assert_eq!(code, 0);
    }
    let payload = |dir: &tempfile::TempDir| {
        let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
        let mut value: serde_json::Value = serde_json::from_str(&text).unwrap();
        value
            .as_object_mut()
            .unwrap()
            .remove("timestamp_unix")
            .expect("timestamp header present");
        serde_json::to_vec(&value).unwrap()
    };
    assert_eq!(
        payload(&dir_a),
        payload(&dir_b),
        "reports differ beyond the timestamp"
    );

    // same for a sweep report
    let dir_c = tempfile::tempdir().unwrap();
    let dir_d = tempfile::tempdir().unwrap();
    let scalar = model_path("scalar_reference.json");
    for dir in [&dir_c, &dir_d] {
        let code = cli::run([
            "delaynet",
            "sweep",
            "--model",
            scalar.to_str().unwrap(),
            "--out",
            dir.path().to_str().unwrap(),
            "--seed",
            "7",
            "--mode",
            "paper",
            "--mu",
            "0.05",
            "--pointer",
            "/b/0/0/value",
            "--values",
            "0.1,0.3,0.5,0.7,0.9",
        ]);
        assert_eq!(code, 0);
    }
    assert_eq!(payload(&dir_c), payload(&dir_d));
    assert_eq!(
        std::fs::read(dir_c.path().join("sweep.csv")).unwrap(),
        std::fs::read(dir_d.path().join("sweep.csv")).unwrap()
    );
    println!("criterion 10 (determinism): PASS (byte-identical reports modulo timestamp)");
}
