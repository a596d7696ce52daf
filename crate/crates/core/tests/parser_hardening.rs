//! Deterministic smoke fuzzing of every parser entry point: the corpus
//! seeds, their truncations, and byte-level mutations must never panic.
//! The real coverage-guided targets live in `fuzz/`.

use segre_ode::sampling::SplitMix64;

fn corpus_seeds() -> Vec<String> {
    let mut seeds = vec![
        r#"{"valuation": -2, "coeffs": [[1.0, 0.5], [0.0, -2.0]]}"#.to_string(),
        r#"{"schema": 1, "m": 2, "sign": "+", "phi": {"22": {"valuation": 1, "coeffs": [[1.0, 0.0]]}}}"#.to_string(),
        r#"{"kind": "circle", "radius": 0.5, "turns": 1}"#.to_string(),
        r#"[[[1,0],[0,0],[0,0]],[[0,0],[1,0],[0,0]],[[0,0],[0,0],[2,0]]]"#.to_string(),
        r#"{"m": 1e99, "sign": "?", "phi": {}}"#.to_string(),
        r#"{"valuation": 99999999999, "coeffs": []}"#.to_string(),
        "[[[".to_string(),
        "null".to_string(),
        "".to_string(),
    ];
    // checked-in corpus files, when the layout is intact
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fuzz/corpus");
    if let Ok(targets) = std::fs::read_dir(&dir) {
        for target in targets.flatten() {
            if let Ok(files) = std::fs::read_dir(target.path()) {
                for file in files.flatten() {
                    if let Ok(text) = std::fs::read_to_string(file.path()) {
                        seeds.push(text);
                    }
                }
            }
        }
    }
    seeds
}

fn exercise(text: &str) {
    let _ = segre_ode::schema::parse_series(text);
    if let Ok(h) = segre_ode::schema::parse_hypersurface(text) {
        let _ = segre_ode::hypersurface::validate_hypersurface(&h);
        let _ = segre_ode::ode::fuchsian_test_hypersurface(&h);
    }
    if let Ok(ode) = segre_ode::schema::parse_ode(text) {
        let _ = segre_ode::ode::fuchsian_test_ode(&ode);
        let _ = segre_ode::ode::reduce(&ode);
    }
    if let Ok(red) = segre_ode::schema::parse_reduced(text) {
        let q0 = [
            red.q[0].coeff_or_zero(0),
            red.q[1].coeff_or_zero(0),
            red.q[2].coeff_or_zero(0),
            red.q[3].coeff_or_zero(0),
        ];
        if let Ok(z0) = segre_ode::bbsolver::choose_base_root(&q0) {
            if let Ok(sys) = segre_ode::bbsolver::linearize(&red, z0) {
                let _ = segre_ode::bbsolver::formal_solve(&sys, 6, &Default::default());
            }
        }
    }
    if let Ok(kind) = segre_ode::schema::parse_path_spec(text) {
        let spec = segre_ode::numint::PathSpec { kind, control: Default::default() };
        let _ = spec.clearance();
    }
    if let Ok(m) = segre_ode::schema::parse_matrix3(text) {
        if let Ok(sigma) = segre_ode::linalg3::MonodromyOperator::new(m) {
            let _ = segre_ode::linalg3::hol_dim_bound(&sigma);
        }
    }
    if let Ok((ode, samples)) = segre_ode::schema::parse_segre_check(text) {
        let _ = segre_ode::numint::segre_residual(&ode, &samples);
    }
}

#[test]
fn parsers_survive_seed_mutations() {
    let seeds = corpus_seeds();
    assert!(seeds.len() >= 9, "corpus seeds present");
    let mut rng = SplitMix64::new(0xf0cc);

    for seed in &seeds {
        exercise(seed);
        // truncations
        for cut in [1usize, 2, 5, 9, 17] {
            if cut < seed.len() {
                exercise(&seed[..seed.len() - cut.min(seed.len())]);
            }
        }
        // byte mutations
        let bytes = seed.as_bytes().to_vec();
        for _ in 0..200 {
            let mut mutated = bytes.clone();
            if mutated.is_empty() {
                break;
            }
            for _ in 0..1 + rng.below(4) {
                let idx = rng.below(mutated.len() as u64) as usize;
                mutated[idx] = (rng.next_u64() & 0xff) as u8;
            }
            if let Ok(text) = std::str::from_utf8(&mutated) {
                exercise(text);
            }
        }
    }
}

#[test]
fn parsers_survive_structured_garbage() {
    let mut rng = SplitMix64::new(0xbead);
    let tokens = [
        "{", "}", "[", "]", ",", ":", "\"m\"", "\"phi\"", "\"coeffs\"", "\"valuation\"", "\"kind\"",
        "\"circle\"", "\"A\"", "\"P\"", "\"Q\"", "1", "-1", "0.5", "1e99", "-1e-99", "null", "true",
        "\"22\"", "\"+\"", "9999999999",
    ];
    for _ in 0..2000 {
        let len = 1 + rng.below(40) as usize;
        let mut text = String::new();
        for _ in 0..len {
            text.push_str(tokens[rng.below(tokens.len() as u64) as usize]);
        }
        exercise(&text);
    }
}
