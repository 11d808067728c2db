use proptest::prelude::*;
use qhorizon::chain_model::{from_gamma, reparametrize, secular_form};
use qhorizon::landmarks::spikes;
use qhorizon::tracer::{default_box, sample_verify};
use qhorizon::{criteria, oracle, ChainSpec, Region, ToleranceConfig};

fn bond(j: usize, dim: usize, i: usize) -> usize {
    let k = (i + 1).min(dim - 1 - i);
    debug_assert!(k >= 1 && k <= j);
    k - 1
}

/// `det(E - H)` by the three-term recurrence, ascending powers of `E`.
fn char_poly(dim: usize, g: &[f64]) -> Vec<f64> {
    let diag = |i: usize| 2.0 * i as f64 - (dim as f64 - 1.0);
    let mut prev = vec![1.0];
    let mut cur = vec![-diag(0), 1.0];
    for i in 1..dim {
        let gb = g[bond(g.len(), dim, i - 1)];
        let mut next = vec![0.0; i + 2];
        for (k, &c) in cur.iter().enumerate() {
            next[k + 1] += c;
            next[k] -= diag(i) * c;
        }
        for (k, &c) in prev.iter().enumerate() {
            next[k] += gb * gb * c;
        }
        prev = cur;
        cur = next;
    }
    cur
}

fn point() -> impl Strategy<Value = (usize, Vec<f64>)> {
    (2usize..=11).prop_flat_map(|dim| {
        let spike = spikes::<f64>(dim);
        let ranges: Vec<_> = spike.iter().map(|&s| -1.3 * s..1.3 * s).collect();
        (Just(dim), ranges)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(400))]

    #[test]
    fn raw_char_matches_recurrence((dim, g) in point()) {
        let f = secular_form(&ChainSpec::new(dim, g.clone()).unwrap()).unwrap();
        let want = char_poly(dim, &g);
        let scale = want.iter().fold(1.0f64, |m, c| m.max(c.abs()));
        for (a, b) in f.raw_char.iter().zip(&want) {
            prop_assert!((a - b).abs() <= 1e-12 * scale, "{a} vs {b}");
        }
    }

    #[test]
    fn coupling_signs_do_not_matter((dim, g) in point(), mask in any::<u8>()) {
        let flipped: Vec<f64> = g.iter().enumerate()
            .map(|(k, &v)| if mask >> k & 1 == 1 { -v } else { v })
            .collect();
        let a = secular_form(&ChainSpec::new(dim, g).unwrap()).unwrap();
        let b = secular_form(&ChainSpec::new(dim, flipped).unwrap()).unwrap();
        prop_assert_eq!(a.coeffs, b.coeffs);
    }

    #[test]
    fn energy_squares_sum_to_trace((dim, g) in point()) {
        let tol = ToleranceConfig::default();
        let r = oracle::spectrum(&ChainSpec::new(dim, g.clone()).unwrap(), &tol).unwrap();
        let sum: f64 = r.energies.iter().map(|e| (e * e).re).sum();
        let diag: f64 = (0..dim).map(|i| (2.0 * i as f64 - (dim as f64 - 1.0)).powi(2)).sum();
        let bonds: f64 = (0..dim - 1).map(|i| g[bond(g.len(), dim, i)].powi(2)).sum();
        let trace = diag - 2.0 * bonds;
        prop_assert!((sum - trace).abs() <= 1e-8 * diag, "{sum} vs {trace}");
    }

    #[test]
    fn criteria_match_oracle_off_the_band((dim, g) in point()) {
        let tol = ToleranceConfig::default();
        let spec = ChainSpec::new(dim, g).unwrap();
        let o = oracle::classify(&oracle::spectrum(&spec, &tol).unwrap(), &tol);
        let c = criteria::member(&secular_form(&spec).unwrap(), &tol).unwrap();
        if o.margin.abs() > 1e-6 && c.margin.abs() > 1e-6 {
            prop_assert_eq!(o.region, c.region);
        }
    }

    #[test]
    fn gamma_round_trip((dim, g) in point()) {
        let g: Vec<f64> = g.iter().map(|v| v.abs()).collect();
        let spec = ChainSpec::new(dim, g.clone()).unwrap();
        let back = from_gamma(dim, &reparametrize(&spec)).unwrap();
        for (a, b) in back.couplings().iter().zip(&g) {
            prop_assert!((a - b).abs() <= 1e-12 * (1.0 + b));
        }
    }

    #[test]
    fn single_precision_agrees_away_from_boundary((dim, g) in point()) {
        let tol = ToleranceConfig::default();
        let g32: Vec<f32> = g.iter().map(|&v| v as f32).collect();
        let g64: Vec<f64> = g32.iter().map(|&v| v as f64).collect();
        let v64 = criteria::member(&secular_form(&ChainSpec::new(dim, g64).unwrap()).unwrap(), &tol).unwrap();
        let v32 = criteria::member(&secular_form(&ChainSpec::new(dim, g32).unwrap()).unwrap(), &tol).unwrap();
        if v64.margin.abs() > 1e-2 {
            prop_assert_eq!(v64.region, v32.region);
        }
    }
}

#[test]
fn decoupled_chain_has_diagonal_spectrum() {
    let tol = ToleranceConfig::default();
    for dim in 2..=11 {
        let spec = ChainSpec::<f64>::decoupled(dim).unwrap();
        let r = oracle::spectrum(&spec, &tol).unwrap();
        let mut re: Vec<f64> = r.energies.iter().map(|e| e.re).collect();
        re.sort_by(f64::total_cmp);
        for (i, e) in re.iter().enumerate() {
            assert!((e - (2.0 * i as f64 - (dim as f64 - 1.0))).abs() < 1e-9);
        }
        let v = criteria::member(&secular_form(&spec).unwrap(), &tol).unwrap();
        assert_eq!(v.region, Region::Inside, "dim {dim}");
    }
}

#[test]
fn sampling_is_deterministic() {
    let tol = ToleranceConfig::default();
    let b = default_box(8);
    let a = sample_verify(8, &b, 300, 42, &tol).unwrap();
    let c = sample_verify(8, &b, 300, 42, &tol).unwrap();
    assert_eq!(a.agreed, c.agreed);
    assert_eq!(a.disagreements.len(), c.disagreements.len());
    assert_eq!(a.failures, c.failures);
}
