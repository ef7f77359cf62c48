use racap_core::channel::{Prob, Snr};
use racap_core::throughput::{awgn_throughput_lower, bd_throughput};
use racap_core::two_user::{
    awgn_outer_contains, awgn_outer_vertices, bd_hull_contains, bd_region_contains, bd_region_vertices,
    two_user_awgn_throughput, two_user_bd_throughput, verify_gap, AwgnPair, BdParams, RatePoint4,
};

struct XorShift(u64);

impl XorShift {
    fn next(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

#[test]
fn bd_hull_and_inequalities_agree() {
    let mut rng = XorShift(0x9e37_79b9_7f4a_7c15);
    for (n1, n2) in [(1, 1), (2, 1), (3, 2)] {
        let b = BdParams::new(n1, n2).unwrap();
        let verts = bd_region_vertices(b);
        // Convex combinations of the vertices satisfy the inequalities.
        for _ in 0..2_000 {
            let w: Vec<f64> = (0..verts.len()).map(|_| rng.next()).collect();
            let total: f64 = w.iter().sum::<f64>() + rng.next();
            let mut pt = [0.0; 4];
            for (wi, v) in w.iter().zip(&verts) {
                for (c, x) in pt.iter_mut().zip(v.to_array()) {
                    *c += wi / total * x;
                }
            }
            assert!(bd_region_contains(b, RatePoint4::from_array(pt)));
        }
        // Points satisfying the inequalities lie in the hull.
        let mut accepted = 0;
        while accepted < 10_000 {
            let (f1, f2) = (f64::from(n1), f64::from(n2));
            let pt = RatePoint4::new(rng.next() * f1, rng.next() * f2, rng.next() * f1, rng.next() * f2);
            if bd_region_contains(b, pt) {
                assert!(bd_hull_contains(b, pt).unwrap(), "{pt:?}");
                accepted += 1;
            }
        }
    }
}

#[test]
fn outer_vertices_are_members() {
    for &(p1, p2) in &[(1.0, 1.0), (10.0, 3.0), (1e4, 0.1)] {
        let pair = AwgnPair::new(p1, p2).unwrap();
        for v in awgn_outer_vertices(pair) {
            assert!(awgn_outer_contains(pair, v));
        }
    }
}

#[test]
fn gap_on_power_grid() {
    let grid = [0.1, 1.0, 10.0, 100.0, 1e4];
    let bound = 3f64.sqrt() / 2.0 + 1e-9;
    for &p1 in &grid {
        for &p2 in grid.iter().filter(|&&p2| p2 <= p1) {
            let d = verify_gap(AwgnPair::new(p1, p2).unwrap()).unwrap();
            assert!(d <= bound, "P1={p1} P2={p2}: {d}");
        }
    }
}

#[test]
fn two_user_closed_forms_match_general_evaluation() {
    let snrs = [Snr::new(1.0).unwrap(), Snr::new(10.0).unwrap(), Snr::new(100.0).unwrap()];
    for i in 0..=1000 {
        let p = Prob::new(i as f64 / 1000.0).unwrap();
        assert!((two_user_bd_throughput(p) - bd_throughput(p, 2)).abs() <= 1e-12);
        for &s in &snrs {
            let t = two_user_awgn_throughput(p, s);
            assert!((t.lower - awgn_throughput_lower(p, 2, s)).abs() <= 1e-12);
            assert_eq!(t.bracket_upper, t.lower + 1.0);
        }
    }
}
