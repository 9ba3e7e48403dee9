use holder_sharp::bellman::{bellman_c_plus, ChordC, Foliation};
use holder_sharp::constants::{c_star_numeric, c_star_pp, d_star_pp, DEFAULT_GRID};
use holder_sharp::roots::{StructuralRoots, DEFAULT_TOL};
use holder_sharp::verify::{
    check_hold3, check_hold4, extremal_pair_c, moments, near_extremal_hold3, near_extremal_hold4,
};
use holder_sharp::Exponent;

#[test]
fn near_extremal_ratios_approach_closed_forms() {
    for p in [2.5, 3.0, 4.0] {
        let exp = Exponent::from_p(p).unwrap();
        let c = c_star_pp(p).unwrap().value;
        let d = d_star_pp(p).unwrap().value;
        let (f, e) = near_extremal_hold3(p, 1e-4).unwrap();
        let s = check_hold3(&f, &e, exp, p, 0.0).unwrap();
        let ratio = (s.norm_term - s.pairing_term) / s.deficit;
        assert!(ratio >= c * (1.0 - 1e-9) && ratio < c * 1.05, "p={p}: {ratio} vs {c}");
        let (f, e) = near_extremal_hold4(p, -1e-4).unwrap();
        let s = check_hold4(&f, &e, exp, p, 0.0).unwrap();
        let ratio = (s.norm_term - s.pairing_term) / s.deficit;
        assert!(ratio >= d * (1.0 - 1e-9) && ratio < d * 1.05, "p={p}: {ratio} vs {d}");
    }
}

#[test]
fn chord_pairs_realize_bellman_values() {
    let p = 3.0;
    let exp = Exponent::from_p(p).unwrap();
    let roots = StructuralRoots::new(p, DEFAULT_TOL).unwrap();
    for (a1, a2, r, tau) in [(-1.0, -1.0, 0.4, 0.3), (0.5, 2.0, -0.6, 0.7), (-1.5, -0.4, 0.9, 0.5)] {
        let ch = ChordC::new(a1, a2, r, tau, &roots).unwrap();
        let (f, g) = extremal_pair_c(&ch).unwrap();
        let x = moments(&f, &g, exp).omega_c().unwrap();
        let attained = f.inner(&g.map(|v| v.conj())).re;
        assert!((attained - bellman_c_plus(&x, p).unwrap()).abs() < 1e-10);
    }
}

#[test]
fn numeric_supremum_uses_the_same_roots() {
    let p = 4.0;
    let fol = Foliation::new(p).unwrap();
    let c = c_star_numeric(p, p, DEFAULT_GRID).unwrap();
    assert_eq!(c.s0.unwrap().value, fol.roots.s0());
    assert!((c.value - 1.0 / 3.0).abs() < 1e-8);
}
