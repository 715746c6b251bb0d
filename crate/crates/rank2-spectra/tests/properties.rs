//! Property tests over random weights, torus points and levels.

use std::f64::consts::PI;

use num_bigint::BigUint;
use proptest::prelude::*;
use rank2_spectra::fusion::{a_graph, chamber_cross_moment_walk_dp, classical_fusion, graph_cross_moment, sp2_alcove, Group};
use rank2_spectra::measures::{measure_cross_moment, measure_for};
use rank2_spectra::modular::{smatrix, verlinde_n_with, Model};
use rank2_spectra::torus::{char_fund_angles, char_fund_poly, char_general, Generator, LaurentPoly2, Weight};
use rank2_spectra::weyl::{d8_elements, jacobian_xy_angles, jacobian_yz_angles, xy_factors, Pair};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn characters_are_real_and_d8_invariant(l1 in 0u32..6, l2 in 0u32..6, t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let chi = char_general(Weight::new(l1, l2));
        let (re, im) = chi.eval(t1, t2);
        prop_assert!(im.abs() < 1e-12 * re.abs().max(1.0));
        for g in d8_elements() {
            prop_assert_eq!(&chi.substitute(g.0), &chi);
            let (s1, s2) = g.act_f64(t1, t2);
            prop_assert!(rel(chi.eval(s1, s2).0, re) < 1e-10);
        }
    }

    #[test]
    fn squared_jacobian_is_d8_invariant(t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let j2 = jacobian_xy_angles(t1, t2).powi(2);
        for g in d8_elements() {
            let (s1, s2) = g.act_f64(t1, t2);
            prop_assert!(rel(jacobian_xy_angles(s1, s2).powi(2), j2) < 1e-9);
        }
    }

    #[test]
    fn squared_jacobian_factorises(t1 in 0.0f64..1.0, t2 in 0.0f64..1.0) {
        let x = char_fund_angles(Generator::X, t1, t2);
        let y = char_fund_angles(Generator::Y, t1, t2);
        let (a, b, c) = xy_factors(x, y);
        prop_assert!(rel(16.0 * PI.powi(4) * a * b * c, jacobian_xy_angles(t1, t2).powi(2)) < 1e-8);
    }

    #[test]
    fn jacobians_vanish_on_walls(t in 0.0f64..1.0) {
        for (a, b) in [(0.0, t), (t, 0.0), (t, t), (t, -t), (0.5, t), (t, 0.5)] {
            prop_assert!(jacobian_xy_angles(a, b).abs() < 1e-10);
            prop_assert!(jacobian_yz_angles(a, b).abs() < 1e-10);
        }
        for (a, b) in [(t, 0.5 - t), (t, 0.5 + t)] {
            prop_assert!(jacobian_yz_angles(a, b).abs() < 1e-10);
        }
    }

    #[test]
    fn truncation_is_stable(m in 0u64..5, n in 0u64..3, extra in 0u32..3) {
        let k = (m + 2 * n) as u32 + 2 + extra;
        let gx = a_graph(Group::Sp2, k, Generator::X).unwrap();
        let gy = a_graph(Group::Sp2, k, Generator::Y).unwrap();
        prop_assert_eq!(
            graph_cross_moment(&gx, &gy, m, n).unwrap(),
            chamber_cross_moment_walk_dp(Generator::X, Generator::Y, m, n)
        );
    }

    #[test]
    fn x_graph_valence(k in 1u32..10) {
        let g = a_graph(Group::Sp2, k, Generator::X).unwrap();
        for (i, w) in g.vertices.iter().enumerate() {
            let s = g.row_sum(i);
            prop_assert!(s <= 4);
            let interior = classical_fusion(Generator::X, *w).iter().map(|(v, c)| c * (v.level() <= k) as i64).sum::<i64>() == 4;
            if interior {
                prop_assert_eq!(s, 4);
            }
        }
    }

    #[test]
    fn verlinde_integral_for_every_weight(k in 1u32..9, i in 0usize..64) {
        let s = smatrix(k);
        let alcove = sp2_alcove(k);
        let w = alcove[i % alcove.len()];
        prop_assert!(verlinde_n_with(&s, w).is_ok());
    }

    #[test]
    fn odd_x_moments_vanish(k in 1u32..8, m in 0u32..3, n in 0u32..3) {
        let mu = measure_for(Model::ASp2(k), Pair::XY).unwrap();
        prop_assert!(measure_cross_moment(&mu, Pair::XY, 2 * m + 1, n).abs() < 1e-9);
    }
}

#[test]
fn adjoint_character_identity() {
    let x = char_fund_poly(Generator::X);
    let rhs = &(&(&x * &x) - &char_fund_poly(Generator::Y)) - &LaurentPoly2::one();
    assert_eq!(char_general(Weight::new(2, 0)), rhs);
    assert_eq!(char_fund_poly(Generator::Z), rhs);
}

#[test]
fn apex_walks_are_positive() {
    let gx = a_graph(Group::Sp2, 4, Generator::X).unwrap();
    let gy = a_graph(Group::Sp2, 4, Generator::Y).unwrap();
    assert_eq!(graph_cross_moment(&gx, &gy, 0, 0).unwrap(), BigUint::from(1u32));
    assert!(graph_cross_moment(&gx, &gy, 2, 2).unwrap() > BigUint::from(0u32));
}
