use num_complex::Complex64;
use proptest::prelude::*;

use qqo_core::dynamics;
use qqo_core::families::AbcParams;
use qqo_core::format::{parse_operator, write_tensor};
use qqo_core::ks;
use qqo_core::operator::{self, QqoTensor};
use qqo_core::pauli::{dense_to_pauli, pauli_mul, PauliElement, StateVec};
use qqo_core::vec3::{self, R3};

fn coeff() -> impl Strategy<Value = f64> {
    -1.0..1.0f64
}

fn tensor() -> impl Strategy<Value = QqoTensor> {
    prop::array::uniform27(coeff()).prop_map(|v| QqoTensor::from_fn(|m, l, k| v[9 * m + 3 * l + k]))
}

fn complex() -> impl Strategy<Value = Complex64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| Complex64::new(re, im))
}

fn element() -> impl Strategy<Value = PauliElement> {
    (complex(), prop::array::uniform3(complex())).prop_map(|(w0, w)| PauliElement::new(w0, w))
}

fn ball_point() -> impl Strategy<Value = R3> {
    prop::array::uniform3(coeff()).prop_map(|f| {
        let n = vec3::real_norm(&f);
        if n > 1.0 {
            f.map(|v| v / n)
        } else {
            f
        }
    })
}

proptest! {
    #[test]
    fn dense_round_trip(x in element()) {
        prop_assert!(dense_to_pauli(&x.to_dense()).max_abs_diff(&x) < 1e-14);
    }

    #[test]
    fn product_is_associative(x in element(), y in element(), z in element()) {
        let left = pauli_mul(&pauli_mul(&x, &y), &z);
        let right = pauli_mul(&x, &pauli_mul(&y, &z));
        prop_assert!(left.max_abs_diff(&right) < 1e-12);
    }

    #[test]
    fn v_is_b_transpose_f(t in tensor(), f in ball_point()) {
        let direct = dynamics::apply_v(&t, &f);
        let via_b = dynamics::apply_v_via_b(&t, &f);
        prop_assert!(vec3::real_dist(&direct, &via_b) < 1e-14);
    }

    #[test]
    fn majorant_map_dominates(t in tensor(), f in ball_point()) {
        let v = dynamics::apply_v(&t, &f);
        let bound = dynamics::apply_v_tilde(&t, &f.map(f64::abs));
        for k in 0..3 {
            prop_assert!(v[k].abs() <= bound[k] + 1e-14);
        }
    }

    #[test]
    fn abc_embedding(a in coeff(), b in coeff(), c in coeff(), f in ball_point()) {
        let t = AbcParams::new(a, b, c).unwrap().to_tensor();
        let v = dynamics::apply_v(&t, &f);
        let expect = [f[0] * f[0], a * f[1] * f[1] + b * f[2] * f[2], c * f[2] * f[2]];
        prop_assert_eq!(v, expect);
    }

    #[test]
    fn tensor_file_round_trip(t in tensor()) {
        prop_assert_eq!(parse_operator(&write_tensor(&t)).unwrap().tensor(), t);
    }

    #[test]
    fn delta_is_linear(t in tensor(), x in element(), y in element(), s in complex()) {
        let sum = PauliElement::new(x.w0 + s * y.w0, vec3::add(&x.w, &vec3::scale(&y.w, s)));
        let lhs = operator::delta_dense(&t, &sum);
        let rhs = &operator::delta_dense(&t, &x) + &operator::delta_dense(&t, &y).scale(s);
        prop_assert!(lhs.max_abs_diff(&rhs) < 1e-12);
    }

    #[test]
    fn closed_form_matches_dense_conditional_expectation(t in tensor(), f in ball_point(), x in element()) {
        let f = StateVec::clamped(f);
        let closed = ks::ef_difference(&t, &f, &x);
        let dense = ks::ef_difference_dense(&t, &f, &x);
        prop_assert!(closed.max_abs_diff(&dense) < 1e-10);
    }
}
