use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use proptest::prelude::*;
use toric_zeta_core::lattice::{cokernel, smith_normal_form, IntMatrix};
use toric_zeta_core::padic::{
    certified_cutoff, check_quadratic_bound, eval_entire, newton_polygon, ord_p, CertifiedSeries, PadicScalar,
    QuadraticBound,
};
use toric_zeta_core::toric::{
    hirzebruch, principal_divisor, product_of_lines, projective_plane, sections_dim, Fan, TorusDivisor,
};

fn matrix(rows: usize, cols: usize) -> impl Strategy<Value = IntMatrix> {
    prop::collection::vec(-6i64..=6, rows * cols)
        .prop_map(move |v| IntMatrix::new(rows, cols, v.into_iter().map(BigInt::from).collect()).unwrap())
}

fn shaped() -> impl Strategy<Value = IntMatrix> {
    (1usize..=4, 1usize..=4).prop_flat_map(|(r, c)| matrix(r, c))
}

/// Cofactor determinant and adjugate for 2x2 and 3x3.
fn det_adj(a: &[[i64; 3]; 3], n: usize) -> (i64, Vec<Vec<i64>>) {
    if n == 2 {
        let d = a[0][0] * a[1][1] - a[0][1] * a[1][0];
        return (d, vec![vec![a[1][1], -a[0][1]], vec![-a[1][0], a[0][0]]]);
    }
    let minor = |i: usize, j: usize| {
        let r: Vec<usize> = (0..3).filter(|&x| x != i).collect();
        let c: Vec<usize> = (0..3).filter(|&x| x != j).collect();
        a[r[0]][c[0]] * a[r[1]][c[1]] - a[r[0]][c[1]] * a[r[1]][c[0]]
    };
    let sign = |i: usize, j: usize| if (i + j).is_multiple_of(2) { 1 } else { -1 };
    let d = (0..3).map(|j| a[0][j] * sign(0, j) * minor(0, j)).sum();
    let adj = (0..3).map(|i| (0..3).map(|j| sign(j, i) * minor(j, i)).collect()).collect();
    (d, adj)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn snf_is_a_unimodular_diagonalization(a in shaped()) {
        let snf = smith_normal_form(&a);
        prop_assert_eq!(snf.u.mul(&a).unwrap().mul(&snf.v).unwrap(), snf.s.clone());
        prop_assert!(snf.s.is_diagonal());
        prop_assert!(snf.u.det().unwrap().abs().is_one());
        prop_assert!(snf.v.det().unwrap().abs().is_one());
        let d = snf.diagonal();
        prop_assert!(d.iter().all(|x| x.is_positive()));
        for w in d.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero(), "{} does not divide {}", w[0], w[1]);
        }
        prop_assert_eq!(smith_normal_form(&a), snf);
    }

    #[test]
    fn cokernel_matches_adjugate(
        n in 2usize..=3,
        entries in prop::collection::vec(-4i64..=4, 9),
        pairs in prop::collection::vec((prop::collection::vec(-5i64..=5, 3), prop::collection::vec(-5i64..=5, 3)), 12),
    ) {
        let mut a = [[0i64; 3]; 3];
        for i in 0..n {
            for j in 0..n {
                a[i][j] = entries[3 * i + j];
            }
        }
        let (det, adj) = det_adj(&a, n);
        prop_assume!(det != 0);
        let rows: Vec<Vec<i64>> = (0..n).map(|i| a[i][..n].to_vec()).collect();
        let g = cokernel(&IntMatrix::from_rows(&rows).unwrap());
        prop_assert_eq!(g.rank, 0);
        prop_assert_eq!(g.torsion_order(), BigInt::from(det.abs()));
        for (x, y) in pairs {
            // x - y lies in the column span iff adj(A)(x - y) = 0 mod det
            let diff: Vec<i64> = (0..n).map(|i| x[i] - y[i]).collect();
            let same = adj.iter().all(|row| row.iter().zip(&diff).map(|(p, q)| p * q).sum::<i64>() % det == 0);
            let (px, py) = (g.project_i64(&x[..n]).unwrap(), g.project_i64(&y[..n]).unwrap());
            prop_assert_eq!(px == py, same);
        }
    }

    #[test]
    fn sections_are_invariant_under_linear_equivalence(
        which in 0usize..3,
        coeffs in prop::collection::vec(0i64..=3, 4),
        m in prop::collection::vec(-3i64..=3, 2),
    ) {
        let fan: Fan = [projective_plane(), product_of_lines(), hirzebruch(1)][which].clone();
        let fan = fan.validate().unwrap();
        let n = fan.rays.len();
        let d = TorusDivisor::from_i64(&coeffs[..n]);
        let m: Vec<BigInt> = m.into_iter().map(BigInt::from).collect();
        let moved = d.add(&principal_divisor(&fan, &m).unwrap());
        let l = sections_dim(&fan, &d).unwrap();
        prop_assert_eq!(sections_dim(&fan, &moved).unwrap(), l);
        // brute force: <m, v_rho> >= -a_rho over a box containing P_D
        let mut count = 0u64;
        for x in -15i64..=15 {
            for y in -15i64..=15 {
                if fan.rays.iter().zip(&coeffs).all(|(v, a)| x * v[0] + y * v[1] >= -a) {
                    count += 1;
                }
            }
        }
        prop_assert_eq!(l, count);
    }

    #[test]
    fn products_carry_the_combined_bound(
        ea in prop::collection::vec(0u64..=3, 10),
        eb in prop::collection::vec(0u64..=3, 10),
    ) {
        // ord a_r >= r^2, ord b_r >= 2 r^2 - 1
        let a: Vec<BigInt> = ea.iter().enumerate().map(|(r, e)| Pow::pow(BigInt::from(2), (r * r) as u64 + e)).collect();
        let b: Vec<BigInt> = eb
            .iter()
            .enumerate()
            .map(|(r, e)| Pow::pow(BigInt::from(2), (2 * r * r) as u64 + e) * BigInt::from(if r % 2 == 0 { 1 } else { -3 }))
            .collect();
        let ba = QuadraticBound::new(BigRational::one(), BigRational::zero()).unwrap();
        let bb = QuadraticBound::new(BigRational::from_integer(2.into()), BigRational::from_integer((-1).into())).unwrap();
        let sa = CertifiedSeries::exact(2, a).with_bound(ba.clone()).unwrap();
        let sb = CertifiedSeries::exact(2, b).with_bound(bb.clone()).unwrap();
        let prod = sa.mul_truncated(&sb).unwrap();
        let combined = ba.product(&bb);
        prop_assert_eq!(combined.c.clone(), BigRational::new(2.into(), 3.into()));
        prop_assert!(check_quadratic_bound(&prod, &combined.c, &combined.d).unwrap().passed());
    }

    #[test]
    fn evaluation_ignores_extra_terms(
        extra in prop::collection::vec(0u64..=4, 40),
        num in -20i64..=20,
        den_pow in 0u32..=1,
        t_pow in 0u32..=1,
    ) {
        prop_assume!(num % 2 != 0);
        // t has valuation in {-1, 0, 1}
        let t = BigRational::new(BigInt::from(num) * BigInt::from(2).pow(t_pow), BigInt::from(2).pow(den_pow));
        let bound = QuadraticBound::new(BigRational::one(), BigRational::zero()).unwrap();
        let coeffs: Vec<BigInt> = extra.iter().enumerate().map(|(r, e)| Pow::pow(BigInt::from(2), (r * r) as u64 + e)).collect();
        let ord_t = t_pow as i64 - den_pow as i64;
        let cut = certified_cutoff(&bound, ord_t, 8);
        let short = CertifiedSeries::exact(2, coeffs[..=cut].to_vec()).with_bound(bound.clone()).unwrap();
        let long = CertifiedSeries::exact(2, coeffs[..=cut + 5].to_vec()).with_bound(bound).unwrap();
        let tp = PadicScalar::from_rational(2, &t, 64);
        let a = eval_entire(&short, &tp, 8).unwrap();
        let b = eval_entire(&long, &tp, 8).unwrap();
        prop_assert_eq!(a.residue(), b.residue());
        prop_assert!(a.precision() >= 8);
    }

    #[test]
    fn newton_polygon_is_a_lower_hull(vals in prop::collection::vec(prop::option::of(0u32..=12), 1..16)) {
        prop_assume!(vals.iter().any(Option::is_some));
        let coeffs: Vec<BigInt> = vals
            .iter()
            .map(|v| v.map_or_else(BigInt::zero, |k| Pow::pow(BigInt::from(2), k) * BigInt::from(3)))
            .collect();
        let s = CertifiedSeries::exact(2, coeffs.clone());
        let np = newton_polygon(&s).unwrap();
        let pts: Vec<(usize, i64)> =
            coeffs.iter().enumerate().filter_map(|(r, c)| ord_p(c, 2).map(|v| (r, v as i64))).collect();
        for v in &np.vertices {
            prop_assert!(pts.contains(v));
        }
        prop_assert_eq!(np.vertices.first().unwrap().0, pts.first().unwrap().0);
        prop_assert_eq!(np.vertices.last().unwrap().0, pts.last().unwrap().0);
        for &(r, v) in &pts {
            let h = np.height_at(r).unwrap();
            prop_assert!(BigRational::from_integer(v.into()) >= h, "point ({}, {}) below the hull", r, v);
        }
        let slopes = np.slopes();
        for w in slopes.windows(2) {
            prop_assert!(w[0] < w[1]);
        }
    }
}
