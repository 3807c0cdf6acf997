mod common;

use common::{generalized_eigenprojector, random_cyclic_algebra, random_element, values_on};
use hypertuple_core::algebra::{
    commutant, compute_characters, find_cyclic_vector, idempotent_residual, CharacterKind,
};
use hypertuple_core::numkit::{Field, Matrix, Tolerance, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tol() -> Tolerance {
    Tolerance::default()
}

fn fields() -> [Field; 2] {
    [Field::Complex, Field::Real]
}

#[test]
fn idempotents_and_characters_on_random_algebras() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for trial in 0..24 {
        let field = fields()[trial % 2];
        let n = 1 + trial % 5;
        let alg = random_cyclic_algebra(field, n, &mut rng);
        let table = compute_characters(&alg, &tol(), trial as u64).unwrap();
        assert!(table.idempotent_residual <= 1e-7);
        assert!(idempotent_residual(&table.idempotents, n) <= 1e-7);

        match field {
            Field::Complex => assert!(table.kappa >= 1 && table.kappa <= alg.dim()),
            Field::Real => {
                let (k0, k1) = (table.kappa0.unwrap(), table.kappa1.unwrap());
                assert!(2 * k0 + k1 >= 1 && 2 * k0 + k1 <= alg.dim());
            }
        }

        for chi in &table.characters {
            assert!((chi.values[0] - C64::new(1.0, 0.0)).norm() <= 1e-8);
            match chi.kind {
                Some(CharacterKind::RealValued) => assert!(chi.values.iter().all(|v| v.im.abs() <= 1e-6)),
                Some(CharacterKind::ComplexPairMember) => {
                    let partner = &table.characters[chi.partner.unwrap()];
                    for (a, b) in chi.values.iter().zip(&partner.values) {
                        assert!((a.conj() - b).norm() <= 1e-6);
                    }
                }
                None => assert_eq!(field, Field::Complex),
            }
        }

        // multiplicativity on random pairs, expanded through the basis
        for _ in 0..50 {
            let (cx, x) = random_element(&alg, Field::Complex, &mut rng);
            let (cy, y) = random_element(&alg, Field::Complex, &mut rng);
            let (cxy, resid) = alg.coordinates(&(&x * &y));
            assert!(resid <= 1e-8);
            let (vx, vy, vxy) = (values_on(&table, &cx), values_on(&table, &cy), values_on(&table, &cxy));
            for k in 0..table.len() {
                assert!((vxy[k] - vx[k] * vy[k]).norm() <= 1e-6, "trial {trial}");
            }
        }

        // b − Σ χ(b) p_χ is nilpotent
        for _ in 0..20 {
            let (cb, b) = random_element(&alg, Field::Complex, &mut rng);
            let vals = values_on(&table, &cb);
            let mut rest = b.complexified();
            for (p, v) in table.idempotents.iter().zip(&vals) {
                rest = &rest - &p.scale(*v);
            }
            assert!(rest.powi(alg.dim() as u32).max_abs() <= 1e-5, "trial {trial}");
        }
    }
}

#[test]
fn contour_projectors_match_generalized_eigenspaces() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for trial in 0..16 {
        let field = fields()[trial % 2];
        let n = 2 + trial % 4;
        let alg = random_cyclic_algebra(field, n, &mut rng);
        let table = compute_characters(&alg, &tol(), 100 + trial as u64).unwrap();
        let a = alg.element(&table.probe);
        let vals = values_on(&table, &table.probe);
        for (p, &lambda) in table.idempotents.iter().zip(&vals) {
            let mult = p.trace().re.round() as usize;
            let oracle = generalized_eigenprojector(&a, lambda, mult);
            let scale = oracle.max_abs().max(1.0);
            assert!(oracle.dist_max(&p.complexified()) <= 1e-6 * scale, "trial {trial}");
        }
    }
}

#[test]
fn counts_do_not_depend_on_seed() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for trial in 0..10 {
        let field = fields()[trial % 2];
        let alg = random_cyclic_algebra(field, 2 + trial % 4, &mut rng);
        let counts: Vec<_> = (0..4u64)
            .map(|seed| {
                let t = compute_characters(&alg, &tol(), seed * 977 + 1).unwrap();
                (t.kappa, t.kappa0, t.kappa1)
            })
            .collect();
        assert!(counts.windows(2).all(|w| w[0] == w[1]), "{counts:?}");
    }
}

#[test]
fn cyclic_algebras_equal_their_commutant() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for trial in 0..10 {
        let field = fields()[trial % 2];
        let n = 1 + trial % 5;
        let alg = random_cyclic_algebra(field, n, &mut rng);
        assert!(find_cyclic_vector(&alg, 64, rng.gen()).is_some());
        assert_eq!(alg.dim(), n);
        let comm = commutant(&alg).unwrap();
        assert_eq!(comm.len(), n);
        for s in &comm {
            assert!(alg.contains(s, 1e-8));
        }
        // and the algebra sits inside the commutant
        for b in alg.basis() {
            for s in &comm {
                let c = b.commutator(s).max_abs();
                assert!(c <= 1e-8 * (b.max_abs() * s.max_abs()).max(1.0));
            }
        }
    }
}

#[test]
fn non_cyclic_algebra_has_larger_commutant() {
    let alg = hypertuple_core::algebra::close_algebra(
        Field::Complex,
        3,
        &[Matrix::real_diag(&[1.0, 1.0, 2.0]).complexified()],
        &tol(),
    )
    .unwrap();
    assert_eq!(alg.dim(), 2);
    assert!(find_cyclic_vector(&alg, 64, 1).is_none());
    assert_eq!(commutant(&alg).unwrap().len(), 5);
}
