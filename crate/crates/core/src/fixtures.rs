//! Small named inputs shared by tests, the acceptance suite and the CLI.

use std::sync::Arc;

use num_traits::One;

use crate::chaincx::{ChainComplex, Truncation};
use crate::dgstruct::{divided_powers, DGAlgebra, DGCoalgebra, HopfAlgebra, Result};
use crate::exactlin::{CoeffRing, Scalar};
use crate::graded::{Element, FreeGradedModule, Name};

/// The divided power Hopf algebra `Γv`, `|v| = 2`, through `max_degree`.
pub fn gamma(max_degree: i64, ring: CoeffRing) -> HopfAlgebra {
    divided_powers(1, max_degree, ring).expect("divided powers are well formed")
}

/// The name `v(k)` of degree `2k` in `Γv`.
pub fn gamma_gen(k: i64) -> Name {
    Name::gen(format!("v({k})"), 2 * k)
}

/// The ground ring as a coalgebra on one degree 0 name.
pub fn ground_coalgebra(ring: CoeffRing) -> DGCoalgebra {
    let unit = Name::gen("1", 0);
    let module = Arc::new(FreeGradedModule::ground(ring, unit.clone()));
    let complex = ChainComplex::zero_differential(module, Truncation::exact(0, 0)).expect("ground complex");
    DGCoalgebra::connected(complex, |_| Element::basis(Name::tensor(vec![unit.clone(), unit.clone()])), unit.clone())
        .expect("ground coalgebra")
}

/// Homology of the `dim`-sphere as a coalgebra: `1` and a primitive `x` of degree `dim`.
pub fn sphere_coalgebra(dim: i64, ring: CoeffRing) -> Result<DGCoalgebra> {
    let (one, x) = (Name::gen("1", 0), Name::gen("x", dim));
    let module = Arc::new(FreeGradedModule::new(ring, [one.clone(), x.clone()])?);
    let complex = ChainComplex::zero_differential(module, Truncation::exact(0, dim))?;
    DGCoalgebra::connected(
        complex,
        |c| {
            let mut e = Element::basis(Name::tensor(vec![c.clone(), one.clone()]));
            if *c != one {
                e.add_term(Name::tensor(vec![one.clone(), c.clone()]), &Scalar::one());
            }
            e
        },
        one.clone(),
    )
}

/// The free algebra on one generator `x` of degree `degree`, `d = 0`, through `max_degree`.
pub fn free_algebra(degree: i64, max_degree: i64, ring: CoeffRing) -> Result<DGAlgebra> {
    assert!(degree >= 1);
    let power = |n: i64| Name::gen(format!("x^{n}"), n * degree);
    let top = max_degree / degree;
    let module = Arc::new(FreeGradedModule::new(ring, (0..=top).map(power))?);
    let complex = ChainComplex::zero_differential(module, Truncation::up_to(max_degree))?;
    DGAlgebra::connected(
        complex,
        |a, b| {
            let n = (a.degree() + b.degree()) / degree;
            if n <= top {
                Element::basis(power(n))
            } else {
                Element::zero()
            }
        },
        power(0),
    )
}

/// Connected coalgebra on `1` and the given generators, with `d` and `Δ̄`
/// listed as `(coefficient, names)` terms per generator.
fn connected_coalgebra(
    ring: CoeffRing,
    gens: &[(&str, i64)],
    d: &[(&str, &[(i64, &str)])],
    reduced: &[(&str, &[(i64, &str, &str)])],
    truncation: Truncation,
) -> Result<DGCoalgebra> {
    let one = Name::gen("1", 0);
    let name = |l: &str| {
        if l == "1" {
            return one.clone();
        }
        let (l, deg) = gens.iter().find(|(g, _)| *g == l).expect("listed generator");
        Name::gen(*l, *deg)
    };
    let module = Arc::new(FreeGradedModule::new(ring, std::iter::once(one.clone()).chain(gens.iter().map(|(l, _)| name(l))))?);
    let diff = crate::graded::GradedMap::from_fn(module.clone(), module.clone(), -1, |c| {
        let terms = d.iter().find(|(l, _)| name(l) == *c).map(|(_, t)| *t).unwrap_or(&[]);
        Element::from_terms(terms.iter().map(|(k, l)| (crate::exactlin::int(*k), name(l))))
    })?;
    let complex = ChainComplex::new(diff, truncation)?;
    DGCoalgebra::connected(
        complex,
        |c| {
            let mut e = Element::basis(Name::tensor(vec![c.clone(), one.clone()]));
            if *c != one {
                e.add_term(Name::tensor(vec![one.clone(), c.clone()]), &Scalar::one());
            }
            if let Some((_, terms)) = reduced.iter().find(|(l, _)| name(l) == *c) {
                for (k, a, b) in terms.iter() {
                    e.add_term(Name::tensor(vec![name(a), name(b)]), &crate::exactlin::int(*k));
                }
            }
            e
        },
        one.clone(),
    )
}

/// Non-cocommutative target `1, a, b, e, z` with `|a| = |b| = 2`, `|e| = 3`,
/// `|z| = 4`, `de = a` and `Δ̄z = a⊗b`. The map `x ↦ z` out of
/// `sphere_coalgebra(4)` is a chain map that needs a nonzero `φ₂`.
pub fn split_target(ring: CoeffRing) -> Result<DGCoalgebra> {
    connected_coalgebra(
        ring,
        &[("a", 2), ("b", 2), ("e", 3), ("z", 4)],
        &[("e", &[(1, "a")])],
        &[("z", &[(1, "a", "b")])],
        Truncation::exact(0, 4),
    )
}

/// `Γv` through `max_degree` with an acyclic pair `z`, `y` of degrees 4 and 5,
/// `dy = z`, both primitive.
pub fn gamma_with_cone(max_degree: i64, ring: CoeffRing) -> Result<DGCoalgebra> {
    let g = gamma(max_degree, ring.clone());
    let mut names: Vec<Name> = g.module().names().cloned().collect();
    let (z, y) = (Name::gen("z", 4), Name::gen("y", 5));
    names.extend([z.clone(), y.clone()].into_iter().filter(|n| n.degree() <= max_degree));
    let module = Arc::new(FreeGradedModule::new(ring, names)?);
    let diff = crate::graded::GradedMap::from_fn(module.clone(), module.clone(), -1, |c| {
        if *c == y && module.contains(&z) {
            Element::basis(z.clone())
        } else {
            Element::zero()
        }
    })?;
    let complex = ChainComplex::new(diff, Truncation::up_to(max_degree))?;
    let unit = gamma_gen(0);
    DGCoalgebra::connected(
        complex,
        |c| {
            if g.module().contains(c) {
                return g.coalgebra.delta(c);
            }
            Element::from_terms([
                (Scalar::one(), Name::tensor(vec![c.clone(), unit.clone()])),
                (Scalar::one(), Name::tensor(vec![unit.clone(), c.clone()])),
            ])
        },
        unit.clone(),
    )
}

/// Degree 0 names to `unit`, everything else to zero: the augmentation of a
/// connected module onto the ground ring.
fn augmentation_onto(source: &Arc<FreeGradedModule>, target: &crate::twist::DGModule, unit: &Name) -> crate::graded::GradedMap {
    crate::graded::GradedMap::from_fn(source.clone(), target.complex.module().clone(), 0, |n| {
        if n.degree() == 0 {
            Element::basis(unit.clone())
        } else {
            Element::zero()
        }
    })
    .expect("augmentation")
}

/// Lifting `H → k` through `BarH ⊗_{t_Bar} H → k` for `H = T(x)`, `|x| = 1`,
/// from the zero module.
pub fn lift_free_generator(max_degree: i64, ring: CoeffRing) -> crate::dcsh::Result<crate::dcsh::LiftProblem> {
    use crate::twist::{acyclic_bar_module, DGModule};
    let h = free_algebra(1, max_degree, ring.clone())?;
    let unit = Name::gen("1", 0);
    let zero = ChainComplex::zero_differential(Arc::new(FreeGradedModule::zero(ring)), Truncation::exact(0, 0))?;
    let sub = DGModule::build(zero, h.clone(), crate::dgstruct::Side::Right, |_, _| Element::zero())?;
    let ext = DGModule::regular(&h, crate::dgstruct::Side::Right)?;
    let cover = acyclic_bar_module(&h, max_degree)?;
    let base = DGModule::trivial(&h, crate::dgstruct::Side::Right, unit.clone())?;
    let inclusion = crate::graded::GradedMap::zero(sub.complex.module().clone(), ext.complex.module().clone(), 0);
    let restriction = crate::graded::GradedMap::zero(sub.complex.module().clone(), cover.complex.module().clone(), 0);
    Ok(crate::dcsh::LiftProblem {
        projection: augmentation_onto(cover.complex.module(), &base, &unit),
        extended: augmentation_onto(ext.complex.module(), &base, &unit),
        theta: crate::dgstruct::AlgebraMap::identity(&h),
        extension: crate::dcsh::SemifreeExtension { generators: vec![Name::gen("x^0", 0)], sub, ext, inclusion },
        cover,
        base,
        restriction,
    })
}

/// `ΩΓv ↪ Γv ⊗_{t_Ω} ΩΓv` with generators `v(n)⊗[]`, and the inclusion `j`.
fn gamma_cobar_extension(max_degree: i64, ring: CoeffRing) -> crate::dcsh::Result<crate::dcsh::SemifreeExtension> {
    use crate::twist::{acyclic_cobar_module, DGModule};
    let c = gamma(max_degree + 1, ring).coalgebra;
    let omega = crate::barcobar::cobar(&c, max_degree)?;
    let sub = DGModule::regular(&omega, crate::dgstruct::Side::Right)?;
    let ext = acyclic_cobar_module(&c, max_degree)?;
    let inclusion = crate::graded::GradedMap::from_fn(sub.complex.module().clone(), ext.complex.module().clone(), 0, |w| {
        Element::basis(Name::tensor(vec![gamma_gen(0), w.clone()]))
    })?;
    let generators = (1..=max_degree / 2).map(|n| Name::tensor(vec![gamma_gen(n), Name::empty_word()])).collect();
    Ok(crate::dcsh::SemifreeExtension { sub, ext, inclusion, generators })
}

/// Lifting the identity of `Γv ⊗_{t_Ω} ΩΓv` along the identity.
pub fn lift_identity(max_degree: i64, ring: CoeffRing) -> crate::dcsh::Result<crate::dcsh::LiftProblem> {
    let extension = gamma_cobar_extension(max_degree, ring)?;
    let module = extension.ext.complex.module().clone();
    Ok(crate::dcsh::LiftProblem {
        cover: extension.ext.clone(),
        base: extension.ext.clone(),
        projection: crate::graded::GradedMap::identity(module.clone()),
        restriction: extension.inclusion.clone(),
        extended: crate::graded::GradedMap::identity(module),
        theta: crate::dgstruct::AlgebraMap::identity(&extension.sub.algebra),
        extension,
    })
}

/// Lifting `Γv ⊗_{t_Ω} ΩΓv → k` through `BarΩΓv ⊗_{t_Bar} ΩΓv → k`, extending
/// `w ↦ []⊗w` on `ΩΓv`.
pub fn lift_gamma_contraction(max_degree: i64, ring: CoeffRing) -> crate::dcsh::Result<crate::dcsh::LiftProblem> {
    use crate::twist::{acyclic_bar_module, DGModule};
    let extension = gamma_cobar_extension(max_degree, ring)?;
    let omega = extension.sub.algebra.clone();
    let unit = Name::gen("1", 0);
    let cover = acyclic_bar_module(&omega, max_degree)?;
    let base = DGModule::trivial(&omega, crate::dgstruct::Side::Right, unit.clone())?;
    let restriction = crate::graded::GradedMap::from_fn(extension.sub.complex.module().clone(), cover.complex.module().clone(), 0, |w| {
        Element::basis(Name::tensor(vec![Name::empty_word(), w.clone()]))
    })?;
    Ok(crate::dcsh::LiftProblem {
        projection: augmentation_onto(cover.complex.module(), &base, &unit),
        extended: augmentation_onto(extension.ext.complex.module(), &base, &unit),
        theta: crate::dgstruct::AlgebraMap::identity(&omega),
        extension,
        cover,
        base,
        restriction,
    })
}
