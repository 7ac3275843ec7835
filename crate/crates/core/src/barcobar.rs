//! Cobar and bar constructions truncated by degree, the unit `C → BarΩC`,
//! the universal and couniversal twisting cochains, and Milgram's map
//! `Ω(C⊗C′) → ΩC⊗ΩC′`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_traits::One;
use thiserror::Error;

use crate::chaincx::{ChainComplex, ChainError, ChainMap, Truncation};
use crate::dgstruct::{tensor_power_module, AlgebraMap, DGAlgebra, DGCoalgebra, DgError, HopfAlgebra};
use crate::exactlin::Scalar;
use crate::graded::{sign, Element, FreeGradedModule, GradedError, GradedMap, Name};
use crate::twist::TwistingCochain;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BarCobarError {
    #[error("cobar requires 1-connected input")]
    CobarNotOneConnected,
    #[error("bar requires connected input")]
    BarNotConnected,
    #[error(transparent)]
    Dg(#[from] DgError),
    #[error(transparent)]
    Chain(#[from] ChainError),
    #[error(transparent)]
    Graded(#[from] GradedError),
}

pub type Result<T> = std::result::Result<T, BarCobarError>;

/// The letter `s⁻¹c` of a cobar word.
pub fn cobar_letter(c: Name) -> Name {
    Name::Shift { by: -1, inner: Box::new(c) }
}

/// The letter `sa` of a bar word.
pub fn bar_letter(a: &Name) -> Name {
    Name::Shift { by: 1, inner: Box::new(a.clone()) }
}

/// The element under a bar or cobar letter.
pub fn unletter(l: &Name) -> &Name {
    match l {
        Name::Shift { inner, .. } => inner,
        other => panic!("`{other}` is not a bar or cobar letter"),
    }
}

/// All words in `letters` (each of positive degree) of total degree `≤ max`.
fn words(letters: &[Name], max: i64) -> Vec<Name> {
    let mut out = vec![Name::empty_word()];
    let mut frontier = vec![(Vec::<Name>::new(), 0i64)];
    while let Some((w, d)) = frontier.pop() {
        for l in letters {
            let e = d + l.degree();
            if e <= max {
                let mut next = w.clone();
                next.push(l.clone());
                out.push(Name::word(next.clone()));
                frontier.push((next, e));
            }
        }
    }
    out
}

fn window(has_letters: bool, top: i64) -> Truncation {
    if has_letters {
        Truncation { min: 0, max: top, bounded_below: true, bounded_above: false }
    } else {
        Truncation::exact(0, 0)
    }
}

/// Replaces letter `pos` of `letters` by the word `insert`.
fn splice(letters: &[Name], pos: usize, width: usize, insert: &[Name]) -> Name {
    let mut w = letters[..pos].to_vec();
    w.extend_from_slice(insert);
    w.extend_from_slice(&letters[pos + width..]);
    Name::word(w)
}

/// Highest cobar degree computable from `c`, capped at `max_degree`.
pub fn cobar_top(c: &DGCoalgebra, max_degree: i64) -> i64 {
    let t = c.truncation();
    if t.bounded_above {
        max_degree
    } else {
        max_degree.min(t.max - 1)
    }
}

/// Highest bar degree computable from `a`, capped at `max_degree`.
pub fn bar_top(a: &DGAlgebra, max_degree: i64) -> i64 {
    let t = a.truncation();
    if t.bounded_above {
        max_degree
    } else {
        max_degree.min(t.max + 1)
    }
}

/// `ΩC = (T(s⁻¹C₊), d_Ω)` on words of degree `≤ max_degree`, with
/// `d_Ω(s⁻¹c) = −s⁻¹dc + Σ (−1)^{|c_i|} s⁻¹c_i|s⁻¹c^i` over `Δ̄c = Σ c_i⊗c^i`,
/// extended as a derivation.
pub fn cobar(c: &DGCoalgebra, max_degree: i64) -> Result<DGAlgebra> {
    if !c.is_one_connected() {
        return Err(BarCobarError::CobarNotOneConnected);
    }
    let top = cobar_top(c, max_degree);
    let generators: Vec<&Name> = c.positive_basis().filter(|x| x.degree() - 1 <= top).collect();
    let letters: Vec<Name> = generators.iter().map(|x| cobar_letter((*x).clone())).collect();
    let module = Arc::new(FreeGradedModule::new(c.ring().clone(), words(&letters, top))?);
    let letter_d: BTreeMap<Name, Element> = generators
        .iter()
        .map(|x| {
            let mut e = Element::zero();
            for (y, k) in c.d().image(x).iter() {
                if y.degree() > 0 {
                    e.add_term(Name::word(vec![cobar_letter(y.clone())]), &-k.clone());
                }
            }
            for (p, k) in c.reduced_delta(x).iter() {
                let f = p.tensor_factors(2).expect("binary tensor");
                let w = Name::word(vec![cobar_letter(f[0].clone()), cobar_letter(f[1].clone())]);
                e.add_term(w, &(sign(f[0].degree()) * k));
            }
            (cobar_letter((*x).clone()), e)
        })
        .collect();
    let d = GradedMap::from_fn(module.clone(), module.clone(), -1, |w| {
        let ls = w.word_letters().expect("cobar word");
        let mut out = Element::zero();
        let mut passed = 0;
        for (i, l) in ls.iter().enumerate() {
            for (x, k) in letter_d[l].iter() {
                let insert = x.word_letters().expect("cobar word");
                out.add_term(splice(ls, i, 1, insert), &(sign(passed) * k));
            }
            passed += l.degree();
        }
        out
    })?;
    let complex = ChainComplex::new(d, window(!letters.is_empty(), top))?;
    let product = |a: &Name, b: &Name| {
        let mut w = a.word_letters().expect("cobar word").to_vec();
        w.extend_from_slice(b.word_letters().expect("cobar word"));
        let w = Name::word(w);
        if module.contains(&w) {
            Element::basis(w)
        } else {
            Element::zero()
        }
    };
    Ok(DGAlgebra::connected(complex, product, Name::empty_word())?)
}

/// `BarA = (T(sA₊), d_Bar)` on words of degree `≤ max_degree`, with
/// `d_Bar = Σ_j (−1)^{ε_{j−1}} (−s da_j) + Σ_j (−1)^{ε_j} s(a_j a_{j+1})`,
/// `ε_j = |sa_1| + ⋯ + |sa_j|`, and comultiplication by splitting words.
pub fn bar(a: &DGAlgebra, max_degree: i64) -> Result<DGCoalgebra> {
    if !a.is_connected() {
        return Err(BarCobarError::BarNotConnected);
    }
    let top = bar_top(a, max_degree);
    let letters: Vec<Name> = a.positive_basis().map(bar_letter).filter(|l| l.degree() <= top).collect();
    let module = Arc::new(FreeGradedModule::new(a.ring().clone(), words(&letters, top))?);
    let d = GradedMap::from_fn(module.clone(), module.clone(), -1, |w| {
        let ls = w.word_letters().expect("bar word");
        let mut out = Element::zero();
        let mut passed = 0;
        for (j, l) in ls.iter().enumerate() {
            let x = unletter(l);
            for (y, k) in a.d().image(x).iter() {
                if y.degree() > 0 {
                    out.add_term(splice(ls, j, 1, &[bar_letter(y)]), &(-sign(passed) * k));
                }
            }
            if let Some(next) = ls.get(j + 1) {
                for (y, k) in a.product(x, unletter(next)).iter() {
                    if y.degree() > 0 {
                        out.add_term(splice(ls, j, 2, &[bar_letter(y)]), &(sign(passed + l.degree()) * k));
                    }
                }
            }
            passed += l.degree();
        }
        out
    })?;
    let complex = ChainComplex::new(d, window(!letters.is_empty(), top))?;
    let delta = |w: &Name| {
        let ls = w.word_letters().expect("bar word");
        Element::from_terms(
            (0..=ls.len()).map(|k| (Scalar::one(), Name::tensor(vec![Name::word(ls[..k].to_vec()), Name::word(ls[k..].to_vec())]))),
        )
    };
    Ok(DGCoalgebra::connected(complex, delta, Name::empty_word())?)
}

/// `t_Ω: C → ΩC`, `c ↦ s⁻¹c` on `C₊` and zero on the unit.
pub fn universal_cochain(c: &DGCoalgebra, max_degree: i64) -> Result<TwistingCochain> {
    let omega = cobar(c, max_degree)?;
    let source = c.truncate_above(omega.max_degree() + 1)?;
    let map = GradedMap::from_fn(source.module().clone(), omega.module().clone(), -1, |x| {
        if x.degree() > 0 {
            Element::basis(Name::word(vec![cobar_letter(x.clone())]))
        } else {
            Element::zero()
        }
    })?;
    Ok(TwistingCochain { source, target: omega, map })
}

/// `t_Bar: BarA → A`, `sa ↦ a` on words of length one and zero otherwise.
pub fn couniversal_cochain(a: &DGAlgebra, max_degree: i64) -> Result<TwistingCochain> {
    let b = bar(a, max_degree)?;
    let target = a.truncate_above(b.max_degree() - 1)?;
    let map = GradedMap::from_fn(b.module().clone(), target.module().clone(), -1, |w| match w.word_letters() {
        Some([l]) => Element::basis(unletter(l).clone()),
        _ => Element::zero(),
    })?;
    Ok(TwistingCochain { source: b, target, map })
}

/// `η: C → BarΩC`, `c ↦ Σₙ [s(s⁻¹c_(1))|⋯|s(s⁻¹c_(n))]` over `Δ̄^{(n)}c`,
/// with the unit sent to the empty word.
pub fn unit_bar_cobar(c: &DGCoalgebra, max_degree: i64) -> Result<ChainMap> {
    let omega = cobar(c, max_degree)?;
    let b = bar(&omega, max_degree)?;
    let source = c.truncate_above(b.max_degree())?;
    let map = GradedMap::from_fn(source.module().clone(), b.module().clone(), 0, |x| {
        if x.degree() == 0 {
            return Element::term(source.counit_value(x), Name::empty_word());
        }
        let mut out = Element::zero();
        for n in 1..=x.degree() as usize {
            let iter = source.iterated_reduced_delta(x, n);
            if iter.is_empty() {
                break;
            }
            for (p, k) in iter.iter() {
                let letters = p
                    .tensor_factors(n)
                    .expect("iterated diagonal")
                    .into_iter()
                    .map(|y| bar_letter(&Name::word(vec![cobar_letter(y.clone())])))
                    .collect();
                out.add_term(Name::word(letters), k);
            }
        }
        out
    })?;
    Ok(ChainMap::new(source.complex().clone(), b.complex().clone(), map)?)
}

/// Milgram's algebra map `q: Ω(C⊗C′) → ΩC⊗ΩC′`, given on generators by
/// `s⁻¹(w⊗1) ↦ s⁻¹w⊗1`, `s⁻¹(1⊗w′) ↦ 1⊗s⁻¹w′` and zero otherwise.
pub fn milgram_q(c: &DGCoalgebra, c2: &DGCoalgebra, max_degree: i64) -> Result<AlgebraMap> {
    let source = cobar(&c.tensor(c2)?, max_degree)?;
    let target = cobar(c, max_degree)?.tensor(&cobar(c2, max_degree)?)?;
    let (u1, u2) = (c.unit().cloned(), c2.unit().cloned());
    let empty = Name::empty_word();
    let generator = |l: &Name| {
        let f = unletter(l).tensor_factors(2).expect("binary tensor");
        let single = |x: &Name| Name::word(vec![cobar_letter(x.clone())]);
        if Some(f[1]) == u2.as_ref() {
            Element::basis(Name::tensor(vec![single(f[0]), empty.clone()]))
        } else if Some(f[0]) == u1.as_ref() {
            Element::basis(Name::tensor(vec![empty.clone(), single(f[1])]))
        } else {
            Element::zero()
        }
    };
    let map = GradedMap::from_fn(source.module().clone(), target.module().clone(), 0, |w| {
        let images: Vec<Element> = w.word_letters().expect("cobar word").iter().map(&generator).collect();
        target.mul_all(&images).map_names(|n| target.module().contains(n).then(|| (Scalar::one(), n.clone())))
    })?;
    Ok(AlgebraMap::new(source, target, map)?)
}

/// Product in `A⊗A`: `(a⊗b)(c⊗d) = (−1)^{|b||c|} ac⊗bd`.
pub fn tensor_square_mul(a: &DGAlgebra, x: &Element, y: &Element) -> Element {
    let mut out = Element::zero();
    for (p, k) in x.iter() {
        let f = p.tensor_factors(2).expect("binary tensor");
        for (q, l) in y.iter() {
            let g = q.tensor_factors(2).expect("binary tensor");
            let left = a.product(f[0], g[0]);
            let right = a.product(f[1], g[1]);
            let s = crate::graded::tensor_algebra_sign(f[1].degree(), g[0].degree()) * k * l;
            out.add_scaled(&Element::tensor(&[&left, &right]), &s);
        }
    }
    out
}

/// `ΩC` as a Hopf algebra whose diagonal is multiplicative and takes the
/// one-letter word `[s⁻¹c]` to `letter_delta(s⁻¹c)`.
pub fn cobar_hopf(c: &DGCoalgebra, max_degree: i64, mut letter_delta: impl FnMut(&Name) -> Element) -> Result<HopfAlgebra> {
    let algebra = cobar(c, max_degree)?;
    let unit = Name::empty_word();
    let square = tensor_power_module(algebra.complex(), 2)?;
    let mut memo: BTreeMap<Name, Element> = BTreeMap::new();
    let comult = GradedMap::from_fn(algebra.module().clone(), square.clone(), 0, |w| {
        let mut acc = Element::basis(Name::tensor(vec![unit.clone(), unit.clone()]));
        for l in w.word_letters().expect("cobar word") {
            let dl = memo.entry(l.clone()).or_insert_with(|| letter_delta(l)).clone();
            acc = tensor_square_mul(&algebra, &acc, &dl);
        }
        acc.map_names(|n| square.contains(n).then(|| (Scalar::one(), n.clone())))
    })?;
    let counit = [(unit.clone(), Scalar::one())].into_iter().collect();
    let coalgebra = DGCoalgebra::new(algebra.complex().clone(), comult, counit, Some(unit))?;
    Ok(HopfAlgebra::new(algebra, coalgebra)?)
}

/// `ΩC` with every letter primitive.
pub fn primitive_cobar_hopf(c: &DGCoalgebra, max_degree: i64) -> Result<HopfAlgebra> {
    cobar_hopf(c, max_degree, |l| {
        let w = Name::word(vec![l.clone()]);
        Element::from_terms([
            (Scalar::one(), Name::tensor(vec![w.clone(), Name::empty_word()])),
            (Scalar::one(), Name::tensor(vec![Name::empty_word(), w])),
        ])
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dgstruct::{check_algebra, check_algebra_map, check_coalgebra};
    use crate::exactlin::{int, CoeffRing};
    use crate::fixtures::{free_algebra, gamma, gamma_gen as v, ground_coalgebra, sphere_coalgebra};
    use crate::twist::check_twisting_cochain;

    fn letter(k: i64) -> Name {
        cobar_letter(v(k))
    }

    fn word(ks: &[i64]) -> Name {
        Name::word(ks.iter().map(|&k| letter(k)).collect())
    }

    #[test]
    fn cobar_of_divided_powers() {
        let c = gamma(13, CoeffRing::Integers).coalgebra;
        let omega = cobar(&c, 12).unwrap();
        assert_eq!(omega.max_degree(), 12);
        assert!(omega.complex().verify_differential().passed());
        assert!(check_algebra(&omega).passed());
        // generator s⁻¹v(n) sits in degree 2n − 1
        for n in 1..=6 {
            assert_eq!(letter(n).degree(), 2 * n - 1);
        }
        // d(s⁻¹v(3)) = s⁻¹v(1)|s⁻¹v(2) + s⁻¹v(2)|s⁻¹v(1)
        let expected = Element::from_terms([(int(1), word(&[1, 2])), (int(1), word(&[2, 1]))]);
        assert_eq!(omega.d().image(&word(&[3])), expected);
        assert!(omega.d().image(&word(&[1])).is_empty());
    }

    #[test]
    fn cobar_rejects_non_one_connected_input() {
        let err = cobar(&sphere_coalgebra(1, CoeffRing::Integers).unwrap(), 6).unwrap_err();
        assert!(err.to_string().contains("cobar requires 1-connected input"));
    }

    #[test]
    fn cobar_of_trivial_inputs() {
        let omega = cobar(&ground_coalgebra(CoeffRing::Integers), 6).unwrap();
        assert_eq!(omega.module().total_dim(), 1);
        let sphere = sphere_coalgebra(2, CoeffRing::Integers).unwrap();
        let omega = cobar(&sphere, 8).unwrap();
        assert!(omega.d().is_zero_in_ring());
        assert_eq!(omega.module().dim(8), 1);
    }

    #[test]
    fn bar_constructions() {
        let a = free_algebra(1, 10, CoeffRing::Integers).unwrap();
        let b = bar(&a, 10).unwrap();
        assert!(b.complex().verify_differential().passed());
        assert!(check_coalgebra(&b).passed());
        let sx = bar_letter(&Name::gen("x^1", 1));
        let sx2 = bar_letter(&Name::gen("x^2", 2));
        // d(sx|sx) = (−1)^{|sx|} s(x²)
        assert_eq!(b.d().image(&Name::word(vec![sx.clone(), sx.clone()])), Element::basis(Name::word(vec![sx2])));
        let gamma_alg = gamma(12, CoeffRing::Integers).algebra;
        let b = bar(&gamma_alg, 12).unwrap();
        assert!(b.complex().verify_differential().passed());
        assert!(check_coalgebra(&b).passed());
    }

    #[test]
    fn bar_rejects_disconnected_input() {
        let ring = CoeffRing::Integers;
        let (e, f) = (Name::gen("e", 0), Name::gen("f", 0));
        let module = Arc::new(FreeGradedModule::new(ring, [e.clone(), f.clone()]).unwrap());
        let complex = ChainComplex::zero_differential(module, Truncation::exact(0, 0)).unwrap();
        let a = DGAlgebra::build(
            complex,
            |x, y| if x == y { Element::basis(x.clone()) } else { Element::zero() },
            Element::from_terms([(int(1), e.clone()), (int(1), f)]),
            [(e, int(1))].into_iter().collect(),
        )
        .unwrap();
        assert_eq!(bar(&a, 4).unwrap_err(), BarCobarError::BarNotConnected);
    }

    #[test]
    fn universal_cochains_twist() {
        let c = gamma(13, CoeffRing::Integers).coalgebra;
        let t = universal_cochain(&c, 12).unwrap();
        assert!(t.apply(&v(0)).is_empty());
        assert!(check_twisting_cochain(&t).passed());
        let a = gamma(12, CoeffRing::Integers).algebra;
        let t = couniversal_cochain(&a, 12).unwrap();
        let sv = |k| bar_letter(&v(k));
        assert!(t.apply(&Name::word(vec![sv(1), sv(1)])).is_empty());
        assert_eq!(t.apply(&Name::word(vec![sv(2)])), Element::basis(v(2)));
        assert!(check_twisting_cochain(&t).passed());
    }

    #[test]
    fn unit_map_is_a_quasi_isomorphism() {
        let c = gamma(10, CoeffRing::Integers).coalgebra;
        let eta = unit_bar_cobar(&c, 10).unwrap();
        assert!(eta.check().passed());
        assert!(eta.is_quasi_iso(&CoeffRing::Integers, 8).unwrap());
        let s2 = sphere_coalgebra(2, CoeffRing::Integers).unwrap();
        let eta = unit_bar_cobar(&s2, 8).unwrap();
        assert!(eta.check().passed());
        assert!(eta.is_quasi_iso(&CoeffRing::Integers, 6).unwrap());
        let eta = unit_bar_cobar(&ground_coalgebra(CoeffRing::Integers), 4).unwrap();
        assert_eq!(eta.map.image(&Name::gen("1", 0)), Element::basis(Name::empty_word()));
    }

    #[test]
    fn milgram_map() {
        let c = gamma(10, CoeffRing::Integers).coalgebra;
        let q = milgram_q(&c, &c, 10).unwrap();
        assert!(check_algebra_map(&q).passed());
        let lhs = Name::word(vec![cobar_letter(Name::tensor(vec![v(2), v(0)]))]);
        let image = Element::basis(Name::tensor(vec![word(&[2]), Name::empty_word()]));
        assert_eq!(q.map.image(&lhs), image);
        let mixed = Name::word(vec![cobar_letter(Name::tensor(vec![v(1), v(1)]))]);
        assert!(q.map.image(&mixed).is_empty());
    }
}
