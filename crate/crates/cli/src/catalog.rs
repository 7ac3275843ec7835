//! Named documents built from the library's fixtures; the files under
//! `fixtures/` are their serialized forms.

use orbitalg::barcobar::universal_cochain;
use orbitalg::circle::CircleAction;
use orbitalg::dcsh::{DCSHFamily, DCSHModuleMap, MultiplicativeDCSH};
use orbitalg::dgstruct::{regular_module, CoalgebraMap, HopfAlgebra, Side};
use orbitalg::exactlin::{int, CoeffRing};
use orbitalg::fixtures::{free_algebra, gamma, ground_coalgebra, sphere_coalgebra};
use orbitalg::graded::{Element, GradedMap};
use orbitalg::simpl;

use crate::document::{self as doc, invalid, Body, Document, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Fixture {
    /// Divided powers on a degree 2 generator, as a Hopf algebra.
    Gamma,
    /// The ground ring as a coalgebra.
    Ground,
    /// Homology of the 2-sphere as a coalgebra.
    Sphere,
    /// Free algebra on one generator of degree 2.
    FreeAlgebra,
    /// Universal twisting cochain from the divided powers into their cobar construction.
    UniversalTwisting,
    /// Strict multiplicative family `v(k) ↦ 2^k v(k)` on the divided powers.
    ScalingDcsh,
    /// The same scaling between regular right modules.
    ScalingModuleMap,
    /// Zero action on the ground ring.
    PointAction,
    /// Zero action on the 2-sphere coalgebra.
    TrivialSphereAction,
    /// Cobar construction of the divided powers acting on itself.
    RegularAction,
    /// One vertex and one edge.
    Circle,
    Interval,
    TetrahedronBoundary,
    /// One vertex and one 2-simplex.
    MinimalSphere,
    MinimalTorus,
}

impl Fixture {
    pub const ALL: [Fixture; 15] = [
        Fixture::Gamma,
        Fixture::Ground,
        Fixture::Sphere,
        Fixture::FreeAlgebra,
        Fixture::UniversalTwisting,
        Fixture::ScalingDcsh,
        Fixture::ScalingModuleMap,
        Fixture::PointAction,
        Fixture::TrivialSphereAction,
        Fixture::RegularAction,
        Fixture::Circle,
        Fixture::Interval,
        Fixture::TetrahedronBoundary,
        Fixture::MinimalSphere,
        Fixture::MinimalTorus,
    ];

    /// File stem under `fixtures/`.
    pub fn file_stem(self) -> &'static str {
        match self {
            Fixture::Gamma => "gamma",
            Fixture::Ground => "ground",
            Fixture::Sphere => "sphere",
            Fixture::FreeAlgebra => "free_algebra",
            Fixture::UniversalTwisting => "universal_twisting",
            Fixture::ScalingDcsh => "scaling_dcsh",
            Fixture::ScalingModuleMap => "scaling_module_map",
            Fixture::PointAction => "point_action",
            Fixture::TrivialSphereAction => "trivial_sphere_action",
            Fixture::RegularAction => "regular_action",
            Fixture::Circle => "circle",
            Fixture::Interval => "interval",
            Fixture::TetrahedronBoundary => "tetrahedron_boundary",
            Fixture::MinimalSphere => "minimal_sphere",
            Fixture::MinimalTorus => "minimal_torus",
        }
    }

    /// Degree bound the shipped file is generated with.
    pub fn shipped_degree(self) -> i64 {
        match self {
            Fixture::UniversalTwisting | Fixture::ScalingDcsh | Fixture::ScalingModuleMap => 8,
            Fixture::RegularAction => 6,
            _ => 10,
        }
    }
}

fn scaling(h: &HopfAlgebra, lambda: i64) -> GradedMap {
    GradedMap::from_fn(h.module().clone(), h.module().clone(), 0, |n| Element::term(int(lambda.pow((n.degree() / 2) as u32)), n.clone()))
        .expect("scaling is degree preserving")
}

fn scaling_family(h: &HopfAlgebra, lambda: i64, window: i64) -> Result<MultiplicativeDCSH> {
    let cm = CoalgebraMap::new(h.coalgebra.clone(), h.coalgebra.clone(), scaling(h, lambda)).map_err(invalid)?;
    let family = DCSHFamily::strict(&cm, 3, window).map_err(invalid)?;
    MultiplicativeDCSH::new(family, h.clone(), h.clone()).map_err(invalid)
}

/// The fixture through `max_degree` where it has a degree bound.
pub fn build(f: Fixture, max_degree: i64, ring: CoeffRing) -> Result<Document> {
    let body = match f {
        Fixture::Gamma => Body::Hopf(doc::carrier_of_hopf(&gamma(max_degree, ring))?),
        Fixture::Ground => Body::Coalgebra(doc::carrier_of_coalgebra(&ground_coalgebra(ring))?),
        Fixture::Sphere => Body::Coalgebra(doc::carrier_of_coalgebra(&sphere_coalgebra(2, ring).map_err(invalid)?)?),
        Fixture::FreeAlgebra => {
            Body::Algebra(doc::carrier_of_algebra(&free_algebra(2, max_degree, ring).map_err(invalid)?)?)
        }
        Fixture::UniversalTwisting => {
            let c = gamma(max_degree, ring).coalgebra;
            Body::TwistingCochain(doc::twisting_doc(&universal_cochain(&c, max_degree).map_err(invalid)?)?)
        }
        Fixture::ScalingDcsh => {
            let h = gamma(max_degree, ring);
            Body::Dcsh(doc::multiplicative_doc(&scaling_family(&h, 2, max_degree - 2)?)?)
        }
        Fixture::ScalingModuleMap => {
            let h = gamma(max_degree, ring);
            let m = regular_module(&h, Side::Right).map_err(invalid)?;
            let theta = scaling_family(&h, 2, max_degree - 2)?;
            let map = DCSHModuleMap::new(theta.family.clone(), m.clone(), m, theta).map_err(invalid)?;
            Body::DcshModuleMap(doc::module_map_doc(&map)?)
        }
        Fixture::PointAction => Body::CircleAction(doc::circle_action_doc(&CircleAction::point(ring))?),
        Fixture::TrivialSphereAction => {
            let c = sphere_coalgebra(2, ring).map_err(invalid)?;
            Body::CircleAction(doc::circle_action_doc(&CircleAction::trivial(c))?)
        }
        Fixture::RegularAction => {
            let a = CircleAction::regular(max_degree, ring).map_err(invalid)?;
            Body::CircleAction(doc::circle_action_doc(&a)?)
        }
        Fixture::Circle => Body::SimplicialSet(doc::simplicial_set_doc(&simpl::circle())),
        Fixture::Interval => Body::SimplicialSet(doc::simplicial_set_doc(&simpl::interval())),
        Fixture::TetrahedronBoundary => Body::SimplicialSet(doc::simplicial_set_doc(&simpl::tetrahedron_boundary())),
        Fixture::MinimalSphere => Body::SimplicialSet(doc::simplicial_set_doc(&simpl::minimal_sphere())),
        Fixture::MinimalTorus => Body::SimplicialSet(doc::simplicial_set_doc(&simpl::minimal_torus())),
    };
    Ok(Document::new(body))
}
