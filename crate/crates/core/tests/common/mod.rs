//! Proptest strategies shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use stratahj::hamiltonian::{ControlFacet, FacetFamily, Side, SideHamiltonian};
use stratahj::problem::{InitialData, JunctionProblem};

pub fn facet(tangential: bool) -> impl Strategy<Value = ControlFacet> {
    let bt = if tangential { (-1.0..1.0f64).boxed() } else { Just(0.0).boxed() };
    (-2.0..2.0f64, 0.0..1.0f64, -1.0..1.0f64, bt)
        .prop_map(|(b, c, l, bt)| ControlFacet::new(b, c, l).with_tangential(bt))
}

/// At least one facet moving each way, so the Hamiltonian is coercive.
pub fn family(tangential: bool) -> impl Strategy<Value = FacetFamily> {
    (prop::collection::vec(facet(tangential), 0..4), facet(tangential), facet(tangential), 0.2..2.0f64, 0.2..2.0f64)
        .prop_map(|(mut rest, mut left, mut right, bl, br)| {
            left.b = -bl;
            right.b = br;
            rest.push(left);
            rest.push(right);
            FacetFamily::new(rest)
        })
}

pub fn pair(tangential: bool) -> impl Strategy<Value = (SideHamiltonian, SideHamiltonian)> {
    (family(tangential), family(tangential))
        .prop_map(|(r, l)| (SideHamiltonian::facets(Side::Right, r), SideHamiltonian::facets(Side::Left, l)))
}

/// Two-sided problem with random facets and smooth initial data.
pub fn problem(window: (f64, f64), horizon: f64) -> impl Strategy<Value = JunctionProblem> {
    (family(false), family(false), 0.5..4.0f64).prop_map(move |(r, l, frequency)| JunctionProblem {
        name: "random".into(),
        right: SideHamiltonian::facets(Side::Right, r),
        left: Some(SideHamiltonian::facets(Side::Left, l)),
        junction: None,
        initial: InitialData::Sine { frequency },
        horizon,
        window,
    })
}

/// Initial data sampled at `n` points on `[a, b]`, interpolated linearly.
pub fn table(a: f64, b: f64, values: Vec<f64>) -> InitialData {
    let n = values.len();
    let x_samples = (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect();
    InitialData::Table { x_samples, values }
}
