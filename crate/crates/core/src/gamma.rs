//! Finite balls of the Cayley graph Γ of C₂∗C₃.
//!
//! Γ has a double edge (weight 2) for the generator a and single edges for
//! b and b², so every vertex has degree 4. A ball keeps that ambient degree
//! on its boundary sphere.

use num_traits::One;

use crate::error::Result;
use crate::graph::{quotient, GraphBuilder, Partition, VertexMap, WeightedGraph};
use crate::word::{Letter, ReducedWord, WordBall};
use crate::Rational;

pub const GAMMA_DEGREE: i128 = 4;

/// The ball of radius `radius` around e in Γ.
pub fn gamma_ball(radius: u32, budget: usize) -> Result<WeightedGraph<ReducedWord>> {
    let ball = WordBall::new(radius, budget)?;
    let mut b = GraphBuilder::new();
    for w in &ball.words {
        b.vertex(w.clone());
    }
    let one = Rational::one();
    for w in &ball.words {
        // a-edges are seen from both ends, so each accumulates weight 2;
        // the b-edge {x, xb} is seen once (from its other end it is a b²-edge).
        for l in [Letter::A, Letter::B] {
            let y = w.times(l);
            if ball.index_of(&y).is_some() {
                b.add(w.clone(), y, one)?;
            }
        }
        b.ambient_degree(w.clone(), Rational::from_integer(GAMMA_DEGREE));
    }
    b.build()
}

/// Blocks π⁻¹(n), labelled by n.
pub fn pi_partition(g: &WeightedGraph<ReducedWord>) -> Partition<i64> {
    Partition::by_key(g, ReducedWord::pi_project)
}

/// Orbits of the reflection b ↔ b², labelled by their smaller word.
pub fn reflection_partition(g: &WeightedGraph<ReducedWord>) -> Partition<ReducedWord> {
    Partition::by_key(g, |w| {
        let s = w.swap_b();
        if s < *w {
            s
        } else {
            w.clone()
        }
    })
}

/// Γ-ball quotiented by the π-fibers: a window of the weighted line.
pub fn pi_quotient(g: &WeightedGraph<ReducedWord>) -> Result<(WeightedGraph<i64>, VertexMap)> {
    quotient(g, &pi_partition(g))
}
