use super::{GraphBuilder, GraphError, Length, MetricGraph};

/// Endpoint of a pumpkin chain that receives the Dirichlet mark.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DirichletEnd {
    Start,
    End,
}

/// Standard graph families.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Interval(Length),
    Loop(Length),
    /// Equilateral star with `m` arms and total length `total`.
    Star {
        m: usize,
        total: Length,
    },
    Lasso {
        stick: Length,
        ring: Length,
    },
    Dumbbell {
        left: Length,
        handle: Length,
        right: Length,
    },
    /// Bundles of parallel edges `(multiplicity, edge length)` in a row.
    PumpkinChain(Vec<(usize, Length)>),
    /// Pumpkin chain with one Dirichlet endpoint.
    Caterpillar {
        chain: Vec<(usize, Length)>,
        end: DirichletEnd,
    },
    /// Bundles of parallel edges closed up into a cycle.
    Necklace(Vec<(usize, Length)>),
    /// Loops of the given lengths sharing one vertex.
    Flower(Vec<Length>),
    /// Star with `loops + leaves` arms of length `arm`; `loops` of the arms
    /// end in a loop of length `ring`.
    Windmill {
        loops: usize,
        leaves: usize,
        arm: Length,
        ring: Length,
    },
    /// `[0,1] ⊔ [0,a]`.
    TwoIntervals(Length),
}

fn check(l: &Length, what: &str) -> Result<(), GraphError> {
    if l.is_valid() {
        Ok(())
    } else {
        Err(GraphError::InvalidParameter(format!(
            "{what} must be positive, got {l}"
        )))
    }
}

impl Family {
    pub fn build(&self) -> Result<MetricGraph, GraphError> {
        let mut b = GraphBuilder::new(self.label());
        match self {
            Family::Interval(l) => {
                check(l, "length")?;
                b.vertex("v0").vertex("v1").edge("e1", "v0", "v1", *l);
            }
            Family::Loop(l) => {
                check(l, "length")?;
                b.vertex("v").edge("e1", "v", "v", *l);
            }
            Family::Star { m, total } => {
                if *m < 1 {
                    return Err(GraphError::InvalidParameter("star needs m >= 1".into()));
                }
                check(total, "total length")?;
                let arm = total.div_count(*m as i64);
                b.vertex("c");
                for i in 1..=*m {
                    b.vertex(&format!("l{i}"));
                    b.edge(&format!("e{i}"), "c", &format!("l{i}"), arm);
                }
            }
            Family::Lasso { stick, ring } => {
                check(stick, "stick")?;
                check(ring, "loop")?;
                b.vertex("w")
                    .vertex("v")
                    .edge("e1", "w", "v", *stick)
                    .edge("e2", "v", "v", *ring);
            }
            Family::Dumbbell { left, handle, right } => {
                for (l, w) in [(left, "left loop"), (handle, "handle"), (right, "right loop")] {
                    check(l, w)?;
                }
                b.vertex("a")
                    .vertex("b")
                    .edge("e1", "a", "a", *left)
                    .edge("e2", "a", "b", *handle)
                    .edge("e3", "b", "b", *right);
            }
            Family::PumpkinChain(chain) | Family::Caterpillar { chain, .. } => {
                bundles(&mut b, chain, false)?;
                if let Family::Caterpillar { end, .. } = self {
                    let v = match end {
                        DirichletEnd::Start => "p0".to_string(),
                        DirichletEnd::End => format!("p{}", chain.len()),
                    };
                    b.dirichlet(&v);
                }
            }
            Family::Necklace(chain) => bundles(&mut b, chain, true)?,
            Family::Flower(loops) => {
                if loops.is_empty() {
                    return Err(GraphError::InvalidParameter("flower needs a loop".into()));
                }
                b.vertex("c");
                for (i, l) in loops.iter().enumerate() {
                    check(l, "loop")?;
                    b.edge(&format!("e{}", i + 1), "c", "c", *l);
                }
            }
            Family::Windmill {
                loops,
                leaves,
                arm,
                ring,
            } => {
                check(arm, "arm")?;
                check(ring, "loop")?;
                if loops + leaves < 1 {
                    return Err(GraphError::InvalidParameter("windmill needs an arm".into()));
                }
                b.vertex("c");
                for i in 1..=*loops {
                    let v = format!("a{i}");
                    b.vertex(&v);
                    b.edge(&format!("s{i}"), "c", &v, *arm);
                    b.edge(&format!("r{i}"), &v, &v, *ring);
                }
                for i in 1..=*leaves {
                    let v = format!("l{i}");
                    b.vertex(&v);
                    b.edge(&format!("t{i}"), "c", &v, *arm);
                }
            }
            Family::TwoIntervals(a) => {
                check(a, "a")?;
                b.vertex("x0")
                    .vertex("x1")
                    .vertex("y0")
                    .vertex("y1")
                    .edge("i1", "x0", "x1", Length::exact(1, 1))
                    .edge("ia", "y0", "y1", *a);
            }
        }
        b.build()
    }

    fn label(&self) -> String {
        match self {
            Family::Interval(l) => format!("interval({l})"),
            Family::Loop(l) => format!("loop({l})"),
            Family::Star { m, total } => format!("star({m},{total})"),
            Family::Lasso { stick, ring } => format!("lasso({stick},{ring})"),
            Family::Dumbbell { left, handle, right } => format!("dumbbell({left},{handle},{right})"),
            Family::PumpkinChain(c) => format!("pumpkin_chain({})", chain_label(c)),
            Family::Caterpillar { chain, .. } => format!("caterpillar({})", chain_label(chain)),
            Family::Necklace(c) => format!("necklace({})", chain_label(c)),
            Family::Flower(l) => format!(
                "flower({})",
                l.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
            ),
            Family::Windmill {
                loops,
                leaves,
                arm,
                ring,
            } => format!("windmill({loops},{leaves},{arm},{ring})"),
            Family::TwoIntervals(a) => format!("two_intervals({a})"),
        }
    }
}

fn chain_label(c: &[(usize, Length)]) -> String {
    c.iter().map(|(m, l)| format!("{m}x{l}")).collect::<Vec<_>>().join(",")
}

fn bundles(b: &mut GraphBuilder, chain: &[(usize, Length)], closed: bool) -> Result<(), GraphError> {
    if chain.is_empty() || chain.iter().any(|(m, _)| *m == 0) {
        return Err(GraphError::InvalidParameter("bundles need multiplicity >= 1".into()));
    }
    let n = chain.len();
    let nv = if closed { n } else { n + 1 };
    for i in 0..nv {
        b.vertex(&format!("p{i}"));
    }
    let mut id = 0;
    for (i, (mult, l)) in chain.iter().enumerate() {
        check(l, "bundle length")?;
        let (u, v) = (format!("p{i}"), format!("p{}", (i + 1) % nv));
        for _ in 0..*mult {
            id += 1;
            b.edge(&format!("e{id}"), &u, &v, *l);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn star_is_equilateral() {
        let g = Family::Star { m: 3, total: 3.into() }.build().unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edge_count(), 3);
        assert!(g
            .edges()
            .iter()
            .all(|e| e.len() == 1.0 && e.length.as_rational().is_some()));
        assert!(Family::Star { m: 0, total: 3.into() }.build().is_err());
    }

    #[test]
    fn two_intervals_is_disconnected() {
        let g = Family::TwoIntervals(2.into()).build().unwrap();
        assert_eq!(g.component_count(), 2);
        assert_eq!(g.total_length(), 3.0);
        assert!(Family::TwoIntervals(0.into()).build().is_err());
    }

    #[test]
    fn caterpillar_marks_an_end() {
        let g = Family::Caterpillar {
            chain: vec![(2, 1.0.into()), (2, 1.0.into())],
            end: DirichletEnd::End,
        }
        .build()
        .unwrap();
        assert_eq!(g.dirichlet_vertices(), vec![2]);
        assert_eq!(g.edge_count(), 4);
    }

    #[test]
    fn windmill_shape() {
        let g = Family::Windmill {
            loops: 2,
            leaves: 4,
            arm: 1.into(),
            ring: 0.1.into(),
        }
        .build()
        .unwrap();
        assert_eq!(g.edge_count(), 8);
        assert_eq!(g.vertex_count(), 7);
        assert_eq!(g.degree(0), 6);
    }
}
