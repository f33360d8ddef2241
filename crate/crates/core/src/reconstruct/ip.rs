use std::fmt::Write as _;

use crate::extract::CandidateSet;
use crate::model::{Direction, AXIS_TOLERANCE};

/// Corner candidates closer than this on a shared wall line exclude each other.
pub const CORNER_EXCLUSION_RADIUS: f64 = 10.0;
pub const ICON_EXCLUSION_IOU: f64 = 0.3;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Le,
    Eq,
}

/// `Σ coef·x (≤ | =) rhs` over binary variables.
#[derive(Clone, Debug, PartialEq)]
pub struct Constraint {
    pub terms: Vec<(usize, i64)>,
    pub sense: Sense,
    pub rhs: i64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Variable {
    Corner(usize),
    Wall(usize),
    Opening(usize),
    Icon(usize),
    Free(usize),
}

impl Variable {
    fn lp_name(self) -> String {
        match self {
            Variable::Corner(i) => format!("c{i}"),
            Variable::Wall(i) => format!("w{i}"),
            Variable::Opening(i) => format!("o{i}"),
            Variable::Icon(i) => format!("i{i}"),
            Variable::Free(i) => format!("x{i}"),
        }
    }
}

/// Maximize `Σ objective[i]·x_i` subject to `constraints`, `x ∈ {0,1}ⁿ`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct IpModel {
    pub objective: Vec<f64>,
    pub variables: Vec<Variable>,
    pub constraints: Vec<Constraint>,
}

impl IpModel {
    /// A bare model over anonymous variables.
    pub fn new(objective: Vec<f64>) -> Self {
        let variables = (0..objective.len()).map(Variable::Free).collect();
        Self {
            objective,
            variables,
            constraints: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.objective.len()
    }

    pub fn is_empty(&self) -> bool {
        self.objective.is_empty()
    }

    pub fn add(&mut self, terms: Vec<(usize, i64)>, sense: Sense, rhs: i64) {
        self.constraints.push(Constraint { terms, sense, rhs });
    }

    fn push_var(&mut self, v: Variable, w: f64) -> usize {
        self.variables.push(v);
        self.objective.push(w);
        self.objective.len() - 1
    }

    pub fn is_feasible(&self, x: &[bool]) -> bool {
        self.constraints.iter().all(|c| {
            let lhs: i64 = c.terms.iter().map(|&(i, a)| if x[i] { a } else { 0 }).sum();
            match c.sense {
                Sense::Le => lhs <= c.rhs,
                Sense::Eq => lhs == c.rhs,
            }
        })
    }

    /// Objective of an assignment, summed in variable order.
    pub fn value(&self, x: &[bool]) -> f64 {
        self.objective
            .iter()
            .zip(x)
            .filter(|(_, &on)| on)
            .fold(0.0, |acc, (w, _)| acc + w)
    }

    /// CPLEX LP text for cross-checking with external solvers.
    pub fn to_lp(&self) -> String {
        let names: Vec<String> = self.variables.iter().map(|v| v.lp_name()).collect();
        let mut s = String::from("\\ floorplan selection\nMaximize\n obj:");
        if self.objective.is_empty() {
            s.push_str(" 0");
        }
        for (w, n) in self.objective.iter().zip(&names) {
            let _ = write!(s, " {} {} {n}", if *w < 0.0 { '-' } else { '+' }, w.abs());
        }
        s.push_str("\nSubject To\n");
        for (k, c) in self.constraints.iter().enumerate() {
            let _ = write!(s, " r{k}:");
            for &(i, a) in &c.terms {
                let _ = write!(s, " {} {} {}", if a < 0 { '-' } else { '+' }, a.abs(), names[i]);
            }
            let op = match c.sense {
                Sense::Le => "<=",
                Sense::Eq => "=",
            };
            let _ = writeln!(s, " {op} {}", c.rhs);
        }
        s.push_str("Binary\n");
        for n in &names {
            let _ = writeln!(s, " {n}");
        }
        s.push_str("End\n");
        s
    }
}

/// The selection program over all candidates: objective = candidate weights;
/// rows for wall–corner implication, junction degree and per-direction
/// uniqueness, opening hosting, nearby-corner and overlapping-icon exclusion.
pub fn build_ip(c: &CandidateSet) -> IpModel {
    let mut m = IpModel::default();
    let cv: Vec<usize> = (0..c.corners.len())
        .map(|i| m.push_var(Variable::Corner(i), c.corners[i].weight()))
        .collect();
    let wv: Vec<usize> = (0..c.walls.len())
        .map(|i| m.push_var(Variable::Wall(i), c.walls[i].weight))
        .collect();
    let ov: Vec<usize> = (0..c.openings.len())
        .map(|i| m.push_var(Variable::Opening(i), c.openings[i].weight))
        .collect();
    let iv: Vec<usize> = (0..c.icons.len())
        .map(|i| m.push_var(Variable::Icon(i), c.icons[i].weight))
        .collect();

    for (k, w) in c.walls.iter().enumerate() {
        m.add(vec![(wv[k], 1), (cv[w.a], -1)], Sense::Le, 0);
        m.add(vec![(wv[k], 1), (cv[w.b], -1)], Sense::Le, 0);
    }

    let mut incident: Vec<[Vec<usize>; 4]> = vec![Default::default(); c.corners.len()];
    for (k, w) in c.walls.iter().enumerate() {
        let (s, t) = w.segment;
        let d = Direction::of_vector(t.x - s.x, t.y - s.y).expect("wall has length");
        incident[w.a][d.index()].push(k);
        incident[w.b][d.opposite().index()].push(k);
    }
    for (i, corner) in c.corners.iter().enumerate() {
        let deg = corner.junction.shape().degree() as i64;
        let mut terms: Vec<(usize, i64)> = incident[i]
            .iter()
            .flatten()
            .map(|&k| (wv[k], 1))
            .collect();
        terms.sort_unstable();
        terms.push((cv[i], -deg));
        m.add(terms, Sense::Eq, 0);
        for walls in &incident[i] {
            if walls.len() >= 2 {
                m.add(walls.iter().map(|&k| (wv[k], 1)).collect(), Sense::Le, 1);
            }
        }
    }

    for (k, o) in c.openings.iter().enumerate() {
        let mut terms = vec![(ov[k], 1)];
        terms.extend(o.hosts.iter().map(|&h| (wv[h], -1)));
        m.add(terms, Sense::Le, 0);
    }

    for i in 0..c.corners.len() {
        for j in i + 1..c.corners.len() {
            let (p, q) = (c.corners[i].position, c.corners[j].position);
            let aligned = (p.x - q.x).abs() <= AXIS_TOLERANCE || (p.y - q.y).abs() <= AXIS_TOLERANCE;
            if aligned && p.distance(q) <= CORNER_EXCLUSION_RADIUS {
                m.add(vec![(cv[i], 1), (cv[j], 1)], Sense::Le, 1);
            }
        }
    }

    for i in 0..c.icons.len() {
        for j in i + 1..c.icons.len() {
            if c.icons[i].rect.iou(&c.icons[j].rect) > ICON_EXCLUSION_IOU {
                m.add(vec![(iv[i], 1), (iv[j], 1)], Sense::Le, 1);
            }
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extract::{Component, CornerCandidate, WallCandidate};
    use crate::geometry::Point;

    fn corner(x: f64, y: f64, j: &str, peak: f32) -> CornerCandidate {
        CornerCandidate {
            position: Point::new(x, y),
            junction: j.parse().unwrap(),
            component: Component {
                pixels: vec![(y as usize, x as usize)],
                peak: (y as usize, x as usize),
                peak_value: peak,
            },
            peak_value: peak,
        }
    }

    #[test]
    fn empty_candidates_empty_model() {
        let m = build_ip(&CandidateSet::default());
        assert!(m.is_empty());
        assert!(m.constraints.is_empty());
    }

    #[test]
    fn one_wall_two_corners() {
        let c = CandidateSet {
            corners: vec![corner(10.0, 10.0, "I_0", 0.9), corner(50.0, 10.0, "I_180", 0.9)],
            walls: vec![WallCandidate {
                a: 0,
                b: 1,
                horizontal: true,
                segment: (Point::new(10.0, 10.0), Point::new(50.0, 10.0)),
                confidence: 0.8,
                weight: 0.3,
            }],
            ..Default::default()
        };
        let m = build_ip(&c);
        assert_eq!(m.len(), 3);
        assert_eq!(m.objective[2], 0.3);
        assert!((m.objective[0] - 0.4).abs() < 1e-6);
        assert_eq!(
            m.constraints[0],
            Constraint {
                terms: vec![(2, 1), (0, -1)],
                sense: Sense::Le,
                rhs: 0
            }
        );
        assert_eq!(m.constraints[1].terms, vec![(2, 1), (1, -1)]);
        assert_eq!(m.constraints.len(), 4);
        let lp = m.to_lp();
        assert!(lp.starts_with("\\ floorplan selection\nMaximize\n"));
        assert!(lp.contains(" r0: + 1 w0 - 1 c0 <= 0\n"));
        assert!(lp.contains(" r2: + 1 w0 - 1 c0 = 0\n"));
        assert!(lp.ends_with("Binary\n c0\n c1\n w0\nEnd\n"));
    }

    #[test]
    fn nearby_aligned_corners_exclude() {
        let c = CandidateSet {
            corners: vec![corner(10.0, 10.0, "X", 0.9), corner(18.0, 11.0, "L_0", 0.9)],
            ..Default::default()
        };
        let m = build_ip(&c);
        assert_eq!(m.constraints.last().unwrap().terms, vec![(0, 1), (1, 1)]);
        assert_eq!(m.constraints.len(), 3);
    }

    #[test]
    fn feasibility_and_value() {
        let mut m = IpModel::new(vec![0.5, -0.25]);
        m.add(vec![(0, 1), (1, -1)], Sense::Le, 0);
        assert!(!m.is_feasible(&[true, false]));
        assert!(m.is_feasible(&[true, true]));
        assert_eq!(m.value(&[true, true]), 0.25);
    }
}
