use std::fmt;
use std::str::FromStr;

/// Axis direction in grid coordinates, listed in quarter-turn order
/// (0°, 90°, 180°, 270°). +Y points down the image rows.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    PosX,
    PosY,
    NegX,
    NegY,
}

impl Direction {
    pub const ALL: [Direction; 4] = [
        Direction::PosX,
        Direction::PosY,
        Direction::NegX,
        Direction::NegY,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Self {
        Self::ALL[i % 4]
    }

    pub fn rotate(self, quarter_turns: u8) -> Self {
        Self::from_index(self.index() + quarter_turns as usize)
    }

    pub fn opposite(self) -> Self {
        self.rotate(2)
    }

    pub fn is_horizontal(self) -> bool {
        matches!(self, Direction::PosX | Direction::NegX)
    }

    pub fn unit(self) -> (f64, f64) {
        match self {
            Direction::PosX => (1.0, 0.0),
            Direction::PosY => (0.0, 1.0),
            Direction::NegX => (-1.0, 0.0),
            Direction::NegY => (0.0, -1.0),
        }
    }

    /// Dominant-axis direction of a displacement; `None` for a zero vector.
    pub fn of_vector(dx: f64, dy: f64) -> Option<Direction> {
        if dx == 0.0 && dy == 0.0 {
            return None;
        }
        Some(if dx.abs() >= dy.abs() {
            if dx > 0.0 {
                Direction::PosX
            } else {
                Direction::NegX
            }
        } else if dy > 0.0 {
            Direction::PosY
        } else {
            Direction::NegY
        })
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Direction::PosX => "+X",
            Direction::PosY => "+Y",
            Direction::NegX => "-X",
            Direction::NegY => "-Y",
        }
    }
}

#[derive(Clone, Copy, Default, PartialEq, Eq, Hash)]
pub struct DirectionSet(u8);

impl DirectionSet {
    pub const EMPTY: DirectionSet = DirectionSet(0);

    pub fn insert(&mut self, d: Direction) {
        self.0 |= 1 << d.index();
    }

    pub fn contains(self, d: Direction) -> bool {
        self.0 & (1 << d.index()) != 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Direction> {
        Direction::ALL.into_iter().filter(move |d| self.contains(*d))
    }
}

impl FromIterator<Direction> for DirectionSet {
    fn from_iter<T: IntoIterator<Item = Direction>>(iter: T) -> Self {
        let mut s = DirectionSet::EMPTY;
        for d in iter {
            s.insert(d);
        }
        s
    }
}

impl fmt::Debug for DirectionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(Direction::symbol)).finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum JunctionShape {
    I,
    L,
    T,
    X,
}

impl JunctionShape {
    pub fn degree(self) -> usize {
        self as usize + 1
    }
}

/// Room-corner junction: `shape` consecutive directions starting at
/// `orientation` quarter turns. I_0 = {+X}, L_0 = {+X,+Y},
/// T_0 = {+X,+Y,-X}, X = all four.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct JunctionType {
    shape: JunctionShape,
    orientation: u8,
}

impl JunctionType {
    pub const COUNT: usize = 13;
    pub const X: JunctionType = JunctionType {
        shape: JunctionShape::X,
        orientation: 0,
    };

    pub fn new(shape: JunctionShape, quarter_turns: u8) -> Self {
        let orientation = if shape == JunctionShape::X {
            0
        } else {
            quarter_turns % 4
        };
        Self { shape, orientation }
    }

    pub fn shape(self) -> JunctionShape {
        self.shape
    }

    pub fn orientation_degrees(self) -> u32 {
        self.orientation as u32 * 90
    }

    /// Channel order: I_0..I_270, L_0..L_270, T_0..T_270, X.
    pub fn all() -> [JunctionType; Self::COUNT] {
        std::array::from_fn(Self::from_index)
    }

    pub fn index(self) -> usize {
        match self.shape {
            JunctionShape::X => 12,
            s => s as usize * 4 + self.orientation as usize,
        }
    }

    pub fn from_index(i: usize) -> Self {
        assert!(i < Self::COUNT, "junction index {i} out of range");
        if i == 12 {
            return Self::X;
        }
        let shape = [JunctionShape::I, JunctionShape::L, JunctionShape::T][i / 4];
        Self::new(shape, (i % 4) as u8)
    }

    pub fn directions(self) -> DirectionSet {
        (0..self.shape.degree())
            .map(|k| Direction::from_index(self.orientation as usize + k))
            .collect()
    }

    pub fn admits(self, d: Direction) -> bool {
        self.directions().contains(d)
    }

    /// Inverse of [`directions`](Self::directions). Straight-through sets
    /// such as {+X,-X} are not junctions.
    pub fn from_directions(set: DirectionSet) -> Option<Self> {
        let has = |i: usize| set.contains(Direction::from_index(i));
        match set.len() {
            1 => (0..4)
                .find(|&i| has(i))
                .map(|i| Self::new(JunctionShape::I, i as u8)),
            2 => (0..4)
                .find(|&i| has(i) && has(i + 1))
                .map(|i| Self::new(JunctionShape::L, i as u8)),
            3 => (0..4)
                .find(|&i| !has(i))
                .map(|missing| Self::new(JunctionShape::T, (missing + 1) as u8 % 4)),
            4 => Some(Self::X),
            _ => None,
        }
    }

    pub fn rotate(self, quarter_turns: u8) -> Self {
        Self::new(self.shape, self.orientation + quarter_turns % 4)
    }

    pub fn name(self) -> String {
        self.to_string()
    }
}

impl fmt::Display for JunctionType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.shape {
            JunctionShape::X => f.write_str("X"),
            s => write!(f, "{:?}_{}", s, self.orientation_degrees()),
        }
    }
}

impl FromStr for JunctionType {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "X" {
            return Ok(Self::X);
        }
        let (base, deg) = s.split_once('_').ok_or_else(|| s.to_string())?;
        let shape = match base {
            "I" => JunctionShape::I,
            "L" => JunctionShape::L,
            "T" => JunctionShape::T,
            _ => return Err(s.to_string()),
        };
        let turns = match deg {
            "0" => 0,
            "90" => 1,
            "180" => 2,
            "270" => 3,
            _ => return Err(s.to_string()),
        };
        Ok(Self::new(shape, turns))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thirteen_distinct_types_round_trip_through_index_and_name() {
        let all = JunctionType::all();
        for (i, j) in all.iter().enumerate() {
            assert_eq!(j.index(), i);
            assert_eq!(j.name().parse::<JunctionType>().unwrap(), *j);
            assert_eq!(JunctionType::from_directions(j.directions()), Some(*j));
        }
        assert_eq!(all[12].name(), "X");
        assert_eq!(all[5].name(), "L_90");
    }

    #[test]
    fn straight_through_is_not_a_junction() {
        let set: DirectionSet = [Direction::PosX, Direction::NegX].into_iter().collect();
        assert_eq!(JunctionType::from_directions(set), None);
        assert_eq!(JunctionType::from_directions(DirectionSet::EMPTY), None);
    }

    #[test]
    fn t_junction_missing_direction() {
        let t: DirectionSet = [Direction::PosX, Direction::NegX, Direction::NegY]
            .into_iter()
            .collect();
        let j = JunctionType::from_directions(t).unwrap();
        assert_eq!(j.shape(), JunctionShape::T);
        assert!(!j.admits(Direction::PosY));
        assert_eq!(j.name(), "T_180");
    }

    #[test]
    fn rotation_moves_directions() {
        let l0 = "L_0".parse::<JunctionType>().unwrap();
        let r = l0.rotate(1);
        assert_eq!(r.name(), "L_90");
        assert!(r.admits(Direction::PosY) && r.admits(Direction::NegX));
        assert_eq!(JunctionType::X.rotate(3), JunctionType::X);
    }

    #[test]
    fn rejects_bad_names() {
        for bad in ["L_45", "Q_0", "X_90", "L", ""] {
            assert!(bad.parse::<JunctionType>().is_err(), "{bad}");
        }
    }
}
