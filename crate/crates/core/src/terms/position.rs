use std::fmt;

/// A position: a path of 1-based argument indices. The root is the empty
/// path.
#[derive(Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(Vec<usize>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn new(path: Vec<usize>) -> Position {
        assert!(path.iter().all(|&i| i > 0), "positions are strings of positive integers");
        Position(path)
    }

    pub fn indices(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn push(&mut self, i: usize) {
        self.0.push(i);
    }

    pub fn pop(&mut self) -> Option<usize> {
        self.0.pop()
    }

    /// `i.self`
    pub fn prepend(&self, i: usize) -> Position {
        let mut path = Vec::with_capacity(self.0.len() + 1);
        path.push(i);
        path.extend_from_slice(&self.0);
        Position(path)
    }

    pub fn concat(&self, other: &Position) -> Position {
        let mut path = self.0.clone();
        path.extend_from_slice(&other.0);
        Position(path)
    }

    /// `self <= other`: `other` lies below (or at) `self`.
    pub fn is_prefix_of(&self, other: &Position) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_parallel_to(&self, other: &Position) -> bool {
        !self.is_prefix_of(other) && !other.is_prefix_of(self)
    }

    /// `other \ self`, defined when `self <= other`.
    pub fn suffix_of(&self, other: &Position) -> Option<Position> {
        other.0.strip_prefix(self.0.as_slice()).map(|s| Position(s.to_vec()))
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    /// The position without its first index.
    pub fn tail(&self) -> Position {
        Position(self.0.iter().skip(1).copied().collect())
    }
}

impl From<Vec<usize>> for Position {
    fn from(path: Vec<usize>) -> Self {
        Position::new(path)
    }
}

/// Prints `ε` for the root and dot-separated indices otherwise.
impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, n) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            write!(f, "{n}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
