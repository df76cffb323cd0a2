use std::fmt;

/// Half-integer characteristic [a/2; b/2] with a, b ∈ {0,1}², numbered
/// b₀ + 2b₁ + 4a₀ + 8a₁.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Characteristic {
    pub a: [u8; 2],
    pub b: [u8; 2],
}

/// Indices of the ten even characteristics.
pub const EVEN: [usize; 10] = [0, 1, 2, 3, 4, 6, 8, 9, 12, 15];

impl Characteristic {
    pub fn new(a: [u8; 2], b: [u8; 2]) -> Self {
        assert!(a.iter().chain(&b).all(|&x| x <= 1), "entries must be 0 or 1");
        Self { a, b }
    }

    pub fn from_index(k: usize) -> Self {
        assert!(k < 16);
        Self {
            a: [((k >> 2) & 1) as u8, ((k >> 3) & 1) as u8],
            b: [(k & 1) as u8, ((k >> 1) & 1) as u8],
        }
    }

    pub fn index(&self) -> usize {
        (self.b[0] + 2 * self.b[1] + 4 * self.a[0] + 8 * self.a[1]) as usize
    }

    pub fn is_even(&self) -> bool {
        (self.a[0] * self.b[0] + self.a[1] * self.b[1]) % 2 == 0
    }

    pub fn all() -> impl Iterator<Item = Characteristic> {
        (0..16).map(Self::from_index)
    }

    /// Position of an even index inside [`EVEN`].
    pub fn even_slot(k: usize) -> Option<usize> {
        EVEN.iter().position(|&e| e == k)
    }
}

impl fmt::Display for Characteristic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}{};{}{}]", self.a[0], self.a[1], self.b[0], self.b[1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn even_set_and_numbering() {
        let even: Vec<usize> = Characteristic::all()
            .filter(|c| c.is_even())
            .map(|c| c.index())
            .collect();
        assert_eq!(even, EVEN.to_vec());
        for k in 0..16 {
            assert_eq!(Characteristic::from_index(k).index(), k);
        }
        assert_eq!(Characteristic::from_index(15).a, [1, 1]);
        assert_eq!(Characteristic::from_index(9).to_string(), "[01;10]");
    }
}
