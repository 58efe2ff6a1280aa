use std::collections::BTreeMap;

use chrono::{DateTime, FixedOffset};
use serde::{Deserialize, Serialize};

use super::{DomainError, ItemId, ReservationNumber};

/// A 1–5 star Likert answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "i64", into = "u8")]
pub struct Stars(u8);

impl Stars {
    pub fn new(value: i64) -> Result<Self, DomainError> {
        if (1..=5).contains(&value) {
            Ok(Self(value as u8))
        } else {
            Err(DomainError::InvalidStars(value))
        }
    }

    pub fn get(self) -> u8 {
        self.0
    }
}

impl TryFrom<i64> for Stars {
    type Error = DomainError;

    fn try_from(value: i64) -> Result<Self, Self::Error> {
        Self::new(value)
    }
}

impl From<Stars> for u8 {
    fn from(value: Stars) -> Self {
        value.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rating {
    #[serde(rename = "reservationNumber")]
    pub reservation: ReservationNumber,
    pub item: ItemId,
    pub stars: Stars,
    pub at: DateTime<FixedOffset>,
}

/// Sparse guest × item star matrix. Missing cells are unrated.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RatingsMatrix {
    rows: Vec<ReservationNumber>,
    cols: Vec<ItemId>,
    cells: Vec<Option<u8>>,
}

impl RatingsMatrix {
    /// Builds the matrix with rows and columns in ascending label order.
    /// Duplicate (reservation, item) pairs keep the latest rating; on equal
    /// timestamps the one later in `ratings` wins.
    pub fn from_ratings(ratings: &[Rating]) -> Self {
        let mut latest: BTreeMap<(&ReservationNumber, &ItemId), &Rating> = BTreeMap::new();
        for rating in ratings {
            let key = (&rating.reservation, &rating.item);
            match latest.get(&key) {
                Some(existing) if existing.at > rating.at => {}
                _ => {
                    latest.insert(key, rating);
                }
            }
        }

        let mut rows: Vec<ReservationNumber> =
            latest.keys().map(|(r, _)| (*r).clone()).collect();
        rows.dedup();
        let mut cols: Vec<ItemId> = latest.keys().map(|(_, i)| (*i).clone()).collect();
        cols.sort();
        cols.dedup();

        let mut matrix = Self {
            cells: vec![None; rows.len() * cols.len()],
            rows,
            cols,
        };
        for ((reservation, item), rating) in latest {
            let r = matrix.row_index(reservation).expect("row exists");
            let c = matrix.col_index(item).expect("col exists");
            matrix.cells[r * matrix.cols.len() + c] = Some(rating.stars.get());
        }
        matrix
    }

    /// Builds a matrix from explicit labels and row-major cells.
    pub fn from_cells(
        rows: Vec<ReservationNumber>,
        cols: Vec<ItemId>,
        cells: Vec<Vec<Option<u8>>>,
    ) -> Result<Self, DomainError> {
        if cells.len() != rows.len() || cells.iter().any(|row| row.len() != cols.len()) {
            return Err(DomainError::Malformed("cell grid does not match labels".into()));
        }
        let mut sorted_rows = rows.clone();
        sorted_rows.sort();
        if sorted_rows.windows(2).any(|w| w[0] == w[1]) {
            return Err(DomainError::Malformed("duplicate row label".into()));
        }
        let mut sorted_cols = cols.clone();
        sorted_cols.sort();
        if sorted_cols.windows(2).any(|w| w[0] == w[1]) {
            return Err(DomainError::Malformed("duplicate column label".into()));
        }
        let mut flat = Vec::with_capacity(rows.len() * cols.len());
        for cell in cells.into_iter().flatten() {
            if let Some(stars) = cell {
                Stars::new(i64::from(stars))?;
            }
            flat.push(cell);
        }
        Ok(Self {
            rows,
            cols,
            cells: flat,
        })
    }

    pub fn rows(&self) -> &[ReservationNumber] {
        &self.rows
    }

    pub fn cols(&self) -> &[ItemId] {
        &self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty() || self.cols.is_empty()
    }

    pub fn row_index(&self, reservation: &ReservationNumber) -> Option<usize> {
        self.rows.iter().position(|r| r == reservation)
    }

    pub fn col_index(&self, item: &ItemId) -> Option<usize> {
        self.cols.iter().position(|c| c == item)
    }

    pub fn cell(&self, row: usize, col: usize) -> Option<u8> {
        self.cells[row * self.cols.len() + col]
    }

    pub fn get(&self, reservation: &ReservationNumber, item: &ItemId) -> Option<u8> {
        self.cell(self.row_index(reservation)?, self.col_index(item)?)
    }

    /// Row-major cells as reals, for the similarity and prediction code.
    pub fn dense(&self) -> Vec<Vec<Option<f64>>> {
        self.cells
            .chunks(self.cols.len().max(1))
            .take(self.rows.len())
            .map(|row| row.iter().map(|c| c.map(f64::from)).collect())
            .collect()
    }

    /// Number of present cells.
    pub fn rated_count(&self) -> usize {
        self.cells.iter().filter(|c| c.is_some()).count()
    }

    /// `(item, stars)` for every item the guest rated.
    pub fn rated_by(&self, reservation: &ReservationNumber) -> Vec<(&ItemId, u8)> {
        let Some(r) = self.row_index(reservation) else {
            return Vec::new();
        };
        self.cols
            .iter()
            .enumerate()
            .filter_map(|(c, item)| self.cell(r, c).map(|s| (item, s)))
            .collect()
    }
}
