use rand::seq::SliceRandom;
use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use super::{check_dim, is_enumerable_size, Capabilities, EnergyModel, BINARY};
use crate::error::{Error, Result};
use crate::state::DiscreteState;

/// Tour energy `U(θ) = −Σ_i w(r_i, r_{i+1}) · ‖c_{r_i} − c_{r_{i+1}}‖`
/// (closing edge included) over the route decoded from the bits of `θ`.
///
/// Each visit position holds `bits_per_city` bits, big-endian, so
/// `dim = n · bits_per_city`. A state is feasible only if the decoded
/// indices form a permutation of `0..n`.
#[derive(Clone, Debug)]
pub struct TspModel {
    coords: Vec<[f64; 2]>,
    weights: Vec<Vec<f64>>,
    bits_per_city: usize,
}

/// On-disk form. `weights` defaults to all ones and `bits_per_city` to the
/// minimum needed.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TspFile {
    pub coords: Vec<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits_per_city: Option<usize>,
}

fn min_bits(n: usize) -> usize {
    let mut bits = 1;
    while (1usize << bits) < n {
        bits += 1;
    }
    bits
}

impl TspModel {
    pub fn new(
        coords: Vec<[f64; 2]>,
        weights: Option<Vec<Vec<f64>>>,
        bits_per_city: Option<usize>,
    ) -> Result<Self> {
        let n = coords.len();
        if n < 2 {
            return Err(Error::Config("a tour needs at least two cities".into()));
        }
        if coords.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Config("city coordinates must be finite".into()));
        }
        let weights = weights.unwrap_or_else(|| vec![vec![1.0; n]; n]);
        if weights.len() != n || weights.iter().any(|row| row.len() != n) {
            return Err(Error::Config(format!("weight matrix must be {n}×{n}")));
        }
        if weights.iter().enumerate().any(|(i, row)| {
            row.iter()
                .enumerate()
                .any(|(j, w)| i != j && !(w.is_finite() && *w >= 0.0))
        }) {
            return Err(Error::Config(
                "weights must be finite and nonnegative".into(),
            ));
        }
        let need = min_bits(n);
        let bits_per_city = bits_per_city.unwrap_or(need);
        if bits_per_city < need || bits_per_city > 16 {
            return Err(Error::Config(format!(
                "bits_per_city must be in {need}..=16 for {n} cities"
            )));
        }
        Ok(Self {
            coords,
            weights,
            bits_per_city,
        })
    }

    /// Cities uniform on the unit square, unit weights.
    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        let coords = (0..n).map(|_| [rng.random(), rng.random()]).collect();
        Self::new(coords, None, None).expect("random instance is valid")
    }

    pub fn from_file(file: &TspFile) -> Result<Self> {
        Self::new(
            file.coords.clone(),
            file.weights.clone(),
            file.bits_per_city,
        )
    }

    pub fn to_file(&self) -> TspFile {
        let unit = self.weights.iter().flatten().all(|&w| w == 1.0);
        TspFile {
            coords: self.coords.clone(),
            weights: (!unit).then(|| self.weights.clone()),
            bits_per_city: Some(self.bits_per_city),
        }
    }

    pub fn n_cities(&self) -> usize {
        self.coords.len()
    }

    pub fn bits_per_city(&self) -> usize {
        self.bits_per_city
    }

    /// Reads each visit slot as an unsigned big-endian integer; `None` unless
    /// the result is a permutation of `0..n`.
    pub fn decode_route(&self, theta: &[f64]) -> Option<Vec<usize>> {
        let n = self.n_cities();
        if theta.len() != n * self.bits_per_city {
            return None;
        }
        let mut seen = vec![false; n];
        let mut route = Vec::with_capacity(n);
        for group in theta.chunks(self.bits_per_city) {
            let mut city = 0usize;
            for &bit in group {
                city = (city << 1)
                    | match bit {
                        b if b == 0.0 => 0,
                        b if b == 1.0 => 1,
                        _ => return None,
                    };
            }
            if city >= n || seen[city] {
                return None;
            }
            seen[city] = true;
            route.push(city);
        }
        Some(route)
    }

    pub fn encode_route(&self, route: &[usize]) -> DiscreteState {
        let mut bits = Vec::with_capacity(route.len() * self.bits_per_city);
        for &city in route {
            for b in (0..self.bits_per_city).rev() {
                bits.push(((city >> b) & 1) as f64);
            }
        }
        DiscreteState(bits)
    }

    /// Weighted closed-tour length.
    pub fn route_cost(&self, route: &[usize]) -> f64 {
        let n = route.len();
        (0..n)
            .map(|k| {
                let (from, to) = (route[k], route[(k + 1) % n]);
                let [x0, y0] = self.coords[from];
                let [x1, y1] = self.coords[to];
                self.weights[from][to] * (x1 - x0).hypot(y1 - y0)
            })
            .sum()
    }
}

impl EnergyModel for TspModel {
    fn dim(&self) -> usize {
        self.n_cities() * self.bits_per_city
    }

    fn domain(&self, _i: usize) -> &[f64] {
        &BINARY
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            has_gradient: false,
            enumerable: is_enumerable_size(self),
            has_validity: true,
        }
    }

    fn energy(&self, x: &[f64]) -> Result<f64> {
        check_dim(self.dim(), x)?;
        if x.iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::Capability(
                "tour energy is defined on binary states only".into(),
            ));
        }
        match self.decode_route(x) {
            Some(route) => Ok(-self.route_cost(&route)),
            None => Err(Error::InvalidState("bits do not decode to a tour".into())),
        }
    }

    fn is_valid(&self, theta: &[f64]) -> bool {
        self.decode_route(theta).is_some()
    }

    fn random_state(&self, rng: &mut dyn RngCore) -> DiscreteState {
        let mut route: Vec<usize> = (0..self.n_cities()).collect();
        route.shuffle(rng);
        self.encode_route(&route)
    }
}
