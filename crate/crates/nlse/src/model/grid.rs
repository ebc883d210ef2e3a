use crate::{NlseError, Result};

/// Boundary treatment of the truncated computational domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundaryKind {
    Dirichlet,
    Neumann,
    Periodic,
}

impl BoundaryKind {
    pub fn parse(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dirichlet" => Ok(Self::Dirichlet),
            "neumann" => Ok(Self::Neumann),
            "periodic" => Ok(Self::Periodic),
            other => Err(NlseError::InvalidParameter(format!(
                "unknown boundary condition '{other}'"
            ))),
        }
    }
}

/// One axis of a uniform tensor-product mesh on `[a, b]` with `J` cells.
#[derive(Debug, Clone)]
pub struct Axis {
    pub a: f64,
    pub b: f64,
    pub j: usize,
    pub bc: BoundaryKind,
    pub h: f64,
    nodes: Vec<f64>,
}

impl Axis {
    pub fn new(a: f64, b: f64, j: usize, bc: BoundaryKind) -> Result<Self> {
        if !(b > a) {
            return Err(NlseError::InvalidGrid(format!(
                "need b > a, got a={a}, b={b}"
            )));
        }
        if j % 2 != 0 || j < 4 {
            return Err(NlseError::InvalidGrid(format!(
                "J must be even and >= 4, got J={j}"
            )));
        }
        let h = (b - a) / j as f64;
        let n = match bc {
            BoundaryKind::Periodic => j,
            _ => j + 1,
        };
        let mut nodes = Vec::with_capacity(n);
        for k in 0..n {
            nodes.push(a + k as f64 * h);
        }
        // x_0 = a and x_J = b exactly
        nodes[0] = a;
        if bc != BoundaryKind::Periodic {
            nodes[j] = b;
        }
        Ok(Self { a, b, j, bc, h, nodes })
    }

    /// Number of stored nodes (J+1 for Dirichlet/Neumann, J for periodic).
    pub fn num_nodes(&self) -> usize {
        self.nodes.len()
    }

    pub fn node(&self, k: usize) -> f64 {
        self.nodes[k]
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    /// Wavenumbers of the spectral basis matching the boundary condition,
    /// indexed like the transform coefficients.
    ///
    /// Sine (Dirichlet): mu_l = pi l / (b-a), l = 1..J-1.
    /// Cosine (Neumann): mu_l = pi l / (b-a), l = 0..J.
    /// Fourier (periodic): mu_l = 2 pi s / (b-a), with s the signed mode
    /// index for slot l (s = l for l < J/2, s = l - J otherwise).
    pub fn wavenumbers(&self) -> Vec<f64> {
        let len = self.b - self.a;
        match self.bc {
            BoundaryKind::Dirichlet => (1..self.j)
                .map(|l| std::f64::consts::PI * l as f64 / len)
                .collect(),
            BoundaryKind::Neumann => (0..=self.j)
                .map(|l| std::f64::consts::PI * l as f64 / len)
                .collect(),
            BoundaryKind::Periodic => (0..self.j)
                .map(|l| {
                    let s = if l < self.j / 2 {
                        l as f64
                    } else {
                        l as f64 - self.j as f64
                    };
                    2.0 * std::f64::consts::PI * s / len
                })
                .collect(),
        }
    }
}

/// Uniform 1D/2D spatial mesh; 2D grids are strict tensor products with
/// independent per-axis extents and boundary conditions.
#[derive(Debug, Clone)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    /// Build a 1D grid. Rejects odd `J` and `b <= a`.
    pub fn build_1d(a: f64, b: f64, j: usize, bc: BoundaryKind) -> Result<Self> {
        Ok(Self { axes: vec![Axis::new(a, b, j, bc)?] })
    }

    pub fn build_2d(x: (f64, f64, usize, BoundaryKind), y: (f64, f64, usize, BoundaryKind)) -> Result<Self> {
        Ok(Self {
            axes: vec![
                Axis::new(x.0, x.1, x.2, x.3)?,
                Axis::new(y.0, y.1, y.2, y.3)?,
            ],
        })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    /// Total node count (product over axes).
    pub fn num_nodes(&self) -> usize {
        self.axes.iter().map(Axis::num_nodes).product()
    }

    /// Cell volume h (1D) or hx*hy (2D).
    pub fn cell_volume(&self) -> f64 {
        self.axes.iter().map(|ax| ax.h).product()
    }

    /// Coordinates of the flat node index (row-major, x slowest).
    pub fn node_coords(&self, flat: usize) -> Vec<f64> {
        match self.axes.len() {
            1 => vec![self.axes[0].node(flat)],
            2 => {
                let ny = self.axes[1].num_nodes();
                vec![self.axes[0].node(flat / ny), self.axes[1].node(flat % ny)]
            }
            _ => unreachable!("only 1D/2D grids are supported"),
        }
    }

    pub fn same_mesh(&self, other: &Grid) -> bool {
        self.dim() == other.dim()
            && self.axes.iter().zip(other.axes.iter()).all(|(p, q)| {
                p.a == q.a && p.b == q.b && p.j == q.j && p.bc == q.bc
            })
    }
}
