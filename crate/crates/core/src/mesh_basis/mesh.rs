use crate::error::{Error, Result};

/// Partition of `(x_left, x_right)` into elements `I_i = (x_{i-1}, x_i)`.
///
/// The outward normal is `-1` at the left node of an element and `+1` at its
/// right node. For periodic meshes the nodes `x_0` and `x_N` are identified.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    x_left: f64,
    x_right: f64,
    nodes: Vec<f64>,
    element_sizes: Vec<f64>,
    periodic: bool,
}

/// Uniform mesh with `n_elements` elements.
pub fn build_mesh(x_left: f64, x_right: f64, n_elements: usize, periodic: bool) -> Result<Mesh> {
    if n_elements < 2 {
        return Err(Error::config(
            "mesh.elements",
            format!("need at least 2 elements, got {n_elements}"),
        ));
    }
    if !(x_left < x_right) || !x_left.is_finite() || !x_right.is_finite() {
        return Err(Error::config(
            "mesh.domain",
            format!("invalid interval ({x_left}, {x_right})"),
        ));
    }
    let len = x_right - x_left;
    let mut nodes: Vec<f64> = (0..=n_elements)
        .map(|i| x_left + len * i as f64 / n_elements as f64)
        .collect();
    nodes[n_elements] = x_right;
    Mesh::from_nodes(nodes, periodic)
}

impl Mesh {
    /// Mesh from an explicit, strictly increasing node list.
    pub fn from_nodes(nodes: Vec<f64>, periodic: bool) -> Result<Mesh> {
        if nodes.len() < 3 {
            return Err(Error::config(
                "mesh.nodes",
                "need at least 3 nodes (2 elements)",
            ));
        }
        if nodes.iter().any(|x| !x.is_finite()) {
            return Err(Error::config("mesh.nodes", "non-finite node coordinate"));
        }
        let element_sizes: Vec<f64> = nodes.windows(2).map(|w| w[1] - w[0]).collect();
        if let Some(i) = element_sizes.iter().position(|&s| !(s > 0.0)) {
            return Err(Error::config(
                "mesh.nodes",
                format!("nodes not strictly increasing at element {i}"),
            ));
        }
        Ok(Mesh {
            x_left: nodes[0],
            x_right: nodes[nodes.len() - 1],
            nodes,
            element_sizes,
            periodic,
        })
    }

    pub fn x_left(&self) -> f64 {
        self.x_left
    }

    pub fn x_right(&self) -> f64 {
        self.x_right
    }

    pub fn length(&self) -> f64 {
        self.x_right - self.x_left
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn element_sizes(&self) -> &[f64] {
        &self.element_sizes
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn n_elements(&self) -> usize {
        self.element_sizes.len()
    }

    /// Largest element size.
    pub fn h(&self) -> f64 {
        self.element_sizes.iter().copied().fold(0.0, f64::max)
    }

    /// Physical coordinate of reference point `xi` in element `elem`.
    #[inline]
    pub fn map_to_physical(&self, elem: usize, xi: f64) -> f64 {
        let a = self.nodes[elem];
        let b = self.nodes[elem + 1];
        0.5 * (a + b) + 0.5 * (b - a) * xi
    }

    /// Element containing `x` and the reference coordinate of `x` inside it.
    /// Periodic meshes wrap `x` into the domain first; otherwise `x` is clamped.
    pub fn locate(&self, x: f64) -> (usize, f64) {
        let mut x = x;
        if self.periodic {
            let len = self.length();
            x = self.x_left + (x - self.x_left).rem_euclid(len);
        }
        x = x.clamp(self.x_left, self.x_right);
        let n = self.n_elements();
        // first node strictly greater than x
        let idx = self.nodes.partition_point(|&node| node <= x);
        let elem = idx.saturating_sub(1).min(n - 1);
        let a = self.nodes[elem];
        let b = self.nodes[elem + 1];
        let xi = (2.0 * (x - a) / (b - a) - 1.0).clamp(-1.0, 1.0);
        (elem, xi)
    }
}
