/// Values on a uniform grid x0 + i·h with 4-point Lagrange interpolation.
#[derive(Clone, Debug)]
pub struct UniformTable {
    pub x0: f64,
    pub h: f64,
    pub values: Vec<f64>,
}

impl UniformTable {
    pub fn tabulate<F: Fn(f64) -> f64>(x0: f64, h: f64, n: usize, f: F) -> Self {
        let values = (0..n).map(|i| f(x0 + i as f64 * h)).collect();
        Self { x0, h, values }
    }

    pub fn x_max(&self) -> f64 {
        self.x0 + (self.values.len() - 1) as f64 * self.h
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.x0 && x <= self.x_max()
    }

    /// Cubic interpolation; clamps the stencil at both ends of the table.
    pub fn eval(&self, x: f64) -> f64 {
        let n = self.values.len();
        let s = (x - self.x0) / self.h;
        let i = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
        let t = s - i as f64;
        let y = &self.values[i..i + 4];
        // Lagrange basis on nodes 0, 1, 2, 3.
        let l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
        let l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
        let l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
        let l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
        y[0] * l0 + y[1] * l1 + y[2] * l2 + y[3] * l3
    }
}
