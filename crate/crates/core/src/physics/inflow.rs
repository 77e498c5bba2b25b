use crate::tensor::Vec3;

/// The two benchmark configurations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Benchmark {
    Fsi2,
    Box3d,
}

impl Benchmark {
    pub fn name(self) -> &'static str {
        match self {
            Benchmark::Fsi2 => "fsi2",
            Benchmark::Box3d => "box3d",
        }
    }

    pub fn dim(self) -> usize {
        match self {
            Benchmark::Fsi2 => 2,
            Benchmark::Box3d => 3,
        }
    }

    pub fn channel_height(self) -> f64 {
        match self {
            Benchmark::Fsi2 => crate::mesh::Fsi2Geometry::HEIGHT,
            Benchmark::Box3d => crate::mesh::Box3dGeometry::HEIGHT,
        }
    }

    pub fn default_mean_velocity(self) -> f64 {
        match self {
            Benchmark::Fsi2 => 1.0,
            Benchmark::Box3d => 3.0,
        }
    }
}

/// Start-up ramp: `½(1 − cos(πt/2))` for `t < 2`, then 1.
pub fn smoothing(t: f64) -> f64 {
    if t < 2.0 {
        0.5 * (1.0 - (std::f64::consts::PI * t / 2.0).cos())
    } else {
        1.0
    }
}

/// Inflow velocity at `x` and time `t` with mean velocity `v_mean`.
pub fn inflow_profile(t: f64, x: &Vec3, benchmark: Benchmark, v_mean: f64) -> Vec3 {
    let h = benchmark.channel_height();
    let y = x[1];
    let shape = match benchmark {
        Benchmark::Fsi2 => 6.0 * y * (h - y) / (h * h),
        Benchmark::Box3d => {
            let z = x[2];
            81.0 / 16.0 * y * (h - y) * (h * h - z * z) / h.powi(4)
        }
    };
    [shape * smoothing(t) * v_mean, 0.0, 0.0]
}
