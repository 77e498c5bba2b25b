use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaVariant {
    Implicit,
    CrankNicolson,
    /// `θ = 0.5 + Δt`.
    ShiftedCrankNicolson,
    Custom(f64),
}

impl ThetaVariant {
    pub fn name(&self) -> String {
        match self {
            ThetaVariant::Implicit => "implicit".into(),
            ThetaVariant::CrankNicolson => "cn".into(),
            ThetaVariant::ShiftedCrankNicolson => "shifted_cn".into(),
            ThetaVariant::Custom(t) => format!("{t}"),
        }
    }
}

/// Step size and θ of the one-step-θ scheme.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaScheme {
    variant: ThetaVariant,
    dt: f64,
}

impl ThetaScheme {
    pub fn new(variant: ThetaVariant, dt: f64) -> Result<Self> {
        if !(dt > 0.0) {
            return Err(Error::Config(format!("time step must be positive, got {dt}")));
        }
        let s = ThetaScheme { variant, dt };
        let th = s.theta();
        if !(0.0..=1.0).contains(&th) {
            return Err(Error::Config(format!("theta must lie in [0, 1], got {th}")));
        }
        Ok(s)
    }

    pub fn variant(&self) -> ThetaVariant {
        self.variant
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn theta(&self) -> f64 {
        match self.variant {
            ThetaVariant::Implicit => 1.0,
            ThetaVariant::CrankNicolson => 0.5,
            ThetaVariant::ShiftedCrankNicolson => 0.5 + self.dt,
            ThetaVariant::Custom(t) => t,
        }
    }

    /// Same variant with a new step size; the shifted variant recomputes θ.
    pub fn with_dt(&self, dt: f64) -> Result<Self> {
        ThetaScheme::new(self.variant, dt)
    }

    pub fn step_params(&self) -> crate::physics::StepParams {
        crate::physics::StepParams {
            dt: self.dt,
            theta: self.theta(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shifted_theta_follows_dt() {
        let s = ThetaScheme::new(ThetaVariant::ShiftedCrankNicolson, 0.005).unwrap();
        assert_eq!(s.theta(), 0.505);
        assert_eq!(s.with_dt(0.01).unwrap().theta(), 0.51);
    }

    #[test]
    fn rejects_bad_values() {
        assert!(ThetaScheme::new(ThetaVariant::Implicit, 0.0).is_err());
        assert!(ThetaScheme::new(ThetaVariant::Custom(1.5), 0.1).is_err());
        assert!(ThetaScheme::new(ThetaVariant::ShiftedCrankNicolson, 0.7).is_err());
    }
}
