//! Constant-curvature geometry kernel.
//!
//! The three simply-connected surfaces of curvature K in {-1, 0, +1} are
//! handled through their warped-product metric about a fixed pole,
//! `g = dr^2 + h(r)^2 dtheta^2`, with warp factor `h = sinh r`, `r`, `sin r`.
//! Everything here is a pure function of immutable inputs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::{flt, to_f64, Real};
use crate::tolerances::ANTIPODE_GUARD;

/// Curvature selector for the three model geometries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SpaceForm {
    /// K = -1, warp factor sinh r.
    Hyperbolic,
    /// K = 0, warp factor r.
    Flat,
    /// K = +1, warp factor sin r; the pole's antipode (r = pi) is excluded.
    Sphere,
}

impl SpaceForm {
    /// Build from an integer curvature, rejecting anything outside {-1, 0, +1}.
    pub fn from_curvature(k: i64) -> Result<Self> {
        match k {
            -1 => Ok(SpaceForm::Hyperbolic),
            0 => Ok(SpaceForm::Flat),
            1 => Ok(SpaceForm::Sphere),
            other => Err(Error::InvalidCurvature(other)),
        }
    }

    /// The sectional curvature K as an integer.
    pub fn curvature_int(&self) -> i64 {
        match self {
            SpaceForm::Hyperbolic => -1,
            SpaceForm::Flat => 0,
            SpaceForm::Sphere => 1,
        }
    }

    /// The sectional curvature K as a scalar.
    pub fn curvature<T: Real>(&self) -> T {
        flt(self.curvature_int() as f64)
    }

    /// Largest admissible radius about the pole (antipode exclusion on the
    /// sphere, unbounded otherwise).
    pub fn max_radius<T: Real>(&self) -> T {
        match self {
            SpaceForm::Sphere => T::PI() - flt(ANTIPODE_GUARD),
            _ => T::infinity(),
        }
    }

    fn check_radius<T: Real>(&self, r: T) -> Result<()> {
        if !(r >= T::zero()) {
            return Err(Error::InvalidInput(format!(
                "radius must be nonnegative, got {r}"
            )));
        }
        if *self == SpaceForm::Sphere && r >= self.max_radius() {
            return Err(Error::InvalidInput(format!(
                "radius {r} too close to the antipode (must stay below pi)"
            )));
        }
        Ok(())
    }
}

/// Geodesic polar coordinates about the designated pole.
///
/// `r` is the geodesic distance from the pole; `theta` the angular
/// coordinate. Mesh construction keeps `theta` monotone across rays, so the
/// stored angle is not reduced modulo 2 pi; all metric computations wrap the
/// angular difference into (-pi, pi].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarPoint<T> {
    pub r: T,
    pub theta: T,
}

impl<T: Real> PolarPoint<T> {
    /// Validated constructor; normalizes the angle into [0, 2 pi).
    pub fn new(sf: SpaceForm, r: T, theta: T) -> Result<Self> {
        sf.check_radius(r)?;
        Ok(PolarPoint {
            r,
            theta: normalize_angle(theta),
        })
    }

    /// Constructor that keeps the angle exactly as given. Used by the mesh
    /// builder, whose rays carry monotone unnormalized angles.
    pub fn raw(r: T, theta: T) -> Self {
        PolarPoint { r, theta }
    }
}

/// Normalize an angle into [0, 2 pi).
pub fn normalize_angle<T: Real>(theta: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut t = theta % two_pi;
    if t < T::zero() {
        t = t + two_pi;
    }
    // The remainder of a value just below a multiple of 2 pi can round to 2 pi.
    if t >= two_pi {
        t = t - two_pi;
    }
    t
}

/// Wrapped angular difference in (-pi, pi].
pub fn wrap_angle_diff<T: Real>(a: T, b: T) -> T {
    let two_pi = T::PI() + T::PI();
    let mut d = (a - b) % two_pi;
    if d > T::PI() {
        d = d - two_pi;
    }
    if d <= -T::PI() {
        d = d + two_pi;
    }
    d
}

/// Warp factor h(r): `r`, `sin r`, or `sinh r`.
pub fn warp<T: Real>(sf: SpaceForm, r: T) -> Result<T> {
    sf.check_radius(r)?;
    Ok(match sf {
        SpaceForm::Flat => r,
        SpaceForm::Sphere => r.sin(),
        SpaceForm::Hyperbolic => r.sinh(),
    })
}

/// Derivative h'(r): `1`, `cos r`, or `cosh r`.
pub fn warp_prime<T: Real>(sf: SpaceForm, r: T) -> Result<T> {
    sf.check_radius(r)?;
    Ok(match sf {
        SpaceForm::Flat => T::one(),
        SpaceForm::Sphere => r.cos(),
        SpaceForm::Hyperbolic => r.cosh(),
    })
}

/// Radial weight f(r) entering the boundary eigenvalue identity, together
/// with its derivative: (-r^2/2, -r), (cos r, -sin r), (cosh r, sinh r).
/// f satisfies Hess f = -K f g; along a radius that is f'' = -K f.
pub fn rellich_weight<T: Real>(sf: SpaceForm, r: T) -> Result<(T, T)> {
    sf.check_radius(r)?;
    Ok(match sf {
        SpaceForm::Flat => (-r * r / flt(2.0), -r),
        SpaceForm::Sphere => (r.cos(), -r.sin()),
        SpaceForm::Hyperbolic => (r.cosh(), r.sinh()),
    })
}

/// Geodesic distance between two polar points about a common pole.
///
/// Law of cosines in each geometry:
///   K =  0: d^2    = r1^2 + r2^2 - 2 r1 r2 cos(dtheta)
///   K = +1: cos d  = cos r1 cos r2 + sin r1 sin r2 cos(dtheta)
///   K = -1: cosh d = cosh r1 cosh r2 - sinh r1 sinh r2 cos(dtheta)
/// evaluated in difference form so nearly-coincident points keep full
/// precision. Symmetric in its arguments, and d(a, a) = 0.
pub fn geodesic_distance<T: Real>(sf: SpaceForm, a: PolarPoint<T>, b: PolarPoint<T>) -> Result<T> {
    sf.check_radius(a.r)?;
    sf.check_radius(b.r)?;
    let dtheta = wrap_angle_diff(a.theta, b.theta);
    if dtheta == T::zero() {
        return Ok((a.r - b.r).abs());
    }
    let half = flt::<T>(0.5);
    let sin_half_dt = (dtheta * half).sin();
    let cross = flt::<T>(2.0) * sin_half_dt * sin_half_dt; // 1 - cos(dtheta)
    match sf {
        SpaceForm::Flat => {
            let dr = a.r - b.r;
            Ok((dr * dr + a.r * b.r * flt(2.0) * cross).sqrt())
        }
        SpaceForm::Sphere => {
            // haversine form: sin^2(d/2) = sin^2(dr/2) + sin r1 sin r2 sin^2(dt/2)
            let sdr = ((a.r - b.r) * half).sin();
            let s = sdr * sdr + a.r.sin() * b.r.sin() * sin_half_dt * sin_half_dt;
            let s = s.max(T::zero()).sqrt().min(T::one());
            Ok(flt::<T>(2.0) * s.asin())
        }
        SpaceForm::Hyperbolic => {
            // cosh d - 1 = (cosh dr - 1) + sinh r1 sinh r2 (1 - cos dtheta)
            let dr = a.r - b.r;
            let shdr = (dr * half).sinh();
            let x = flt::<T>(2.0) * shdr * shdr + a.r.sinh() * b.r.sinh() * cross;
            // acosh(1 + x) = ln(1 + x + sqrt(x (x + 2)))
            Ok((x + (x * (x + flt(2.0))).sqrt()).ln_1p())
        }
    }
}

/// Debug-friendly conversion used by error paths.
pub(crate) fn angle_f64<T: Real>(theta: T) -> f64 {
    to_f64(theta)
}
