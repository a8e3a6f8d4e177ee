//! Parametric antenna patterns, polarization mismatch, free-space path loss
//! and a simple link-margin composition.
//!
//! Patterns are reconstructed from a (boresight gain, HPBW) pair only. The
//! directional model is a cosine-power main lobe whose exponent is chosen so
//! the gain is exactly 3 dB down at half the HPBW; the back hemisphere is
//! floored at [`BACK_LOBE_FLOOR_DB`] below boresight.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

use crate::error::DomainError;
use crate::quantities::{Decibel, Frequency};

/// Depth of the back-lobe floor relative to boresight gain.
pub const BACK_LOBE_FLOOR_DB: f64 = 40.0;
/// Upper bound on the reported polarization mismatch loss.
pub const CROSS_POL_CAP_DB: f64 = 40.0;
/// Axial ratio below which a pattern counts as circularly polarized.
pub const CIRCULAR_AR_LIMIT_DB: f64 = 3.0;
/// Half-power level in dB. Defined as exactly −3 dB, not 10·log10(0.5).
const HALF_POWER_DB: f64 = -3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PatternShape {
    /// `G(θ) = G0 + 10·n·log10(cos θ)` in the front hemisphere.
    CosPower,
    /// Constant gain at every angle.
    Omni,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AntennaPattern {
    pub boresight_gain: Decibel,
    /// Half-power beamwidth in degrees. Ignored by [`PatternShape::Omni`].
    pub hpbw_deg: f64,
    /// `f64::INFINITY` marks a purely linear antenna.
    pub axial_ratio_db: Decibel,
    pub valid_band: (Frequency, Frequency),
    pub shape: PatternShape,
}

impl AntennaPattern {
    pub fn validate(&self) -> Result<(), DomainError> {
        if self.shape == PatternShape::CosPower && !(self.hpbw_deg > 0.0 && self.hpbw_deg < 180.0) {
            return Err(DomainError::invalid(
                "hpbw_deg",
                format!("cos-power pattern needs HPBW in (0°, 180°), got {}", self.hpbw_deg),
            ));
        }
        if !(self.hpbw_deg > 0.0 && self.hpbw_deg < 360.0) {
            return Err(DomainError::invalid("hpbw_deg", format!("must be in (0°, 360°), got {}", self.hpbw_deg)));
        }
        if !(self.axial_ratio_db.0 >= 0.0) {
            return Err(DomainError::invalid("axial_ratio_db", "must be >= 0 dB"));
        }
        if self.valid_band.0 > self.valid_band.1 {
            return Err(DomainError::invalid("valid_band", "lower edge above upper edge"));
        }
        Ok(())
    }

    /// Cosine exponent `n` such that the gain at `hpbw/2` is exactly 3 dB down.
    pub fn cos_power_exponent(&self) -> f64 {
        let half = (self.hpbw_deg / 2.0).to_radians();
        HALF_POWER_DB / (10.0 * half.cos().log10())
    }

    pub fn is_linear(&self) -> bool {
        self.axial_ratio_db.0.is_infinite()
    }
}

/// Named antenna presets selectable from the CLI and config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AntennaPreset {
    /// S-band patch as built and measured: 4.13 dB, 104° HPBW at 2.43 GHz,
    /// AR < 3 dB over 2.42–2.49 GHz.
    PatchMeasured,
    /// S-band patch as simulated: 4.5 dB, 95° HPBW, AR < 3 dB over 2.40–2.45 GHz.
    PatchSimulated,
    /// UHF turnstile. Placeholder values (2 dB omni, circular); the measured
    /// turnstile pattern is not available to this tool.
    TurnstileIdeal,
    /// Linear UHF dipole (omni, 2.15 dBi).
    DipoleLinear,
}

impl AntennaPreset {
    pub const ALL: [AntennaPreset; 4] = [
        AntennaPreset::PatchMeasured,
        AntennaPreset::PatchSimulated,
        AntennaPreset::TurnstileIdeal,
        AntennaPreset::DipoleLinear,
    ];

    pub fn name(self) -> &'static str {
        match self {
            AntennaPreset::PatchMeasured => "patch-measured",
            AntennaPreset::PatchSimulated => "patch-simulated",
            AntennaPreset::TurnstileIdeal => "turnstile-ideal",
            AntennaPreset::DipoleLinear => "dipole-linear",
        }
    }

    /// Frequency the preset is characterised at.
    pub fn nominal_frequency(self) -> Frequency {
        let mhz = match self {
            AntennaPreset::PatchMeasured | AntennaPreset::PatchSimulated => 2430.0,
            AntennaPreset::TurnstileIdeal | AntennaPreset::DipoleLinear => 436.5,
        };
        Frequency::mhz(mhz).expect("positive literal")
    }

    pub fn pattern(self) -> AntennaPattern {
        let band = |lo: f64, hi: f64| (Frequency::mhz(lo).unwrap(), Frequency::mhz(hi).unwrap());
        match self {
            AntennaPreset::PatchMeasured => AntennaPattern {
                boresight_gain: Decibel(4.13),
                hpbw_deg: 104.0,
                // measured only as "< 3 dB" across the band
                axial_ratio_db: Decibel(2.0),
                valid_band: band(2420.0, 2490.0),
                shape: PatternShape::CosPower,
            },
            AntennaPreset::PatchSimulated => AntennaPattern {
                boresight_gain: Decibel(4.5),
                hpbw_deg: 95.0,
                axial_ratio_db: Decibel(2.0),
                valid_band: band(2400.0, 2450.0),
                shape: PatternShape::CosPower,
            },
            AntennaPreset::TurnstileIdeal => AntennaPattern {
                boresight_gain: Decibel(2.0),
                hpbw_deg: 359.0,
                axial_ratio_db: Decibel(0.0),
                valid_band: band(435.0, 438.0),
                shape: PatternShape::Omni,
            },
            AntennaPreset::DipoleLinear => AntennaPattern {
                boresight_gain: Decibel(2.15),
                hpbw_deg: 359.0,
                axial_ratio_db: Decibel(f64::INFINITY),
                valid_band: band(430.0, 440.0),
                shape: PatternShape::Omni,
            },
        }
    }
}

impl fmt::Display for AntennaPreset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AntennaPreset {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        AntennaPreset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<_> = AntennaPreset::ALL.iter().map(|p| p.name()).collect();
            format!("unknown antenna preset `{s}` (expected one of: {})", names.join(", "))
        })
    }
}

fn check_angle(theta_deg: f64) -> Result<(), DomainError> {
    if !(0.0..=180.0).contains(&theta_deg) {
        return Err(DomainError::AngleOutOfRange(theta_deg));
    }
    Ok(())
}

/// Gain at `theta_deg` off boresight.
pub fn pattern_gain(p: &AntennaPattern, theta_deg: f64) -> Result<Decibel, DomainError> {
    check_angle(theta_deg)?;
    let g0 = p.boresight_gain.0;
    match p.shape {
        PatternShape::Omni => Ok(p.boresight_gain),
        PatternShape::CosPower => {
            let floor = g0 - BACK_LOBE_FLOOR_DB;
            if theta_deg >= 90.0 {
                return Ok(Decibel(floor));
            }
            if theta_deg == 0.0 {
                return Ok(p.boresight_gain);
            }
            let c = theta_deg.to_radians().cos();
            let g = g0 + 10.0 * p.cos_power_exponent() * c.log10();
            Ok(Decibel(g.max(floor)))
        }
    }
}

/// Recovers the HPBW by bisecting `G(θ) = G0 − 3 dB` on the pattern itself.
/// Returns `None` for patterns without a half-power point (omni).
pub fn measure_hpbw(p: &AntennaPattern) -> Option<f64> {
    let target = p.boresight_gain.0 + HALF_POWER_DB;
    let gain = |t: f64| pattern_gain(p, t).map(|g| g.0).unwrap_or(f64::NEG_INFINITY);
    let (mut lo, mut hi) = (0.0_f64, 90.0_f64);
    if gain(hi) > target || gain(lo) < target {
        return None;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if gain(mid) >= target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-12 {
            break;
        }
    }
    Some(lo + hi)
}

/// Free-space path loss `20·log10(d_km) + 20·log10(f_MHz) + 32.45`.
pub fn fspl_db(f: Frequency, distance_m: f64) -> Result<Decibel, DomainError> {
    if !(distance_m > 0.0) || !distance_m.is_finite() {
        return Err(DomainError::NonPositiveDistance(distance_m));
    }
    let d_km = distance_m / 1e3;
    Ok(Decibel(20.0 * d_km.log10() + 20.0 * f.as_mhz().log10() + 32.45))
}

/// Inverse axial ratio on a linear amplitude scale: 0 linear, 1 circular.
fn inverse_axial_ratio(ar: Decibel) -> f64 {
    if ar.0.is_infinite() {
        0.0
    } else {
        10f64.powf(-ar.0.abs() / 20.0)
    }
}

/// Mismatch loss between two elliptically polarized antennas of the same
/// rotation sense whose major axes are `tilt_deg` apart. Capped at
/// [`CROSS_POL_CAP_DB`].
pub fn polarization_loss_db(ar_tx: Decibel, ar_rx: Decibel, tilt_deg: f64) -> Decibel {
    let gt = inverse_axial_ratio(ar_tx);
    let gr = inverse_axial_ratio(ar_rx);
    let cos2t = (2.0 * tilt_deg.to_radians()).cos();
    let num = 4.0 * gt * gr + (1.0 - gt * gt) * (1.0 - gr * gr) * cos2t;
    let den = 2.0 * (1.0 + gt * gt) * (1.0 + gr * gr);
    let plf = 0.5 + num / den;
    if plf <= 10f64.powf(-CROSS_POL_CAP_DB / 10.0) {
        return Decibel(CROSS_POL_CAP_DB);
    }
    // plf can land a few ulps above 1 for matched antennas
    let loss = -10.0 * plf.log10();
    Decibel(if loss > 0.0 { loss.min(CROSS_POL_CAP_DB) } else { 0.0 })
}

/// True iff `f` lies in the pattern's valid band and its AR is below 3 dB.
pub fn axial_ratio_ok(p: &AntennaPattern, f: Frequency) -> bool {
    let (lo, hi) = p.valid_band;
    f >= lo && f <= hi && p.axial_ratio_db.0 < CIRCULAR_AR_LIMIT_DB
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkBudgetInput {
    pub frequency: Frequency,
    pub distance_m: f64,
    pub tx_power_dbw: Decibel,
    pub tx_pattern: AntennaPattern,
    pub tx_off_boresight_deg: f64,
    pub rx_pattern: AntennaPattern,
    pub rx_off_boresight_deg: f64,
    /// Angle between the two polarization-ellipse major axes.
    pub polarization_tilt_deg: f64,
    pub misc_losses_db: Decibel,
    pub required_cn_db: Decibel,
}

/// Every term of the margin computation, in dB.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LinkBreakdown {
    pub tx_power_dbw: f64,
    pub tx_gain_db: f64,
    pub rx_gain_db: f64,
    pub fspl_db: f64,
    pub polarization_loss_db: f64,
    pub misc_losses_db: f64,
    pub required_cn_db: f64,
    pub margin_db: f64,
}

pub fn link_breakdown(input: &LinkBudgetInput) -> Result<LinkBreakdown, DomainError> {
    if input.misc_losses_db.0 < 0.0 {
        return Err(DomainError::invalid("misc_losses_db", "must be >= 0 dB"));
    }
    input.tx_pattern.validate()?;
    input.rx_pattern.validate()?;
    let tx_gain = pattern_gain(&input.tx_pattern, input.tx_off_boresight_deg)?;
    let rx_gain = pattern_gain(&input.rx_pattern, input.rx_off_boresight_deg)?;
    let fspl = fspl_db(input.frequency, input.distance_m)?;
    let pol = polarization_loss_db(
        input.tx_pattern.axial_ratio_db,
        input.rx_pattern.axial_ratio_db,
        input.polarization_tilt_deg,
    );
    let margin = input.tx_power_dbw + tx_gain + rx_gain - fspl - pol - input.misc_losses_db - input.required_cn_db;
    Ok(LinkBreakdown {
        tx_power_dbw: input.tx_power_dbw.0,
        tx_gain_db: tx_gain.0,
        rx_gain_db: rx_gain.0,
        fspl_db: fspl.0,
        polarization_loss_db: pol.0,
        misc_losses_db: input.misc_losses_db.0,
        required_cn_db: input.required_cn_db.0,
        margin_db: margin.0,
    })
}

/// `P_tx + G_tx + G_rx − FSPL − L_pol − L_misc − (C/N)_req`.
pub fn link_margin_db(input: &LinkBudgetInput) -> Result<Decibel, DomainError> {
    link_breakdown(input).map(|b| Decibel(b.margin_db))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn patch() -> AntennaPattern {
        AntennaPreset::PatchMeasured.pattern()
    }

    fn isotropic() -> AntennaPattern {
        AntennaPattern {
            boresight_gain: Decibel(0.0),
            hpbw_deg: 359.0,
            axial_ratio_db: Decibel(0.0),
            valid_band: (Frequency::mhz(1.0).unwrap(), Frequency::mhz(1e5).unwrap()),
            shape: PatternShape::Omni,
        }
    }

    fn zero_link() -> LinkBudgetInput {
        LinkBudgetInput {
            frequency: Frequency::mhz(2430.0).unwrap(),
            distance_m: 500e3,
            tx_power_dbw: Decibel(0.0),
            tx_pattern: isotropic(),
            tx_off_boresight_deg: 0.0,
            rx_pattern: isotropic(),
            rx_off_boresight_deg: 0.0,
            polarization_tilt_deg: 0.0,
            misc_losses_db: Decibel(0.0),
            required_cn_db: Decibel(0.0),
        }
    }

    #[test]
    fn patch_gain_examples() {
        let p = patch();
        assert_eq!(pattern_gain(&p, 0.0).unwrap(), Decibel(4.13));
        assert!((pattern_gain(&p, 52.0).unwrap().0 - 1.13).abs() < 1e-6);
        assert!(pattern_gain(&p, 180.5).is_err());
        assert!(pattern_gain(&p, -1.0).is_err());
    }

    #[test]
    fn exponent_forces_three_db_at_half_angle() {
        let p = patch();
        let n = p.cos_power_exponent();
        // −3 dB / (10·log10 cos 52°)
        let oracle = 0.3 / -(52f64.to_radians().cos().log10());
        assert!((n - oracle).abs() < 1e-12);
        assert!((n - 1.4241).abs() < 1e-3, "{n}");
    }

    #[test]
    fn back_hemisphere_is_floored() {
        let p = patch();
        assert_eq!(pattern_gain(&p, 90.0).unwrap().0, 4.13 - 40.0);
        assert_eq!(pattern_gain(&p, 180.0).unwrap().0, 4.13 - 40.0);
        assert!(pattern_gain(&p, 89.999).unwrap().0 >= 4.13 - 40.0);
    }

    #[test]
    fn omni_is_constant() {
        let t = AntennaPreset::TurnstileIdeal.pattern();
        for theta in [0.0, 45.0, 90.0, 135.0, 180.0] {
            assert_eq!(pattern_gain(&t, theta).unwrap(), Decibel(2.0));
        }
        assert_eq!(measure_hpbw(&t), None);
    }

    #[test]
    fn hpbw_is_recovered_numerically() {
        for preset in [AntennaPreset::PatchMeasured, AntennaPreset::PatchSimulated] {
            let p = preset.pattern();
            let measured = measure_hpbw(&p).unwrap();
            assert!((measured - p.hpbw_deg).abs() < 0.02, "{preset}: {measured}");
        }
    }

    #[test]
    fn fspl_examples() {
        let s = fspl_db(Frequency::mhz(2430.0).unwrap(), 500e3).unwrap();
        // 20·log10(500) = 53.9794, 20·log10(2430) = 67.7121
        assert!((s.0 - 154.14).abs() < 0.01, "{s}");
        let u = fspl_db(Frequency::mhz(436.5).unwrap(), 500e3).unwrap();
        assert!((u.0 - 139.23).abs() < 0.01, "{u}");
        let f = Frequency::mhz(436.5).unwrap();
        let d = fspl_db(f, 1000e3).unwrap().0 - u.0;
        assert!((d - 6.0206).abs() < 1e-4);
        assert!(fspl_db(f, 0.0).is_err());
    }

    #[test]
    fn polarization_examples() {
        let linear = Decibel(f64::INFINITY);
        let circular = Decibel(0.0);
        for tilt in [0.0, 17.0, 45.0, 90.0] {
            let l = polarization_loss_db(linear, circular, tilt);
            assert!((l.0 - 3.0103).abs() < 1e-3, "tilt {tilt}: {l}");
        }
        assert!(polarization_loss_db(circular, circular, 0.0).0.abs() < 1e-9);
        assert!(polarization_loss_db(linear, linear, 90.0).0 >= 40.0);
        assert!(polarization_loss_db(linear, linear, 0.0).0.abs() < 1e-9);
    }

    #[test]
    fn axial_ratio_band() {
        let p = patch();
        assert!(axial_ratio_ok(&p, Frequency::ghz(2.45).unwrap()));
        assert!(!axial_ratio_ok(&p, Frequency::ghz(2.40).unwrap()));
        let dipole = AntennaPreset::DipoleLinear.pattern();
        for mhz in [430.0, 436.5, 2430.0] {
            assert!(!axial_ratio_ok(&dipole, Frequency::mhz(mhz).unwrap()));
        }
    }

    #[test]
    fn margin_examples() {
        let mut input = zero_link();
        let fspl = fspl_db(input.frequency, input.distance_m).unwrap();
        input.tx_power_dbw = fspl;
        assert!(link_margin_db(&input).unwrap().0.abs() < 1e-12);

        let mut lossy = input.clone();
        lossy.misc_losses_db = Decibel(3.0);
        assert!((link_margin_db(&lossy).unwrap().0 + 3.0).abs() < 1e-12);

        let mut a = input.clone();
        a.tx_pattern = patch();
        let mut b = a.clone();
        b.tx_off_boresight_deg = 52.0;
        let delta = link_margin_db(&b).unwrap().0 - link_margin_db(&a).unwrap().0;
        assert!((delta + 3.0).abs() < 1e-9);
    }

    #[test]
    fn margin_propagates_errors() {
        let mut input = zero_link();
        input.distance_m = -1.0;
        assert!(link_margin_db(&input).is_err());
        let mut input = zero_link();
        input.rx_off_boresight_deg = 200.0;
        assert!(link_margin_db(&input).is_err());
    }

    #[test]
    fn preset_names_round_trip() {
        for p in AntennaPreset::ALL {
            assert_eq!(p.name().parse::<AntennaPreset>().unwrap(), p);
            assert!(p.pattern().validate().is_ok());
        }
        assert!("helix".parse::<AntennaPreset>().is_err());
    }

    proptest! {
        #[test]
        fn cos_power_monotone(a in 0.0f64..=90.0, b in 0.0f64..=90.0, hpbw in 10.0f64..170.0) {
            let p = AntennaPattern { hpbw_deg: hpbw, ..patch() };
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(pattern_gain(&p, hi).unwrap().0 <= pattern_gain(&p, lo).unwrap().0);
            let half = pattern_gain(&p, hpbw / 2.0).unwrap().0;
            prop_assert!((half - (p.boresight_gain.0 - 3.0)).abs() < 1e-9);
        }

        #[test]
        fn polarization_symmetric(a in 0.0f64..40.0, b in 0.0f64..40.0, tilt in 0.0f64..=90.0) {
            let x = polarization_loss_db(Decibel(a), Decibel(b), tilt).0;
            let y = polarization_loss_db(Decibel(b), Decibel(a), tilt).0;
            prop_assert!((x - y).abs() < 1e-12);
            prop_assert!((0.0..=CROSS_POL_CAP_DB).contains(&x));
        }

        #[test]
        fn fspl_scaling(d in 1.0f64..1e8, k in 1e-3f64..1e3, mhz in 1.0f64..1e5) {
            let f = Frequency::mhz(mhz).unwrap();
            let diff = fspl_db(f, k * d).unwrap().0 - fspl_db(f, d).unwrap().0;
            prop_assert!((diff - 20.0 * k.log10()).abs() < 1e-9);
        }

        #[test]
        fn margin_monotone(d in 1e3f64..1e7, dd in 0.0f64..1e7, loss in 0.0f64..20.0, dl in 0.0f64..20.0,
                           th in 0.0f64..180.0, dth in 0.0f64..180.0) {
            let mut base = zero_link();
            base.tx_pattern = patch();
            base.rx_pattern = AntennaPreset::PatchSimulated.pattern();
            base.distance_m = d;
            base.misc_losses_db = Decibel(loss);
            base.tx_off_boresight_deg = th;
            base.rx_off_boresight_deg = th;
            let m0 = link_margin_db(&base).unwrap().0;
            let far = LinkBudgetInput { distance_m: d + dd, ..base.clone() };
            prop_assert!(link_margin_db(&far).unwrap().0 <= m0 + 1e-12);
            let lossier = LinkBudgetInput { misc_losses_db: Decibel(loss + dl), ..base.clone() };
            prop_assert!(link_margin_db(&lossier).unwrap().0 <= m0 + 1e-12);
            let th2 = (th + dth).min(180.0);
            let off = LinkBudgetInput { tx_off_boresight_deg: th2, rx_off_boresight_deg: th2, ..base.clone() };
            prop_assert!(link_margin_db(&off).unwrap().0 <= m0 + 1e-12);
        }
    }
}
