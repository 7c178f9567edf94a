//! First-order radio energy model.
//!
//! Transmitting `l` bits over `d` meters costs `l * e_elec + l * eps * d^n`,
//! with a free-space amplifier (`n = 2`) below the crossover distance `d0` and
//! a multipath amplifier (`n = 4`) at or beyond it. Receiving costs only the
//! electronics term, and a cluster head pays `e_da` per bit for every signal
//! it fuses.

use crate::error::{Error, Result};

pub const BITS_PER_BYTE: u64 = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct RadioParams {
    /// Electronics energy, J/bit.
    pub e_elec: f64,
    /// Free-space amplifier, J/bit/m^2.
    pub eps_fs: f64,
    /// Multipath amplifier, J/bit/m^4.
    pub eps_mp: f64,
    /// Crossover distance, m.
    pub d0: f64,
    /// Aggregation energy, J/bit/signal.
    pub e_da: f64,
    pub packet_bits: u64,
}

impl Default for RadioParams {
    fn default() -> Self {
        Self {
            e_elec: 50e-9,
            eps_fs: 10e-12,
            eps_mp: 0.0013e-12,
            d0: 87.7,
            e_da: 5e-9,
            packet_bits: 500 * BITS_PER_BYTE,
        }
    }
}

impl RadioParams {
    pub fn with_packet_bytes(mut self, bytes: u64) -> Self {
        self.packet_bits = bytes * BITS_PER_BYTE;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let checks = [
            ("e_elec_nj_per_bit", self.e_elec),
            ("eps_fs_pj", self.eps_fs),
            ("eps_mp_pj", self.eps_mp),
            ("d0_m", self.d0),
            ("e_da_nj", self.e_da),
        ];
        for (key, v) in checks {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(key, "must be positive"));
            }
        }
        if self.packet_bits == 0 {
            return Err(Error::config("packet_bytes", "must be positive"));
        }
        let crossover = (self.eps_fs / self.eps_mp).sqrt();
        if ((self.d0 - crossover) / crossover).abs() > 0.01 {
            return Err(Error::config(
                "d0_m",
                format!(
                    "{} m is inconsistent with sqrt(eps_fs/eps_mp) = {crossover:.3} m",
                    self.d0
                ),
            ));
        }
        Ok(())
    }
}

fn check_nonnegative(what: &str, v: f64) -> Result<()> {
    if v.is_finite() && v >= 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!("{what} must be finite and nonnegative, got {v}")))
    }
}

pub fn tx_energy(params: &RadioParams, bits: u64, d: f64) -> Result<f64> {
    check_nonnegative("distance", d)?;
    let l = bits as f64;
    let amp = if d < params.d0 {
        params.eps_fs * d * d
    } else {
        params.eps_mp * d.powi(4)
    };
    Ok(l * params.e_elec + l * amp)
}

pub fn rx_energy(params: &RadioParams, bits: u64) -> f64 {
    bits as f64 * params.e_elec
}

/// Cost of fusing `signals` inputs of `bits` each.
pub fn aggregation_energy(params: &RadioParams, bits: u64, signals: u64) -> f64 {
    signals as f64 * bits as f64 * params.e_da
}

/// Number of signals a cluster head fuses: its members' packets plus its own
/// reading.
pub fn aggregation_signals(members: usize) -> u64 {
    members as u64 + 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * b.abs().max(1e-30)
    }

    #[test]
    fn table_defaults_are_consistent() {
        let p = RadioParams::default();
        assert_eq!(p.packet_bits, 4000);
        p.validate().unwrap();
    }

    #[test]
    fn tx_examples() {
        let p = RadioParams::default();
        assert!(close(tx_energy(&p, 4000, 0.0).unwrap(), 2.0e-4));
        // 4000 * 50e-9 + 4000 * 10e-12 * 2500
        assert!(close(tx_energy(&p, 4000, 50.0).unwrap(), 3.0e-4));
    }

    #[test]
    fn tx_branch_boundary_uses_multipath() {
        let p = RadioParams::default();
        let at = tx_energy(&p, 4000, p.d0).unwrap();
        let mp = 4000.0 * p.e_elec + 4000.0 * p.eps_mp * p.d0.powi(4);
        assert!(close(at, mp));
    }

    #[test]
    fn tx_crossover_is_continuous() {
        let p = RadioParams::default();
        let eps = 1e-9;
        let below = tx_energy(&p, 4000, p.d0 - eps).unwrap();
        let above = tx_energy(&p, 4000, p.d0 + eps).unwrap();
        let mid = tx_energy(&p, 4000, p.d0).unwrap();
        assert!((below - above).abs() / mid < 1e-3);
        // Amplifier terms per bit: 76,912.9 pJ vs 76,902.7 pJ.
        let fs = p.eps_fs * p.d0 * p.d0;
        let mp = p.eps_mp * p.d0.powi(4);
        assert!((fs * 1e12 - 76_912.9).abs() < 0.1);
        assert!((mp * 1e12 - 76_902.7).abs() < 0.1);
    }

    #[test]
    fn rx_and_aggregation_examples() {
        let p = RadioParams::default();
        assert_eq!(rx_energy(&p, 0), 0.0);
        assert!(close(rx_energy(&p, 4000), 2.0e-4));
        assert!(close(aggregation_energy(&p, 4000, 1), 2.0e-5));
        assert_eq!(aggregation_energy(&p, 4000, 0), 0.0);
        assert!(close(aggregation_energy(&p, 4000, 6), 1.2e-4));
        assert_eq!(aggregation_signals(5), 6);
    }

    #[test]
    fn negative_distance_is_a_domain_error() {
        let p = RadioParams::default();
        assert!(matches!(tx_energy(&p, 4000, -1.0), Err(Error::Domain(_))));
        assert!(tx_energy(&p, 4000, f64::NAN).is_err());
    }

    #[test]
    fn inconsistent_crossover_is_rejected() {
        let p = RadioParams {
            d0: 50.0,
            ..RadioParams::default()
        };
        assert!(matches!(p.validate(), Err(Error::Config { key, .. }) if key == "d0_m"));
    }

    proptest! {
        #[test]
        fn energies_are_linear_and_monotone(bits in 0u64..100_000, d in 0.0..300.0f64, dd in 0.0..10.0f64) {
            let p = RadioParams::default();
            let tx = tx_energy(&p, bits, d).unwrap();
            prop_assert!(tx >= 0.0);
            prop_assert_eq!(tx_energy(&p, 2 * bits, d).unwrap(), 2.0 * tx);
            prop_assert_eq!(rx_energy(&p, 2 * bits), 2.0 * rx_energy(&p, bits));
            prop_assert_eq!(aggregation_energy(&p, 2 * bits, 3), 2.0 * aggregation_energy(&p, bits, 3));
            prop_assert_eq!(rx_energy(&p, bits), tx_energy(&p, bits, 0.0).unwrap());
            // Exactly monotone within a branch; the multipath branch starts
            // about 1.3e-4 relative below the free-space value at d0.
            let further = tx_energy(&p, bits, d + dd).unwrap();
            if (d < p.d0) == (d + dd < p.d0) {
                prop_assert!(further >= tx);
            } else {
                prop_assert!(further >= tx * (1.0 - 1e-3));
            }
            prop_assert!(tx_energy(&p, bits + 1, d).unwrap() >= tx);
        }
    }
}
