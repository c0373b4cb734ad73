//! Calibration files: overrides for the synthetic latency and area constants.
//!
//! ```text
//! f_clk_mhz = 250
//! cpu_bandwidth_gbps = 2.5
//! area.base_clb = 9000
//! ```

use codesign_core::{AreaParams, SyntheticLatencyParams};

use crate::kv::{self, ConfigError};

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Calibration {
    pub latency: SyntheticLatencyParams,
    pub area: AreaParams,
}

impl Calibration {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut cal = Calibration::default();
        for e in kv::parse(text)? {
            let lat = &mut cal.latency;
            let area = &mut cal.area;
            let real = || -> Result<f64, ConfigError> {
                let v: f64 = e.parse()?;
                if v.is_finite() && v > 0.0 {
                    Ok(v)
                } else {
                    Err(e.error("must be positive"))
                }
            };
            match e.key.as_str() {
                "f_clk_mhz" => lat.f_clk_mhz = real()?,
                "f_mem_mhz" => lat.f_mem_mhz = real()?,
                "bytes_per_element" => lat.bytes_per_element = real()?,
                "accel_overhead_ms" => lat.accel_overhead_ms = real()?,
                "cpu_bandwidth_gbps" => lat.cpu_bandwidth_gbps = real()?,
                "cpu_overhead_ms" => lat.cpu_overhead_ms = real()?,
                "area.base_clb" => area.base_clb = e.parse()?,
                "area.conv_engine_clb" => area.conv_engine_clb = e.parse()?,
                "area.conv_clb_per_dsp" => area.conv_clb_per_dsp = e.parse()?,
                "area.input_port_bits_per_pixel" => area.input_port_bits_per_pixel = e.parse()?,
                "area.weights_port_bits_per_filter" => area.weights_port_bits_per_filter = e.parse()?,
                "area.output_port_bits_per_pixel" => area.output_port_bits_per_pixel = e.parse()?,
                "area.mem_clb_per_bit" => area.mem_clb_per_bit = e.parse()?,
                "area.pool_clb" => area.pool_clb = e.parse()?,
                "area.pool_dsp" => area.pool_dsp = e.parse()?,
                "area.pool_bram36" => area.pool_bram36 = e.parse()?,
                _ => return Err(e.error("unknown calibration key")),
            }
        }
        Ok(cal)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_only_named_fields() {
        let cal = Calibration::parse("f_clk_mhz = 250\narea.base_clb = 9000\n").unwrap();
        assert_eq!(cal.latency.f_clk_mhz, 250.0);
        assert_eq!(cal.latency.f_mem_mhz, SyntheticLatencyParams::default().f_mem_mhz);
        assert_eq!(cal.area, AreaParams { base_clb: 9000, ..AreaParams::default() });
    }

    #[test]
    fn rejects_bad_values() {
        assert!(Calibration::parse("f_clk_mhz = -1").is_err());
        assert!(Calibration::parse("area.base_clb = 1.5").is_err());
        assert_eq!(Calibration::parse("\nwat = 1").unwrap_err().line, Some(2));
    }
}
