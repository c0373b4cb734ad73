//! Component-wise FPGA resource model and conversion to silicon area.
//!
//! The accelerator is split into: base infrastructure, the convolution
//! engine(s), three on-chip buffers, the optional pooling engine and the
//! external memory interface. Each component contributes a
//! [`ResourceVector`]; totals convert to mm² with the per-tile areas of a
//! Zynq UltraScale+ device.

use core::ops::{Add, AddAssign};

use crate::space::HwConfig;

/// mm² of one CLB tile.
pub const CLB_TILE_MM2: f64 = 0.0044;
/// mm² of one DSP tile.
pub const DSP_TILE_MM2: f64 = 0.044;
/// mm² of one 36 Kbit BRAM tile.
pub const BRAM36_TILE_MM2: f64 = 0.026;
/// Area of a DSP tile in CLB tiles.
pub const DSP_RELATIVE_CLB: u64 = 10;
/// Area of a BRAM tile in CLB tiles.
pub const BRAM36_RELATIVE_CLB: u64 = 6;
/// Bits in one BRAM36 block.
pub const BRAM36_BITS: u64 = 36 * 1024;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct ResourceVector {
    pub clb: u64,
    pub dsp: u64,
    pub bram36: u64,
}

impl ResourceVector {
    pub const ZERO: ResourceVector = ResourceVector { clb: 0, dsp: 0, bram36: 0 };

    pub fn new(clb: u64, dsp: u64, bram36: u64) -> Self {
        ResourceVector { clb, dsp, bram36 }
    }

    /// Total size in CLB tiles.
    pub fn clb_equivalents(&self) -> u64 {
        self.clb + DSP_RELATIVE_CLB * self.dsp + BRAM36_RELATIVE_CLB * self.bram36
    }

    pub fn area_mm2(&self) -> f64 {
        CLB_TILE_MM2 * self.clb as f64 + DSP_TILE_MM2 * self.dsp as f64 + BRAM36_TILE_MM2 * self.bram36 as f64
    }
}

impl Add for ResourceVector {
    type Output = ResourceVector;
    fn add(self, rhs: Self) -> Self {
        ResourceVector { clb: self.clb + rhs.clb, dsp: self.dsp + rhs.dsp, bram36: self.bram36 + rhs.bram36 }
    }
}

impl AddAssign for ResourceVector {
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

/// Silicon area of a design given only its size in CLB tiles.
pub fn clb_equivalents_to_mm2(clb_equivalents: f64) -> f64 {
    clb_equivalents * CLB_TILE_MM2
}

/// Per-component constants of the area model. Every field can be overridden
/// from a calibration file.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AreaParams {
    /// Control logic, DMA and interconnect present in every configuration.
    pub base_clb: u64,
    /// Fixed CLBs per convolution engine instance.
    pub conv_engine_clb: u64,
    /// CLBs of MAC glue logic and sliding window per DSP.
    pub conv_clb_per_dsp: u64,
    /// Input buffer port width per unit of `pixel_par`, in bits.
    pub input_port_bits_per_pixel: u64,
    /// Weights buffer port width per unit of `filter_par`, in bits.
    pub weights_port_bits_per_filter: u64,
    /// Output buffer port width per unit of `pixel_par`, in bits.
    pub output_port_bits_per_pixel: u64,
    /// CLBs per bit of external memory interface width.
    pub mem_clb_per_bit: u64,
    pub pool_clb: u64,
    pub pool_dsp: u64,
    pub pool_bram36: u64,
}

impl Default for AreaParams {
    fn default() -> Self {
        AreaParams {
            base_clb: 8000,
            conv_engine_clb: 1500,
            conv_clb_per_dsp: 14,
            input_port_bits_per_pixel: 16,
            weights_port_bits_per_filter: 72,
            output_port_bits_per_pixel: 16,
            mem_clb_per_bit: 4,
            pool_clb: 2500,
            pool_dsp: 0,
            pool_bram36: 8,
        }
    }
}

/// DSP split of the convolution engines: `(general, conv3x3, conv1x1)`.
///
/// A single general engine owns all `filter_par * pixel_par` DSPs when
/// `ratio_conv_engines` is 1; otherwise the 3x3 engine gets
/// `round(ratio * total)` and the 1x1 engine the remainder.
pub fn conv_dsp_split(hw: &HwConfig) -> (u64, u64, u64) {
    let total = hw.filter_par() as u64 * hw.pixel_par() as u64;
    if hw.split_engines() {
        let r = hw.ratio_hundredths() as u64;
        let conv3 = (r * total + 50) / 100;
        (0, conv3, total - conv3)
    } else {
        (total, 0, 0)
    }
}

fn buffer_bram(depth: u32, port_bits: u64) -> u64 {
    (depth as u64 * port_bits).div_ceil(BRAM36_BITS)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AreaBreakdown {
    pub base: ResourceVector,
    pub conv_engines: ResourceVector,
    pub input_buffer: ResourceVector,
    pub weights_buffer: ResourceVector,
    pub output_buffer: ResourceVector,
    pub pooling: ResourceVector,
    pub memory_interface: ResourceVector,
}

impl AreaBreakdown {
    pub fn components(&self) -> [ResourceVector; 7] {
        [
            self.base,
            self.conv_engines,
            self.input_buffer,
            self.weights_buffer,
            self.output_buffer,
            self.pooling,
            self.memory_interface,
        ]
    }

    pub fn total(&self) -> ResourceVector {
        self.components().into_iter().fold(ResourceVector::ZERO, Add::add)
    }

    pub fn area_mm2(&self) -> f64 {
        self.total().area_mm2()
    }
}

pub fn area_breakdown(hw: &HwConfig, params: &AreaParams) -> AreaBreakdown {
    let (general, conv3, conv1) = conv_dsp_split(hw);
    let engines = if hw.split_engines() { 2 } else { 1 };
    let dsp = general + conv3 + conv1;
    let pixel = hw.pixel_par() as u64;
    let filter = hw.filter_par() as u64;
    AreaBreakdown {
        base: ResourceVector::new(params.base_clb, 0, 0),
        conv_engines: ResourceVector::new(engines * params.conv_engine_clb + params.conv_clb_per_dsp * dsp, dsp, 0),
        input_buffer: ResourceVector::new(
            0,
            0,
            buffer_bram(hw.input_buffer_depth(), pixel * params.input_port_bits_per_pixel),
        ),
        weights_buffer: ResourceVector::new(
            0,
            0,
            buffer_bram(hw.weights_buffer_depth(), filter * params.weights_port_bits_per_filter),
        ),
        output_buffer: ResourceVector::new(
            0,
            0,
            buffer_bram(hw.output_buffer_depth(), pixel * params.output_port_bits_per_pixel),
        ),
        pooling: if hw.pool_en() {
            ResourceVector::new(params.pool_clb, params.pool_dsp, params.pool_bram36)
        } else {
            ResourceVector::ZERO
        },
        memory_interface: ResourceVector::new(params.mem_clb_per_bit * hw.mem_interface_width() as u64, 0, 0),
    }
}

/// Total resources and silicon area of an accelerator configuration.
pub fn area(hw: &HwConfig, params: &AreaParams) -> (ResourceVector, f64) {
    let total = area_breakdown(hw, params).total();
    (total, total.area_mm2())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::enumerate_hw;

    #[test]
    fn tile_conversion() {
        assert_eq!(ResourceVector::new(1, 0, 0).area_mm2(), 0.0044);
        assert!((DSP_TILE_MM2 - DSP_RELATIVE_CLB as f64 * CLB_TILE_MM2).abs() < 1e-15);
        // 6 * 0.0044 = 0.0264, rounded to 0.026 in the reference table
        assert!((BRAM36_TILE_MM2 - BRAM36_RELATIVE_CLB as f64 * CLB_TILE_MM2).abs() < 0.0005);
        let total = clb_equivalents_to_mm2(64_922.0);
        assert!((total - 286.0).abs() / 286.0 < 0.002, "{total}");
    }

    #[test]
    fn input_buffer_doubling() {
        let params = AreaParams::default();
        let base = HwConfig::from_ordinal(0).unwrap();
        let bigger = base.with_index(2, 1).unwrap();
        let (_, a0) = area(&base, &params);
        let (_, a1) = area(&bigger, &params);
        assert!(a1 > a0);
        // 1024 x (4 * 16) bits -> 2 BRAMs; 2048 x 64 bits -> 4 BRAMs
        assert!((a1 - a0 - 2.0 * BRAM36_TILE_MM2).abs() < 1e-12);
    }

    #[test]
    fn breakdown_sums_and_pooling_never_shrinks() {
        let params = AreaParams::default();
        for hw in enumerate_hw() {
            let b = area_breakdown(&hw, &params);
            let mut sum = ResourceVector::ZERO;
            for c in b.components() {
                sum += c;
            }
            assert_eq!(sum, area(&hw, &params).0);
            if hw.pool_en() {
                let without = hw.with_index(6, 0).unwrap();
                assert!(area(&without, &params).1 <= area(&hw, &params).1);
            }
        }
    }

    #[test]
    fn dsp_split() {
        let hw = HwConfig::from_values(16, 64, 1024, 1024, 1024, 256, false, 33).unwrap();
        assert_eq!(conv_dsp_split(&hw), (0, 338, 686));
        let hw = HwConfig::from_values(8, 4, 1024, 1024, 1024, 256, false, 100).unwrap();
        assert_eq!(conv_dsp_split(&hw), (32, 0, 0));
    }
}
