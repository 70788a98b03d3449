/// Equal-width bins with a "nice" step from `{1, 2, 5} × 10^k`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BinLayout {
    pub start: f64,
    pub step: f64,
    pub count: usize,
}

const EPS: f64 = 1e-9;

fn nice_step(mantissa: f64, exp: i32) -> f64 {
    if exp >= 0 {
        mantissa * 10f64.powi(exp)
    } else {
        mantissa / 10f64.powi(-exp)
    }
}

impl BinLayout {
    /// Bin index for `v`. The last bin is closed so the maximum lands inside it.
    pub fn index(&self, v: f64) -> usize {
        let i = ((v - self.start) / self.step + EPS).floor();
        if i <= 0.0 {
            0
        } else {
            (i as usize).min(self.count - 1)
        }
    }

    pub fn bin_start(&self, i: usize) -> f64 {
        ((self.start / self.step).round() + i as f64) * self.step
    }

    pub fn bin_end(&self, i: usize) -> f64 {
        self.bin_start(i + 1)
    }

    pub fn end(&self) -> f64 {
        self.bin_end(self.count - 1)
    }
}

/// Smallest nice step whose aligned bins cover `[min, max]` in at most
/// `maxbins` bins. `maxbins` below 2 is treated as 2, since one aligned bin
/// cannot cover a range that straddles zero.
pub fn nice_bins(min: f64, max: f64, maxbins: u32) -> BinLayout {
    let maxbins = maxbins.max(2) as f64;
    let span = max - min;
    if span.is_nan() || span <= 0.0 {
        let mag = if min == 0.0 { 0 } else { min.abs().log10().floor() as i32 };
        let step = nice_step(1.0, mag);
        return BinLayout {
            start: (min / step).floor() * step,
            step,
            count: 1,
        };
    }
    let mut exp = (span / maxbins).log10().floor() as i32 - 1;
    loop {
        for mantissa in [1.0, 2.0, 5.0] {
            let step = nice_step(mantissa, exp);
            let lo = (min / step + EPS).floor();
            let mut hi = (max / step - EPS).ceil();
            if hi <= lo {
                hi = lo + 1.0;
            }
            let count = (hi - lo).round();
            if count <= maxbins {
                return BinLayout {
                    start: lo * step,
                    step,
                    count: count as usize,
                };
            }
        }
        exp += 1;
    }
}
