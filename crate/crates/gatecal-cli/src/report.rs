//! Deterministic CSV assembly. All computed quantities are printed with 12
//! significant digits so identical runs produce byte-identical reports.

/// Format with `sig` significant digits in plain positional notation.
/// Deterministic: the output is a pure function of the value's bits.
pub fn fmt_sig(value: f64, sig: usize) -> String {
    if value.is_nan() {
        return "nan".to_string();
    }
    if value.is_infinite() {
        return if value > 0.0 { "inf".to_string() } else { "-inf".to_string() };
    }
    if value == 0.0 {
        return "0".to_string();
    }
    let exponent = value.abs().log10().floor() as i32;
    let decimals = (sig as i32 - 1 - exponent).clamp(0, 24) as usize;
    format!("{value:.decimals$}")
}

/// Computed quantities carry 12 significant digits.
pub fn num(value: f64) -> String {
    fmt_sig(value, 12)
}

/// A CSV document under construction; rows are plain comma joins.
#[derive(Default)]
pub struct Csv {
    buf: String,
}

impl Csv {
    pub fn new() -> Self {
        Csv::default()
    }

    pub fn row<I, S>(&mut self, fields: I) -> &mut Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut first = true;
        for field in fields {
            if !first {
                self.buf.push(',');
            }
            self.buf.push_str(field.as_ref());
            first = false;
        }
        self.buf.push('\n');
        self
    }

    pub fn finish(self) -> String {
        self.buf
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(fmt_sig(7.375, 12), "7.37500000000");
        assert_eq!(fmt_sig(0.0064, 12), "0.00640000000000");
        assert_eq!(fmt_sig(-2.0, 12), "-2.00000000000");
        assert_eq!(fmt_sig(0.0, 12), "0");
        assert_eq!(fmt_sig(f64::INFINITY, 12), "inf");
        assert_eq!(fmt_sig(1.3864, 6), "1.38640");
        assert_eq!(fmt_sig(123456.0, 3), "123456");
    }

    #[test]
    fn csv_rows_join_with_commas() {
        let mut csv = Csv::new();
        csv.row(["a", "b"]).row(["1"]);
        assert_eq!(csv.finish(), "a,b\n1\n");
    }
}
