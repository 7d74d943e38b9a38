use std::fmt::Write as _;

use opcalc::numfmt::sig17;
use serde::ser::{SerializeStruct, Serializer};
use serde::Serialize;
use serde_json::value::RawValue;

/// One checked identity: `pass ⇔ residual ≤ tolerance` (NaN fails).
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub suite: String,
    pub case: String,
    pub anchor: String,
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub runtime_ms: f64,
}

impl VerificationReport {
    pub fn new(
        suite: impl Into<String>,
        case: impl Into<String>,
        anchor: impl Into<String>,
        residual: f64,
        tolerance: f64,
    ) -> Self {
        Self {
            suite: suite.into(),
            case: case.into(),
            anchor: anchor.into(),
            residual,
            tolerance,
            pass: residual <= tolerance,
            runtime_ms: 0.0,
        }
    }

    pub fn line(&self) -> String {
        format!(
            "{} {}/{}: residual {} (tolerance {})",
            if self.pass { "PASS" } else { "FAIL" },
            self.suite,
            self.case,
            sig17(self.residual),
            sig17(self.tolerance)
        )
    }
}

/// A float written with exactly 17 significant digits; non-finite → `null`.
struct Fixed(f64);

impl Serialize for Fixed {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.0.is_finite() {
            let raw = RawValue::from_string(sig17(self.0)).map_err(serde::ser::Error::custom)?;
            raw.serialize(s)
        } else {
            s.serialize_none()
        }
    }
}

impl Serialize for VerificationReport {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("VerificationReport", 7)?;
        st.serialize_field("suite", &self.suite)?;
        st.serialize_field("case", &self.case)?;
        st.serialize_field("paper_anchor", &self.anchor)?;
        st.serialize_field("residual", &Fixed(self.residual))?;
        st.serialize_field("tolerance", &Fixed(self.tolerance))?;
        st.serialize_field("pass", &self.pass)?;
        st.serialize_field("runtime_ms", &Fixed(self.runtime_ms))?;
        st.end()
    }
}

#[derive(Serialize)]
struct Document<'a> {
    seed: u64,
    all_pass: bool,
    reports: &'a [VerificationReport],
}

/// Sorts by `(suite, case)`; the order every writer uses.
pub fn canonical_order(reports: &mut [VerificationReport]) {
    reports.sort_by(|a, b| (&a.suite, &a.case).cmp(&(&b.suite, &b.case)));
}

pub fn all_pass(reports: &[VerificationReport]) -> bool {
    reports.iter().all(|r| r.pass)
}

pub fn to_json(seed: u64, reports: &[VerificationReport]) -> String {
    let doc = Document {
        seed,
        all_pass: all_pass(reports),
        reports,
    };
    let mut out = serde_json::to_string_pretty(&doc).expect("report serializes");
    out.push('\n');
    out
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn to_csv(reports: &[VerificationReport]) -> String {
    let mut out = String::from("suite,case,paper_anchor,residual,tolerance,pass,runtime_ms\n");
    for r in reports {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            csv_field(&r.suite),
            csv_field(&r.case),
            csv_field(&r.anchor),
            sig17(r.residual),
            sig17(r.tolerance),
            r.pass,
            sig17(r.runtime_ms)
        )
        .expect("writing to a String");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pass_follows_tolerance() {
        assert!(VerificationReport::new("s", "c", "a", 1e-9, 1e-8).pass);
        assert!(VerificationReport::new("s", "c", "a", 1e-8, 1e-8).pass);
        assert!(!VerificationReport::new("s", "c", "a", 2e-8, 1e-8).pass);
        assert!(!VerificationReport::new("s", "c", "a", f64::NAN, 1e-8).pass);
    }

    #[test]
    fn json_uses_fixed_digits_and_null() {
        let reports = [
            VerificationReport::new("matfun", "x", "log-exp-round-trip", 0.1, 1e-8),
            VerificationReport::new("bch", "y", "bch-order-law", f64::NAN, 1.0),
        ];
        let text = to_json(3, &reports);
        assert!(text.contains("\"residual\": 1.0000000000000001e-1"), "{text}");
        assert!(text.contains("\"residual\": null"));
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v["all_pass"], false);
    }

    #[test]
    fn ordering_and_csv() {
        let mut reports = vec![
            VerificationReport::new("matfun", "b", "a", 0.0, 1.0),
            VerificationReport::new("bch", "z", "a", 0.0, 1.0),
            VerificationReport::new("matfun", "a,1", "a", 0.0, 1.0),
        ];
        canonical_order(&mut reports);
        let cases: Vec<&str> = reports.iter().map(|r| r.case.as_str()).collect();
        assert_eq!(cases, ["z", "a,1", "b"]);
        let csv = to_csv(&reports);
        assert!(csv.lines().nth(2).unwrap().starts_with("matfun,\"a,1\",a,"));
    }
}
