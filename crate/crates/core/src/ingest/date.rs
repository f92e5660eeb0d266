use chrono::NaiveDate;

const FORMATS: [&str; 5] = ["%Y-%m-%d", "%d %B %Y", "%B %d %Y", "%d %b %Y", "%b %d %Y"];

/// Parses a calendar date. ISO-8601 is the canonical form; prose dates such
/// as `May 4, 2020` or `1 st May, 2020` are accepted and normalized.
pub fn parse_date(raw: &str) -> Result<NaiveDate, String> {
    let raw = raw.trim();
    if let Ok(d) = NaiveDate::parse_from_str(raw, "%Y-%m-%d") {
        return Ok(d);
    }
    let mut tokens: Vec<String> = Vec::new();
    for tok in raw.split(|c: char| c.is_whitespace() || c == ',') {
        if tok.is_empty() {
            continue;
        }
        let lower = tok.to_ascii_lowercase();
        let is_suffix = matches!(lower.as_str(), "st" | "nd" | "rd" | "th");
        let prev_numeric = tokens
            .last()
            .is_some_and(|t| t.chars().all(|c| c.is_ascii_digit()));
        if is_suffix && prev_numeric {
            continue;
        }
        // `1st`, `22nd`
        let digits: String = tok.chars().take_while(|c| c.is_ascii_digit()).collect();
        let rest = &lower[digits.len()..];
        if !digits.is_empty() && matches!(rest, "st" | "nd" | "rd" | "th") {
            tokens.push(digits);
        } else {
            tokens.push(tok.to_string());
        }
    }
    let joined = tokens.join(" ");
    FORMATS
        .iter()
        .find_map(|f| NaiveDate::parse_from_str(&joined, f).ok())
        .ok_or_else(|| format!("unrecognised date `{raw}`"))
}
