//! Prompt templates and the placeholder renderer.
//!
//! Templates use brace placeholders (`{name}`) with `{{` / `}}` as escaped
//! literal braces. Their wording is reproduced verbatim, inconsistencies
//! included: the stay requirement reads "> 49 hours" in the fixed-sequence
//! prompt and "> 48 hours" in the generic one, and both mention a 1 hour
//! transit buffer. Validation policy is configured separately.

use std::collections::HashMap;

use super::{FeedbackKind, GenerationRequest, RequestError};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TemplateError {
    #[error("unknown placeholder {{{0}}}")]
    UnknownPlaceholder(String),
    #[error("unbalanced brace at byte {0}")]
    UnbalancedBrace(usize),
}

/// Substitutes `{name}` placeholders and unescapes `{{` / `}}`.
pub fn render_template(template: &str, values: &HashMap<&str, String>) -> Result<String, TemplateError> {
    let mut out = String::with_capacity(template.len() + 256);
    let mut rest = template;
    let mut offset = 0;
    while let Some(pos) = rest.find(['{', '}']) {
        out.push_str(&rest[..pos]);
        let tail = &rest[pos..];
        let consumed = if tail.starts_with("{{") {
            out.push('{');
            2
        } else if tail.starts_with("}}") {
            out.push('}');
            2
        } else if tail.starts_with('}') {
            return Err(TemplateError::UnbalancedBrace(offset + pos));
        } else {
            let close = tail.find('}').ok_or(TemplateError::UnbalancedBrace(offset + pos))?;
            let name = &tail[1..close];
            let value = values.get(name).ok_or_else(|| TemplateError::UnknownPlaceholder(name.to_string()))?;
            out.push_str(value);
            close + 1
        };
        rest = &tail[consumed..];
        offset += pos + consumed;
    }
    out.push_str(rest);
    Ok(out)
}

fn render(template: &str, values: &[(&'static str, String)]) -> String {
    let map: HashMap<&str, String> = values.iter().cloned().collect();
    render_template(template, &map).expect("built-in templates only use known placeholders")
}

/// Prompt for a free choice of cities from the pool.
pub fn build_generic_prompt(req: &GenerationRequest) -> Result<String, RequestError> {
    req.check()?;
    if req.fixed_sequence.is_some() {
        return Err(RequestError::UnexpectedSequence);
    }
    let (start, end) = req.date_window;
    Ok(render(
        GENERIC_TEMPLATE,
        &[
            ("num_destinations", req.num_destinations.to_string()),
            ("cities_str", req.cities_str()),
            ("date_suggestion_start", start.format("%Y-%m-%d").to_string()),
            ("date_suggestion_end", end.format("%Y-%m-%d").to_string()),
        ],
    ))
}

/// Prompt that pins the visit order to `req.fixed_sequence`.
pub fn build_fixed_sequence_prompt(req: &GenerationRequest) -> Result<String, RequestError> {
    req.check()?;
    let sequence = req.fixed_sequence.as_ref().ok_or(RequestError::MissingSequence)?;
    let first = &sequence[0];
    let route = sequence
        .iter()
        .enumerate()
        .map(|(i, city)| format!("{}. {}", i + 1, city.label()))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(render(
        FIXED_SEQUENCE_TEMPLATE,
        &[
            ("current_num_destinations", req.num_destinations.to_string()),
            ("fixed_route_str_for_prompt", route),
            ("cities_str", req.cities_str()),
            ("first_place", first.name.clone()),
            ("first_iata", first.code.to_string()),
        ],
    ))
}

/// Fixed-sequence prompt when a sequence is given, generic otherwise.
pub fn build_base_prompt(req: &GenerationRequest) -> Result<String, RequestError> {
    if req.fixed_sequence.is_some() {
        build_fixed_sequence_prompt(req)
    } else {
        build_generic_prompt(req)
    }
}

/// Feedback text for a format failure. The caller prepends it to the
/// unchanged base prompt. The JSON-error text is fixed and always asks for
/// exactly 4 stops.
pub fn build_feedback(kind: &FeedbackKind) -> String {
    match kind {
        FeedbackKind::JsonError => JSON_ERROR_FEEDBACK.to_string(),
        FeedbackKind::TimeFormatError(place) => render(TIME_FORMAT_FEEDBACK_TEMPLATE, &[("place", place.clone())]),
        FeedbackKind::InsufficientStops(expected) => {
            render(INSUFFICIENT_STOPS_FEEDBACK_TEMPLATE, &[("num_destinations", expected.to_string())])
        }
    }
}

pub(crate) const FIXED_SEQUENCE_TEMPLATE: &str = r#"
You are tasked with creating a valid time schedule for a PRE-DEFINED travel itinerary.
The itinerary visits {current_num_destinations} destinations.
You MUST follow this exact sequence of cities and use their IATA codes as provided:
{fixed_route_str_for_prompt}

The cities involved are from the following list (for context and ensuring correct naming/IATA):
{cities_str}

IMPORTANT: Return ONLY a valid JSON object with this EXACT structure (no additional text, no markdown formatting):
{{
    "itinerary": [
        // Example for the first stop, ensure "place" matches the fixed sequence
        {{
            "place": "{first_place} ({first_iata})", 
            "arrival_time": "YYYY-MM-DD HH:MM",
            "departure_time": "YYYY-MM-DD HH:MM"
        }}
        // ... and so on for all {current_num_destinations} cities in the fixed_route_sequence
    ]
}}

Requirements:
1. All times MUST be in UTC.
2. Use 24-hour format (e.g., 14:30, 00:00 for midnight) ONLY and EXACTLY MATCH the format '
3. The "place" field in your JSON for each stop MUST EXACTLY MATCH the city name and IATA code from the fixed sequence provided above. Do not alter the sequence or the cities.
4. Do NOT add any explanatory text or markdown formatting.
5. Ensure the JSON is properly formatted with correct commas and brackets.
6. Account for minimum flight times between cities (use realistic minimum flight durations).
7. For each city, the difference between its 'departure_time' and 'arrival_time' (i.e., the stay at that city) MUST be more than 2 days (> 49 hours).
8. For each segment, the difference between the 'departure_time' of the previous city and the 'arrival_time' of the next city MUST be equal to the minimum realistic flight time (plus a 1 hour buffer for airport procedures). Do NOT add extra days or hours to the travel time.
9. The stay duration and the travel duration are separate: do NOT add the 2-day minimum stay to the travel time. The 2-day minimum applies only to the time spent at each city.
10. Return ONLY the JSON object, nothing else.
"#;

pub(crate) const GENERIC_TEMPLATE: &str = r#"
Generate a travel itinerary visiting {num_destinations} destinations, exclusively using air travel.
You MUST use ONLY these cities for your itinerary:
{cities_str}

IMPORTANT: Return ONLY a valid JSON object with this EXACT structure (no additional text, no markdown formatting):
{{
    "itinerary": [
        {{
            "place": "city_name (IATA)",
            "arrival_time": "YYYY-MM-DD HH:MM",
            "departure_time": "YYYY-MM-DD HH:MM"
        }},
        {{
            "place": "city_name (IATA)",
            "arrival_time": "YYYY-MM-DD HH:MM",
            "departure_time": "YYYY-MM-DD HH:MM"
        }}
        // ... up to {num_destinations} items
    ]
}}

Requirements:
1. All times MUST be in UTC.
2. Use 24-hour format (e.g., 14:30, 00:00 for midnight).
3. Travel dates must be between {date_suggestion_start} and {date_suggestion_end}.
4. Include the IATA airport code for each city in parentheses.
5. Do NOT add any explanatory text or markdown formatting.
6. Ensure the JSON is properly formatted with correct commas and brackets.
7. For each city, the difference between its 'departure_time' and 'arrival_time' (i.e., the stay at that city) MUST be more than 2 days (> 48 hours).
8. For each segment, the difference between the 'departure_time' of the previous city and the 'arrival_time' of the next city MUST be equal to the minimum realistic flight time (plus a 1 hour buffer for airport procedures). Do NOT add extra days or hours to the travel time.
9. The stay duration and the travel duration are separate: do NOT add the 2-day minimum stay to the travel time. The 2-day minimum applies only to the time spent at each city.
10. Return ONLY the JSON object, nothing else.
"#;

pub(crate) const JSON_ERROR_FEEDBACK: &str = r#"The previous response was not a valid JSON object. Please ensure:
1. The response is a single, valid JSON object
2. The JSON has an "itinerary" array containing exactly 4 stops
3. Each stop has "place", "arrival_time", and "departure_time" fields
4. All times are in UTC and follow the format 'YYYY-MM-DD HH:MM'
5. Each place includes the IATA code in parentheses
Example format:
{
    "itinerary": [
        {
            "place": "London (LHR)",
            "arrival_time": "2024-03-20 10:00",
            "departure_time": "2024-03-20 14:00"
        }
    ]
}"#;

pub(crate) const TIME_FORMAT_FEEDBACK_TEMPLATE: &str = r#"Error in time format for {place}. Please ensure:
1. All times are in UTC and follow the EXACT format 'YYYY-MM-DD HH:MM'
2. Use 24-hour format (e.g., 14:30, 00:00 for midnight)
3. Include leading zeros (e.g., '01:05' not '1:5')
4. No timezone indicators or UTC suffix
Example: '2024-03-20 14:30'"#;

pub(crate) const INSUFFICIENT_STOPS_FEEDBACK_TEMPLATE: &str = r#"Generated itinerary has insufficient stops. Please ensure:
1. The itinerary contains exactly {num_destinations} stops
2. Each stop has all required fields (place, arrival_time, departure_time)
3. Each place includes the IATA code in parentheses
4. All times are in UTC and follow the format 'YYYY-MM-DD HH:MM'
Example format:
{{
    "itinerary": [
        {{
            "place": "London (LHR)",
            "arrival_time": "2024-03-20 10:00",
            "departure_time": "2024-03-20 14:00"
        }},
        {{
            "place": "Paris (CDG)",
            "arrival_time": "2024-03-20 16:00",
            "departure_time": "2024-03-21 10:00"
        }}
    ]
}}"#;

#[cfg(test)]
mod tests {
    use super::*;

    fn values(pairs: &[(&'static str, &str)]) -> HashMap<&'static str, String> {
        pairs.iter().map(|(k, v)| (*k, v.to_string())).collect()
    }

    #[test]
    fn renderer_escapes_and_substitutes() {
        let v = values(&[("n", "4")]);
        assert_eq!(render_template("{{ \"a\": {n} }}", &v).unwrap(), "{ \"a\": 4 }");
        assert_eq!(render_template("plain", &v).unwrap(), "plain");
        assert_eq!(render_template("{m}", &v), Err(TemplateError::UnknownPlaceholder("m".into())));
        assert_eq!(render_template("x } y", &v), Err(TemplateError::UnbalancedBrace(2)));
        assert_eq!(render_template("x {n", &v), Err(TemplateError::UnbalancedBrace(2)));
    }

    #[test]
    fn builtin_templates_have_known_placeholders() {
        let all = values(&[
            ("num_destinations", "1"),
            ("current_num_destinations", "1"),
            ("cities_str", ""),
            ("fixed_route_str_for_prompt", ""),
            ("first_place", ""),
            ("first_iata", ""),
            ("date_suggestion_start", ""),
            ("date_suggestion_end", ""),
            ("place", ""),
        ]);
        for t in [GENERIC_TEMPLATE, FIXED_SEQUENCE_TEMPLATE, TIME_FORMAT_FEEDBACK_TEMPLATE, INSUFFICIENT_STOPS_FEEDBACK_TEMPLATE] {
            render_template(t, &all).unwrap();
        }
    }
}
