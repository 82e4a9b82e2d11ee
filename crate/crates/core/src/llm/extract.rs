/// Pull candidate source out of a completion: the interior of the first
/// fenced block if there is one, otherwise the whole (trimmed) completion.
pub fn extract_code(completion: &str) -> String {
    if let Some(start) = completion.find("```") {
        let after = &completion[start + 3..];
        // Skip the info string (e.g. `python`) up to the end of the line.
        let body = match after.find('\n') {
            Some(nl) => &after[nl + 1..],
            None => return completion.trim().to_string(),
        };
        let end = body.find("```").unwrap_or(body.len());
        return body[..end].trim_end().to_string();
    }
    completion.trim().to_string()
}
