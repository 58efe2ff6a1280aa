//! Prints mock ad copies for a spec given as JSON on the command line.

use upsell_core::prompt::{generate_copies, AdCopySpec, GenerationOptions, MockBackend};

fn main() {
    let json = std::env::args().nth(1).unwrap_or_else(|| {
        r#"{"task":"a special offer of -20%","topic":"Couples Massage","emotion":"excitement",
            "tone":"funny","language":"German","lengthWords":15,"includeEmoticon":true}"#
            .to_string()
    });
    let spec: AdCopySpec = serde_json::from_str(&json).expect("valid AdCopySpec JSON");
    let seed = std::env::args().nth(2).and_then(|s| s.parse().ok()).unwrap_or(7);
    let copies = generate_copies(&spec, &MockBackend::new(seed), GenerationOptions::default())
        .expect("mock backend never fails");
    for copy in copies {
        println!("{}. {} ({} words)", copy.index, copy.text, copy.word_count);
    }
}
