//! The seeded algebraic-identity suite behind `efdvd check`.

fn main() -> efdvd::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    for outcome in efdvd::checks::property_suite(seed)? {
        println!("{outcome}");
    }
    Ok(())
}
