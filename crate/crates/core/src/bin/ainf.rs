use std::io::Write;

fn main() {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (code, report) = ainf::cli::run(&args);
    let text = match report.certificates.get("text").and_then(|v| v.as_str()) {
        Some(help) if report.command == "usage" && code == 0 => help.to_string(),
        _ => serde_json::to_string_pretty(&report).expect("reports serialize") + "\n",
    };
    // a closed pipe is not worth a panic
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
    std::process::exit(code);
}
