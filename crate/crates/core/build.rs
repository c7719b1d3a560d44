use std::env;

// Records which optimization profile this build corresponds to, so every
// benchmark row can carry it. LINDBLAD_PROFILE overrides detection.
fn main() {
    println!("cargo:rerun-if-env-changed=LINDBLAD_PROFILE");
    println!("cargo:rerun-if-env-changed=CARGO_ENCODED_RUSTFLAGS");

    let name = env::var("LINDBLAD_PROFILE")
        .ok()
        .filter(|s| !s.trim().is_empty())
        .unwrap_or_else(detect);
    println!("cargo:rustc-env=LINDBLAD_BUILD_PROFILE={name}");
}

fn detect() -> String {
    let flags = env::var("CARGO_ENCODED_RUSTFLAGS").unwrap_or_default();
    let flags = flags.replace('\u{1f}', " ");
    let opt_level = env::var("OPT_LEVEL").unwrap_or_default();
    let fast = env::var_os("CARGO_FEATURE_FAST_MATH").is_some();
    let native = flags.contains("target-cpu=native");
    let no_vec = flags.contains("no-vectorize-loops");

    let name = if opt_level == "0" {
        "debug"
    } else if no_vec {
        "baseline"
    } else if native && fast {
        "native-fast"
    } else if native {
        "native"
    } else if fast {
        "opt-fast"
    } else {
        "opt"
    };
    name.to_string()
}
