// Link against the system OpenBLAS, which carries the LAPACK symbols that
// ndarray-linalg (with default features off) expects to find at link time.
fn main() {
    println!("cargo:rustc-link-lib=dylib=openblas");
}
