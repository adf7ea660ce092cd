use std::ffi::CString;

use pyo3::prelude::*;
use seqrecon_py::seqrecon_module;

fn run(code: &str) {
    pyo3::append_to_inittab!(seqrecon_module);
    Python::initialize();
    Python::attach(|py| {
        let code = CString::new(code).unwrap();
        if let Err(e) = py.run(&code, None, None) {
            e.print(py);
            panic!("python code failed");
        }
    });
}

#[test]
fn module_round_trip() {
    run(r#"
import seqrecon
p = seqrecon.Params(40, 2, 10)
assert (p.n, p.m, p.k) == (40, 2, 10)
x = seqrecon.SourceSet([
    "1100111010100100011110100000000011111111",
    "0011111011101010000110011010000001000110",
])
y = seqrecon.extract_kmer_set(x, 10)
assert 0 < len(y) <= 60 and y.k == 10
assert seqrecon.KmerSet.from_text(y.to_text()) == y
r = seqrecon.enumerate_reconstructions(y, 2, 40)
assert r.exhausted and r.stop == "exhausted"
assert len(r.solutions) == 2 and x in r.solutions
assert seqrecon.is_unique(x, 10) == "ambiguous"
w = seqrecon.detect(x, 10, "h")[0]
assert w["kind"] == "H" and w["indices"] == [1, 2]
alt, cert = seqrecon.construct_swap(x, w, 10)
assert cert and alt != x and alt in r.solutions
try:
    seqrecon.detect(x, 10, "Z")
    raise AssertionError("expected ValueError")
except ValueError:
    pass
"#);
}
