use std::path::PathBuf;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ringfourier")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> serde_json::Value {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("ringfourier-{}-{name}", std::process::id()))
}

#[test]
fn ring_info() {
    let z4 = json(&["ring", "info", "zmod(4)", "--json"]);
    assert_eq!(z4["size"], 4);
    assert_eq!(z4["radical_size"], 2);
    let f9 = json(&["ring", "info", "gf(9)", "--json"]);
    assert_eq!(f9["radical_size"], 1);
    assert_eq!(f9["is_field"], true);
    let m = json(&["ring", "info", "mat(2,gf(2))", "--json"]);
    assert_eq!(m["size"], 16);
    assert_eq!(m["unit_count"], 6);
    let text = stdout(&run(&["ring", "info", "zmod(4)"]));
    assert!(text.contains("|J|             2"));
}

#[test]
fn ring_ideals() {
    let v = json(&["ring", "ideals", "mat(2,gf(3))", "--side", "left"]);
    let mut sizes: Vec<u64> = v.as_array().unwrap().iter().map(|i| i["size"].as_u64().unwrap()).collect();
    sizes.sort();
    assert_eq!(sizes, vec![1, 9, 9, 9, 9, 81]);
}

#[test]
fn salem_values() {
    let c = |v: &serde_json::Value| v["C"].as_f64().unwrap();
    assert!((c(&json(&["salem", "gf(5)", "--poly", "parab", "-d", "2"])) - 1.0).abs() < 1e-9);
    assert!((c(&json(&["salem", "zmod(4)", "--poly", "parab", "-d", "2"])) - 2.0).abs() < 1e-9);
    let h = json(&["salem", "zmod(4)", "-d", "4", "--variety", "hamming"]);
    assert_eq!(h["size"], 8);
    let p = json(&["salem", "mat(2,gf(3))", "-d", "2", "--probe", "e11"]);
    assert_eq!(p["lower_bound"], true);
    assert!((c(&p) - 3f64.sqrt()).abs() < 1e-9);
}

#[test]
fn large_matrix_probe() {
    let p = json(&["salem", "mat(4,gf(3))", "--poly", "parab", "-d", "2", "--probe", "e11"]);
    assert!((p["C"].as_f64().unwrap() / (81.0 * 3f64.sqrt()) - 1.0).abs() < 1e-5);
}

#[test]
fn spectrum_csv() {
    let path = scratch("spectrum.csv");
    let o = run(&["salem", "gf(3)", "-d", "2", "--method", "fft", "--spectrum", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "frequency_string,re,im,modulus");
    assert_eq!(lines.len(), 10);
    std::fs::remove_file(path).ok();
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["salem", "mat(4,gf(3))", "-d", "2"]).status.code(), Some(3));
    assert_eq!(run(&["salem", "gf(6)", "-d", "2"]).status.code(), Some(2));
    assert_eq!(run(&["salem", "gf(4", "-d", "2"]).status.code(), Some(2));
    assert_eq!(run(&["nonsense"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["--budget", "1000", "salem", "gf(27)", "-d", "3"]).status.code(), Some(3));
}

#[test]
fn verify_is_deterministic() {
    let a = run(&["verify", "--suite", "nu", "--seed", "7"]);
    let b = run(&["verify", "--suite", "nu", "--seed", "7", "--threads", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let path = scratch("gauss.jsonl");
    let o = run(&["verify", "--suite", "gauss", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 15);
    for line in text.lines() {
        let rec: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(rec["status"], "pass");
        assert!(rec.get("runtime_s").is_none());
    }
    assert!(stdout(&o).contains("15 checks, 0 failed"));
    std::fs::remove_file(path).ok();
}

#[test]
fn sweeps() {
    let fields = stdout(&run(&["sweep", "--family", "fields", "--max-size", "9", "-d", "2"]));
    let rows: Vec<&str> = fields.lines().collect();
    assert_eq!(rows[0], "ring,size,characteristic,d,variety,variety_size,C,lower_bound,argmax");
    assert_eq!(rows.len(), 8);
    for row in &rows[1..] {
        let cols: Vec<&str> = row.split(',').collect();
        let (q, c): (u64, f64) = (cols[1].parse().unwrap(), cols[6].parse().unwrap());
        let expected = if q % 2 == 1 { 1.0 } else { (q as f64).sqrt() };
        assert!((c - expected).abs() < 1e-9, "{row}");
    }
    let again = stdout(&run(&["sweep", "--family", "fields", "--max-size", "9", "-d", "2"]));
    assert_eq!(fields, again);

    let zmod = stdout(&run(&["sweep", "--family", "zmod-prime-powers", "--max-size", "27"]));
    for row in zmod.lines().skip(1) {
        let cols: Vec<&str> = row.split(',').collect();
        let n: u64 = cols[1].parse().unwrap();
        let c: f64 = cols[6].parse().unwrap();
        let prime = (2..n).all(|k| n % k != 0);
        if !prime {
            assert!(c > 1.0 + 1e-9, "{row}");
        }
    }
}

#[test]
fn variety_dump() {
    let text = stdout(&run(&["variety", "zmod(4)", "-d", "2"]));
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("# ring=zmod(4) d=2"));
    assert_eq!(lines[1], "point_index,x1,x2");
    assert_eq!(lines.len(), 6);
}
