fn main() {
    let l = pdcoset::arith::decimal::ln2(85);
    println!("ln2(85) = {}", l.to_plain_string());
    let reference = pdcoset::arith::decimal::BigDecimal::parse(
        "0.693147180559945309417232121458176568075500134360255254120679977670350491731528076345393548", 90).unwrap();
    println!("ref     = {}", reference.to_plain_string());
    let diff = reference.sub(&l).abs();
    println!("diff    = {}", diff.to_sci_string_digits(5));
    println!("ln2(40) = {}", pdcoset::arith::decimal::ln2(40).to_plain_string());
}
