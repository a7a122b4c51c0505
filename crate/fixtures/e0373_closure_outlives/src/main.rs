//! A boxed closure that borrows a parameter-derived local.

fn make_adder(step: i32) -> Box<dyn Fn(i32) -> i32> {
    let offset = step * 2;
    Box::new(|v| v + offset)
}

fn main() {
    let add = make_adder(1);
    println!("{}", add(3));
}
