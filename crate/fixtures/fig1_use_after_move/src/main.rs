//! A function argument used after its value was moved.

#[derive(Debug)]
struct Token {
    text: String,
}

fn consume(_t: Token) {}

fn process(x: Token) {
    println!("processing");
    let a = x;
    consume(a);

    let r = &x;
    println!("{:?}", r);
}

fn main() {
    process(Token { text: String::new() });
}
