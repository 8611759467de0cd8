fn main() {
    println!("mover cli placeholder");
}
