pub fn run() -> i32 {
    eprintln!("command-line interface not wired yet");
    2
}
