//! The command line front end, driven in-process.

fn main() {
    let calls: [&[&str]; 3] = [
        &["rankforge", "field", "--p", "3", "--degree", "2"],
        &[
            "rankforge",
            "code",
            "export",
            "--q",
            "2",
            "--m",
            "2",
            "--n",
            "2",
            "--t",
            "1",
            "--kind",
            "phi",
        ],
        &[
            "rankforge",
            "aut",
            "order",
            "--method",
            "theory",
            "--q",
            "3",
            "--m",
            "3",
            "--n",
            "3",
            "--t",
            "1",
            "--kind",
            "twisted",
            "--mu",
            "1",
            "--s",
            "2",
        ],
    ];
    for args in calls {
        println!("$ {}", args.join(" "));
        let code = rankforge::cli::run(args.iter().copied());
        println!("exit {code}\n");
    }
}
