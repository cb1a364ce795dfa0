//! Command-line front end: a clap tree built from the command table.

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Arg, ArgMatches, Command};
use serde_json::Value;

use crate::commands::execute;
use crate::config::{ExperimentConfig, Fallback, Kind, COMMANDS};
use crate::error::Result;

/// Exit status for usage errors.
pub const EXIT_USAGE: i32 = 64;

fn build() -> Command {
    let mut root = Command::new("sumsetlab")
        .version(crate::report::VERSION)
        .about("Sumsets, densities, means and Bohr sets on abelian groups")
        .subcommand_required(true)
        .arg_required_else_help(true)
        .arg(Arg::new("out").long("out").global(true).value_name("DIR").help("Write report.json, rows.csv and plot.svg here"))
        .arg(Arg::new("config").long("config").global(true).value_name("FILE").help("JSON flags for the subcommand"))
        .arg(
            Arg::new("threads")
                .long("threads")
                .global(true)
                .value_name("N")
                .value_parser(clap::value_parser!(usize))
                .help("Worker thread cap"),
        );
    let mut groups: Vec<&str> = COMMANDS.iter().map(|c| c.group).collect();
    groups.dedup();
    for g in groups {
        let mut sub = Command::new(g).subcommand_required(true).arg_required_else_help(true);
        for spec in COMMANDS.iter().filter(|c| c.group == g) {
            let mut cmd = Command::new(spec.name).about(spec.about);
            for p in spec.params {
                let mut arg = Arg::new(p.name).long(p.name).help(p.help);
                if p.kind == Kind::Flag {
                    arg = arg.num_args(0..=1).default_missing_value("true").value_name("BOOL");
                }
                if let Fallback::Value(v) = p.default {
                    arg = arg.help(format!("{} [default: {v}]", p.help));
                }
                cmd = cmd.arg(arg);
            }
            sub = sub.subcommand(cmd);
        }
        root = root.subcommand(sub);
    }
    root
}

fn config_from(path: String, m: &ArgMatches) -> Result<ExperimentConfig> {
    let spec = crate::config::command_spec(&path)?;
    let mut c = ExperimentConfig::new(&path);
    for p in spec.params {
        if let Some(v) = m.get_one::<String>(p.name) {
            c.params.insert(p.name.to_string(), Value::String(v.clone()));
        }
    }
    if let Some(file) = m.get_one::<String>("config") {
        c.merge_file(&std::fs::read_to_string(file)?)?;
    }
    c.out = m.get_one::<String>("out").cloned();
    Ok(c)
}

/// Exit code 1 when `--strict` acceptance has failures.
fn run(m: &ArgMatches) -> Result<i32> {
    if let Some(&n) = m.get_one::<usize>("threads") {
        // the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let (group, gm) = m.subcommand().expect("subcommand required");
    let (name, cm) = gm.subcommand().expect("subcommand required");
    let config = config_from(format!("{group} {name}"), cm)?;
    let report = execute(&config)?;
    println!("{}", report.to_json()?.trim_end());
    if config.command != "suite acceptance" {
        if let Some(dir) = &config.out {
            report.write_artifacts(&PathBuf::from(dir))?;
        }
    }
    if config.command == "suite acceptance" && config.normalize()?.flag("strict")? {
        let failed = report.result["failed"].as_array().is_some_and(|f| !f.is_empty());
        if failed {
            return Ok(1);
        }
    }
    Ok(0)
}

/// Parses `argv` (program name first), runs the command and returns the exit code.
pub fn run_command<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let m = match build().try_get_matches_from(argv) {
        Ok(m) => m,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(&m) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tree_is_consistent() {
        build().debug_assert();
    }
}
