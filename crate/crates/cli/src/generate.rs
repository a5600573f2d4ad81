use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::Args;

use stochcuts::instances::{generate_sslp, Family, GeneratorConfig};
use stochcuts::io::emit_with_comments;

use crate::EXIT_OK;

#[derive(Args, Debug)]
pub struct GenerateArgs {
    /// Instance family: sslp or sslpv.
    #[arg(long, default_value = "sslp")]
    pub family: String,
    #[arg(long)]
    pub sites: usize,
    #[arg(long)]
    pub clients: usize,
    #[arg(long)]
    pub scenarios: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(a: &GenerateArgs) -> Result<u8> {
    let Some(family) = Family::parse(&a.family) else {
        bail!("unknown family {:?} (expected sslp or sslpv)", a.family);
    };
    let mut config = GeneratorConfig::sslp(a.sites, a.clients, a.scenarios, a.seed);
    config.family = family;
    let instance = generate_sslp(&config)?;
    let name = format!(
        "{}-{}-{}-{}-s{}",
        family.name(),
        a.sites,
        a.clients,
        a.scenarios,
        a.seed
    );
    let text = emit_with_comments(&instance, &name, &config.describe());
    std::fs::write(&a.out, text).with_context(|| format!("cannot write {}", a.out.display()))?;
    println!(
        "wrote {} ({}: n1={} n2={} m2={} scenarios={})",
        a.out.display(),
        name,
        instance.n1(),
        instance.n2(),
        instance.m2(),
        instance.num_scenarios()
    );
    Ok(EXIT_OK)
}
