//! Fuzzing input generation.
//!
//! Values are generated per ABI parameter type: numerics pick uniformly among
//! the type minimum, the type maximum, and a random value in the domain;
//! strings come from the candidate pool extracted by static analysis; `name`
//! and `public_key` parameters identify the contract under test; assets are
//! random EOS quantities. Test cases interleave ABI invocations with
//! attack-agent interactions according to a configurable mix, deterministically
//! from the seed.

use crate::abi::AbiInterface;
use crate::name::AccountName;
use crate::rng::DetRng;
use crate::value::{Asset, Field, StructDef, Symbol, TypeDesc, TypedValue};
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use sha2::{Digest, Sha256};

/// Step-kind sampling weights; entries are nonnegative and sum to 1.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AttackMix {
    pub abi_call: f64,
    pub fake_transfer: f64,
    pub forged_notification: f64,
    pub genuine_probe: f64,
}

impl Default for AttackMix {
    fn default() -> Self {
        AttackMix {
            abi_call: 0.70,
            fake_transfer: 0.10,
            forged_notification: 0.10,
            genuine_probe: 0.10,
        }
    }
}

impl AttackMix {
    pub fn validate(&self) -> Result<(), GenError> {
        let parts = [
            self.abi_call,
            self.fake_transfer,
            self.forged_notification,
            self.genuine_probe,
        ];
        if parts.iter().any(|&p| !p.is_finite() || p < 0.0) {
            return Err(GenError::InvalidMix("weights must be nonnegative".into()));
        }
        let sum: f64 = parts.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(GenError::InvalidMix("weights must sum to 1".into()));
        }
        Ok(())
    }

    fn attack_weight(&self) -> f64 {
        self.fake_transfer + self.forged_notification + self.genuine_probe
    }
}

#[derive(Debug, Clone)]
pub struct GenConfig {
    pub seed: u64,
    /// Total steps to spend on one contract, spread over test cases.
    pub actions_per_campaign: u32,
    pub attack_mix: AttackMix,
    pub max_array_len: u32,
    pub max_string_len: u32,
    /// Maximum generated steps per test case (the harness prepends its own
    /// probe prelude on top of these).
    pub max_case_len: u32,
    /// Cap in base units for asset values fed to ABI parameters.
    pub abi_asset_cap: i64,
    /// Cap in base units for amounts carried by attack interactions.
    pub attack_asset_cap: i64,
    /// Allow NaN and infinities from the float generators.
    pub allow_nonfinite_floats: bool,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 1,
            actions_per_campaign: 1000,
            attack_mix: AttackMix::default(),
            max_array_len: 4,
            max_string_len: 128,
            max_case_len: 50,
            abi_asset_cap: 1_0000_0000,
            attack_asset_cap: 1000,
            allow_nonfinite_floats: false,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), GenError> {
        self.attack_mix.validate()?;
        if self.actions_per_campaign == 0 {
            return Err(GenError::InvalidMix(
                "actions_per_campaign must be >= 1".into(),
            ));
        }
        if self.max_case_len == 0 {
            return Err(GenError::InvalidMix("max_case_len must be >= 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GenError {
    /// The ABI has no actions and the mix gives attacks zero weight.
    EmptyCampaign,
    InvalidMix(String),
}

impl fmt::Display for GenError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GenError::EmptyCampaign => {
                write!(f, "ABI has no actions and the attack mix is all zero")
            }
            GenError::InvalidMix(msg) => write!(f, "invalid generator config: {msg}"),
        }
    }
}

impl core::error::Error for GenError {}

/// Which agent interaction a step performs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AgentKind {
    /// The fake-transfer agent inline-calls the target's `transfer`.
    FakeInline,
    /// The fake-transfer agent forwards a pushed `transfer` via notification.
    FakeForwarded,
    /// A genuine token transfer to the notifier, which forwards it onward.
    ForgedNotification,
    /// A genuine token transfer straight to the contract under test.
    GenuineTransferProbe,
}

/// One step of a test case.
#[derive(Debug, Clone, PartialEq)]
pub enum Step {
    AbiCall {
        action: AccountName,
        args: Vec<TypedValue>,
    },
    Agent {
        kind: AgentKind,
        amount: Asset,
        memo: String,
    },
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TestCase {
    pub steps: Vec<Step>,
}

/// Owns the RNG and the candidate pools for one generation run.
pub struct GenContext {
    rng: DetRng,
    cut: AccountName,
    strings: Vec<String>,
    memo_strings: Vec<String>,
    max_array_len: u32,
    max_string_len: u32,
    abi_asset_cap: i64,
    attack_asset_cap: i64,
    allow_nonfinite_floats: bool,
}

impl GenContext {
    /// `strings` and `memo_strings` should be sorted for reproducibility; the
    /// pools extracted by static analysis already are.
    pub fn new(
        cfg: &GenConfig,
        cut: AccountName,
        strings: Vec<String>,
        memo_strings: Vec<String>,
    ) -> GenContext {
        GenContext {
            rng: DetRng::seed_from_u64(cfg.seed),
            cut,
            strings,
            memo_strings,
            max_array_len: cfg.max_array_len,
            max_string_len: cfg.max_string_len,
            abi_asset_cap: cfg.abi_asset_cap,
            attack_asset_cap: cfg.attack_asset_cap,
            allow_nonfinite_floats: cfg.allow_nonfinite_floats,
        }
    }

    fn clip(&self, s: &str) -> String {
        s.chars().take(self.max_string_len as usize).collect()
    }

    fn pool_string(&mut self) -> String {
        match self.rng.pick(&self.strings) {
            Some(s) => {
                let s = s.clone();
                self.clip(&s)
            }
            None => String::new(),
        }
    }

    fn memo_string(&mut self) -> String {
        match self.rng.pick(&self.memo_strings) {
            Some(s) => {
                let s = s.clone();
                self.clip(&s)
            }
            None => String::new(),
        }
    }

    fn opaque_public_key(&self) -> [u8; 34] {
        let digest = Sha256::digest(self.cut.0.to_le_bytes());
        let mut key = [0u8; 34];
        key[1..33].copy_from_slice(&digest);
        key
    }
}

/// Generates one value of the described type.
pub fn gen_value(desc: &TypeDesc, ctx: &mut GenContext) -> TypedValue {
    macro_rules! int_extreme {
        ($ty:ty, $variant:ident) => {{
            match ctx.rng.below(3) {
                0 => TypedValue::$variant(<$ty>::MIN),
                1 => TypedValue::$variant(<$ty>::MAX),
                _ => TypedValue::$variant(ctx.rng.next_u64() as $ty),
            }
        }};
    }
    match desc {
        TypeDesc::Int8 => int_extreme!(i8, Int8),
        TypeDesc::Int16 => int_extreme!(i16, Int16),
        TypeDesc::Int32 => int_extreme!(i32, Int32),
        TypeDesc::Int64 => int_extreme!(i64, Int64),
        TypeDesc::Uint8 => int_extreme!(u8, Uint8),
        TypeDesc::Uint16 => int_extreme!(u16, Uint16),
        TypeDesc::Uint32 => int_extreme!(u32, Uint32),
        TypeDesc::Uint64 => int_extreme!(u64, Uint64),
        TypeDesc::Float32 => TypedValue::Float32(match ctx.rng.below(3) {
            0 => f32::MIN,
            1 => f32::MAX,
            _ => loop {
                let x = f32::from_bits(ctx.rng.next_u64() as u32);
                if x.is_finite() || ctx.allow_nonfinite_floats {
                    break x;
                }
            },
        }),
        TypeDesc::Float64 => TypedValue::Float64(match ctx.rng.below(3) {
            0 => f64::MIN,
            1 => f64::MAX,
            _ => loop {
                let x = f64::from_bits(ctx.rng.next_u64());
                if x.is_finite() || ctx.allow_nonfinite_floats {
                    break x;
                }
            },
        }),
        TypeDesc::Bool => TypedValue::Bool(ctx.rng.chance()),
        TypeDesc::String => TypedValue::String(ctx.pool_string()),
        TypeDesc::Name => TypedValue::Name(ctx.cut),
        TypeDesc::Asset => TypedValue::Asset(Asset::eos(
            ctx.rng.below(ctx.abi_asset_cap as u64 + 1) as i64,
        )),
        TypeDesc::Symbol => TypedValue::Symbol(Symbol::eos()),
        TypeDesc::PublicKey => TypedValue::PublicKey(ctx.opaque_public_key()),
        TypeDesc::Array(elem) => {
            let len = ctx.rng.below(ctx.max_array_len as u64 + 1) as usize;
            TypedValue::Array((0..len).map(|_| gen_value(elem, ctx)).collect())
        }
        TypeDesc::Struct(def) => TypedValue::Struct(gen_fields(&def.fields, ctx)),
    }
}

/// Field-wise generation; `memo`-named string fields draw from the memo
/// candidate pool when it is populated.
fn gen_fields(fields: &[Field], ctx: &mut GenContext) -> Vec<(String, TypedValue)> {
    fields
        .iter()
        .map(|f| {
            let value =
                if f.ty == TypeDesc::String && f.name == "memo" && !ctx.memo_strings.is_empty() {
                    TypedValue::String(ctx.memo_string())
                } else {
                    gen_value(&f.ty, ctx)
                };
            (f.name.clone(), value)
        })
        .collect()
}

/// Generates the argument list for one ABI action.
pub fn gen_args(params: &StructDef, ctx: &mut GenContext) -> Vec<TypedValue> {
    gen_fields(&params.fields, ctx)
        .into_iter()
        .map(|(_, v)| v)
        .collect()
}

/// Generates one test case: a random-length step list with kinds drawn from
/// the attack mix. Deterministic given the context state.
pub fn gen_test_case(
    abi: &AbiInterface,
    cfg: &GenConfig,
    ctx: &mut GenContext,
) -> Result<TestCase, GenError> {
    let has_actions = !abi.actions.is_empty();
    if !has_actions && cfg.attack_mix.attack_weight() <= 0.0 {
        return Err(GenError::EmptyCampaign);
    }

    let len = 1 + ctx.rng.below(cfg.max_case_len as u64) as usize;
    let mut steps = Vec::with_capacity(len);
    let weights = [
        if has_actions {
            cfg.attack_mix.abi_call
        } else {
            0.0
        },
        cfg.attack_mix.fake_transfer,
        cfg.attack_mix.forged_notification,
        cfg.attack_mix.genuine_probe,
    ];
    let total: f64 = weights.iter().sum();

    for _ in 0..len {
        let mut draw = ctx.rng.unit_f64() * total;
        let mut bucket = weights.len() - 1;
        for (i, w) in weights.iter().enumerate() {
            if draw < *w {
                bucket = i;
                break;
            }
            draw -= w;
        }
        let step = match bucket {
            0 => {
                let action = &abi.actions[ctx.rng.below_usize(abi.actions.len())];
                let args = gen_args(&action.params, ctx);
                Step::AbiCall {
                    action: action.name,
                    args,
                }
            }
            kind => {
                let kind = match kind {
                    1 => {
                        if ctx.rng.chance() {
                            AgentKind::FakeInline
                        } else {
                            AgentKind::FakeForwarded
                        }
                    }
                    2 => AgentKind::ForgedNotification,
                    _ => AgentKind::GenuineTransferProbe,
                };
                let amount = Asset::eos(ctx.rng.below(ctx.attack_asset_cap as u64 + 1) as i64);
                let memo = ctx.memo_string();
                Step::Agent { kind, amount, memo }
            }
        };
        steps.push(step);
    }
    Ok(TestCase { steps })
}

impl fmt::Display for AgentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            AgentKind::FakeInline => "fake_inline",
            AgentKind::FakeForwarded => "fake_forwarded",
            AgentKind::ForgedNotification => "forged_notification",
            AgentKind::GenuineTransferProbe => "genuine_transfer_probe",
        };
        f.write_str(s)
    }
}

impl AgentKind {
    pub fn parse(s: &str) -> Option<AgentKind> {
        Some(match s {
            "fake_inline" => AgentKind::FakeInline,
            "fake_forwarded" => AgentKind::FakeForwarded,
            "forged_notification" => AgentKind::ForgedNotification,
            "genuine_transfer_probe" => AgentKind::GenuineTransferProbe,
            _ => None?,
        })
    }

    /// Attack interactions; the probe deliberately is not one.
    pub fn is_attack(self) -> bool {
        !matches!(self, AgentKind::GenuineTransferProbe)
    }
}

/// Short label used by steps in reports and stats.
impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Step::AbiCall { action, .. } => write!(f, "abi_call({action})"),
            Step::Agent { kind, amount, .. } => write!(f, "{kind}({amount})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::abi::parse_abi;
    use alloc::vec;

    const ABI: &str = r#"{
        "structs": [
            {"name": "transfer", "fields": [
                {"name": "from", "type": "name"},
                {"name": "to", "type": "name"},
                {"name": "quantity", "type": "asset"},
                {"name": "memo", "type": "string"}
            ]},
            {"name": "flags", "fields": [
                {"name": "a", "type": "bool"},
                {"name": "b", "type": "uint16"}
            ]}
        ],
        "actions": [
            {"name": "transfer", "type": "transfer"},
            {"name": "flags", "type": "flags"}
        ]
    }"#;

    fn ctx(cfg: &GenConfig) -> GenContext {
        GenContext::new(
            cfg,
            AccountName::new("victim1").unwrap(),
            vec!["deposit".into(), "Must transfer EOS".into()],
            vec!["deposit".into()],
        )
    }

    #[test]
    fn uint8_covers_extremes() {
        let cfg = GenConfig::default();
        let mut c = ctx(&cfg);
        let mut seen_min = false;
        let mut seen_max = false;
        for _ in 0..1000 {
            match gen_value(&TypeDesc::Uint8, &mut c) {
                TypedValue::Uint8(0) => seen_min = true,
                TypedValue::Uint8(255) => seen_max = true,
                TypedValue::Uint8(_) => {}
                other => panic!("wrong variant {other:?}"),
            }
        }
        assert!(seen_min && seen_max);
    }

    #[test]
    fn name_params_identify_the_target() {
        let cfg = GenConfig::default();
        let mut c = ctx(&cfg);
        let cut = AccountName::new("victim1").unwrap();
        assert_eq!(gen_value(&TypeDesc::Name, &mut c), TypedValue::Name(cut));
    }

    #[test]
    fn struct_members_satisfy_their_own_generators() {
        let cfg = GenConfig::default();
        let mut c = ctx(&cfg);
        let abi = parse_abi(ABI).unwrap();
        let flags = &abi.actions[1].params;
        for _ in 0..100 {
            match gen_value(
                &TypeDesc::Struct(alloc::boxed::Box::new(flags.clone())),
                &mut c,
            ) {
                TypedValue::Struct(fields) => {
                    assert!(matches!(fields[0].1, TypedValue::Bool(_)));
                    assert!(matches!(fields[1].1, TypedValue::Uint16(_)));
                }
                other => panic!("wrong variant {other:?}"),
            }
        }
    }

    #[test]
    fn floats_are_finite_by_default() {
        let cfg = GenConfig::default();
        let mut c = ctx(&cfg);
        for _ in 0..2000 {
            match gen_value(&TypeDesc::Float64, &mut c) {
                TypedValue::Float64(x) => assert!(x.is_finite()),
                other => panic!("wrong variant {other:?}"),
            }
        }
    }

    #[test]
    fn degenerate_mix_yields_only_abi_calls() {
        let abi = parse_abi(ABI).unwrap();
        let cfg = GenConfig {
            attack_mix: AttackMix {
                abi_call: 1.0,
                fake_transfer: 0.0,
                forged_notification: 0.0,
                genuine_probe: 0.0,
            },
            ..GenConfig::default()
        };
        let mut c = ctx(&cfg);
        let tc = gen_test_case(&abi, &cfg, &mut c).unwrap();
        assert!(!tc.steps.is_empty());
        assert!(tc.steps.iter().all(|s| matches!(s, Step::AbiCall { .. })));
    }

    #[test]
    fn generation_is_deterministic() {
        let abi = parse_abi(ABI).unwrap();
        let cfg = GenConfig::default();
        let a = gen_test_case(&abi, &cfg, &mut ctx(&cfg)).unwrap();
        let b = gen_test_case(&abi, &cfg, &mut ctx(&cfg)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_seeds_disagree_nearly_always() {
        let abi = parse_abi(ABI).unwrap();
        let mut differing = 0;
        for trial in 0..100u64 {
            let cfg_a = GenConfig {
                seed: trial,
                ..GenConfig::default()
            };
            let cfg_b = GenConfig {
                seed: trial + 10_000,
                ..GenConfig::default()
            };
            let a = gen_test_case(&abi, &cfg_a, &mut ctx(&cfg_a)).unwrap();
            let b = gen_test_case(&abi, &cfg_b, &mut ctx(&cfg_b)).unwrap();
            if a != b {
                differing += 1;
            }
        }
        assert!(differing >= 99, "only {differing}/100 seed pairs diverged");
    }

    #[test]
    fn empty_abi_with_zero_attack_weight_is_an_error() {
        let abi = parse_abi(r#"{"structs": [], "actions": []}"#).unwrap();
        let cfg = GenConfig {
            attack_mix: AttackMix {
                abi_call: 1.0,
                fake_transfer: 0.0,
                forged_notification: 0.0,
                genuine_probe: 0.0,
            },
            ..GenConfig::default()
        };
        assert_eq!(
            gen_test_case(&abi, &cfg, &mut ctx(&cfg)),
            Err(GenError::EmptyCampaign)
        );
        // With attacks allowed the empty ABI is fine.
        let cfg = GenConfig::default();
        let tc = gen_test_case(&abi, &cfg, &mut ctx(&cfg)).unwrap();
        assert!(tc.steps.iter().all(|s| matches!(s, Step::Agent { .. })));
    }

    #[test]
    fn agent_amounts_are_valid_eos() {
        let abi = parse_abi(ABI).unwrap();
        let cfg = GenConfig::default();
        let mut c = ctx(&cfg);
        for _ in 0..20 {
            let tc = gen_test_case(&abi, &cfg, &mut c).unwrap();
            for step in &tc.steps {
                if let Step::Agent { amount, .. } = step {
                    assert!(amount.is_valid());
                    assert_eq!(amount.symbol, Symbol::eos());
                    assert!(amount.amount >= 0 && amount.amount <= cfg.attack_asset_cap);
                }
            }
        }
    }

    #[test]
    fn mix_validation_catches_bad_weights() {
        let mix = AttackMix {
            abi_call: -0.1,
            ..AttackMix::default()
        };
        assert!(mix.validate().is_err());
        let mix = AttackMix {
            abi_call: 0.5,
            fake_transfer: 0.5,
            forged_notification: 0.5,
            genuine_probe: 0.0,
        };
        assert!(mix.validate().is_err());
        assert!(AttackMix::default().validate().is_ok());
    }
}
