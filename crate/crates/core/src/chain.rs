//! Minimal EOSIO-semantics chain simulator.
//!
//! Models exactly what the attack scenarios need: accounts holding EOS, a
//! native `eosio.token` with carbon-copy notifications, inline actions,
//! `apply(receiver, code, action)` dispatch into instrumented WASM instances,
//! the two native attacker agents, and harness-controlled block info.
//!
//! One pushed action is one transaction: the root dispatch runs first, then
//! pending notifications in breadth order (`code` never changes along the
//! notification round), then pending inline actions depth-first with `code`
//! equal to their own target. Failures roll back all balance changes;
//! the trace collected up to the failure is retained. Contract linear memory
//! is scratch state and is only rewound at test-case resets.

use crate::gen::AgentKind;
use crate::interp::{
    call_apply, instantiate, ApplyStatus, HostEnv, Instance, InterpConfig, LinkError, Trap,
};
use crate::name::AccountName;
use crate::trace::{ActionStatus, TraceEvent, TraceKind, TraceSink};
use crate::value::{self, Asset, Symbol, TypedValue};
use crate::wasm::Module;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// Block reference values exposed to contracts; harness-set, advancing
/// monotonically per transaction.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BlockInfo {
    pub tapos_block_num: u32,
    pub tapos_block_prefix: u32,
    pub current_time_us: u64,
}

impl Default for BlockInfo {
    fn default() -> Self {
        BlockInfo {
            tapos_block_num: 100,
            tapos_block_prefix: 0x1234_5678,
            current_time_us: 1_600_000_000_000_000,
        }
    }
}

/// Initial chain state: funded accounts and starting block info.
#[derive(Debug, Clone, PartialEq)]
pub struct Genesis {
    pub accounts: Vec<(AccountName, i64)>,
    pub block: BlockInfo,
}

/// The accounts the harness controls besides the contract under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HarnessAccounts {
    pub token: AccountName,
    pub sender: AccountName,
    pub fake_agent: AccountName,
    pub notifier: AccountName,
}

impl Default for HarnessAccounts {
    fn default() -> Self {
        HarnessAccounts {
            token: AccountName::new("eosio.token").unwrap(),
            sender: AccountName::new("sender").unwrap(),
            fake_agent: AccountName::new("fakeagent").unwrap(),
            notifier: AccountName::new("notifier").unwrap(),
        }
    }
}

pub const DEFAULT_AGENT_FUNDING: i64 = 1000_0000; // 1000.0000 EOS

impl Genesis {
    /// Funds the harness accounts and the contract under test with
    /// 1000.0000 EOS each.
    pub fn standard(cut: AccountName, harness: &HarnessAccounts) -> Genesis {
        Genesis {
            accounts: vec![
                (harness.token, 0),
                (harness.sender, DEFAULT_AGENT_FUNDING),
                (harness.fake_agent, DEFAULT_AGENT_FUNDING),
                (harness.notifier, DEFAULT_AGENT_FUNDING),
                (cut, DEFAULT_AGENT_FUNDING),
            ],
            block: BlockInfo::default(),
        }
    }
}

/// Which of the two fake-transfer attacks the agent mounts.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FakeVariant {
    /// Inline call to the target's `transfer`: code == receiver.
    Inline,
    /// Notification forwarding: code == the agent account.
    Forwarded,
}

/// Where an action came from; attack provenance drives the oracles.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    AbiInvocation,
    Agent(AgentKind),
    /// Spawned by a contract during execution.
    Internal,
}

/// One dispatchable unit.
#[derive(Debug, Clone, PartialEq)]
pub struct Action {
    /// The account the action is sent to (the initial `code`).
    pub account: AccountName,
    pub name: AccountName,
    /// Actors considered to have signed this action.
    pub authorization: Vec<AccountName>,
    pub payload: Vec<u8>,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TxStatus {
    Applied,
    /// Assertion failure or host rejection; carries the message.
    Aborted(String),
    Error(TxError),
}

impl TxStatus {
    pub fn is_applied(&self) -> bool {
        matches!(self, TxStatus::Applied)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TxError {
    UnknownAccount(AccountName),
    DepthExceeded,
    Trap(Trap),
    BudgetExceeded,
}

impl fmt::Display for TxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TxError::UnknownAccount(a) => write!(f, "unknown account {a}"),
            TxError::DepthExceeded => write!(f, "action depth exceeded"),
            TxError::Trap(t) => write!(f, "wasm trap: {t}"),
            TxError::BudgetExceeded => write!(f, "instruction budget exceeded"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransactionResult {
    pub status: TxStatus,
    pub trace: Vec<TraceEvent>,
    /// Per-account balance change in base units; empty when rolled back.
    pub balance_deltas: BTreeMap<AccountName, i64>,
    pub instr_count: u64,
}

impl TransactionResult {
    pub fn delta_sum(&self) -> i64 {
        self.balance_deltas.values().sum()
    }
}

#[derive(Debug, Clone)]
pub struct ChainConfig {
    /// Notification/inline recursion guard.
    pub max_action_depth: u32,
    /// Instruction budget per transaction, standing in for the execution
    /// time limit.
    pub budget: u64,
    pub interp: InterpConfig,
    pub verbose_trace: bool,
}

impl Default for ChainConfig {
    fn default() -> Self {
        ChainConfig {
            max_action_depth: 32,
            budget: 10_000_000,
            interp: InterpConfig::default(),
            verbose_trace: false,
        }
    }
}

enum Binding {
    Wasm(Instance),
    Token,
    FakeAgent,
    Notifier,
}

enum TxFailure {
    Abort(String),
    Error(TxError),
}

/// The embedded chain: accounts, balances, contract bindings, block info.
pub struct ChainSim {
    genesis: Genesis,
    harness: HarnessAccounts,
    config: ChainConfig,
    balances: BTreeMap<AccountName, i64>,
    contracts: BTreeMap<AccountName, Binding>,
    block: BlockInfo,
    /// Target of agent attacks; the notifier forwards its notifications here.
    attack_target: Option<AccountName>,
    fake_variant: FakeVariant,
}

impl ChainSim {
    /// Builds the chain from genesis and binds the native token and agents
    /// at their harness account names.
    pub fn new(genesis: Genesis, harness: HarnessAccounts, config: ChainConfig) -> ChainSim {
        let balances = genesis.accounts.iter().cloned().collect();
        let block = genesis.block;
        let mut contracts = BTreeMap::new();
        contracts.insert(harness.token, Binding::Token);
        contracts.insert(harness.fake_agent, Binding::FakeAgent);
        contracts.insert(harness.notifier, Binding::Notifier);
        ChainSim {
            genesis,
            harness,
            config,
            balances,
            contracts,
            block,
            attack_target: None,
            fake_variant: FakeVariant::Inline,
        }
    }

    pub fn harness_accounts(&self) -> &HarnessAccounts {
        &self.harness
    }

    /// Binds a parsed WASM module to an existing account.
    pub fn deploy_wasm(
        &mut self,
        account: AccountName,
        module: Arc<Module>,
    ) -> Result<(), LinkError> {
        let instance = instantiate(module, self.config.interp.clone())?;
        self.contracts.insert(account, Binding::Wasm(instance));
        Ok(())
    }

    /// The notifier agent forwards transfer notifications to this account.
    pub fn set_attack_target(&mut self, cut: AccountName) {
        self.attack_target = Some(cut);
    }

    /// Restores genesis balances and re-initializes every WASM instance.
    /// Block info keeps rolling: the harness advances it per transaction for
    /// the whole campaign.
    pub fn reset(&mut self) -> Result<(), LinkError> {
        self.balances = self.genesis.accounts.iter().cloned().collect();
        for binding in self.contracts.values_mut() {
            if let Binding::Wasm(instance) = binding {
                instance.reset()?;
            }
        }
        Ok(())
    }

    pub fn balance(&self, account: AccountName) -> i64 {
        self.balances.get(&account).copied().unwrap_or(0)
    }

    pub fn balances(&self) -> &BTreeMap<AccountName, i64> {
        &self.balances
    }

    pub fn total_supply(&self) -> i64 {
        self.balances.values().sum()
    }

    pub fn block_info(&self) -> BlockInfo {
        self.block
    }

    pub fn advance_block(&mut self) {
        self.block.tapos_block_num = self.block.tapos_block_num.wrapping_add(1);
        // Knuth multiplicative step keeps the prefix pseudo-distinct.
        self.block.tapos_block_prefix = self.block.tapos_block_prefix.wrapping_add(2_654_435_761);
        self.block.current_time_us += 500_000;
    }

    /// Reads a global exported by the contract bound at `account`.
    pub fn contract_global(
        &self,
        account: AccountName,
        name: &str,
    ) -> Option<crate::interp::Value> {
        match self.contracts.get(&account)? {
            Binding::Wasm(instance) => instance.global_by_export(name),
            _ => None,
        }
    }

    /// Dispatches one action as a transaction: the root apply, the carbon-copy
    /// notification round, then queued inline actions depth-first. All balance
    /// mutations roll back on failure; the trace is retained either way.
    pub fn push_action(&mut self, action: Action) -> TransactionResult {
        let balances_before = self.balances.clone();
        let mut sink = TraceSink::new(self.config.verbose_trace);
        let mut budget = self.config.budget;

        let status = match self.exec_tree(&action, 0, &mut sink, &mut budget) {
            Ok(()) => TxStatus::Applied,
            Err(failure) => {
                self.balances = balances_before.clone();
                match failure {
                    TxFailure::Abort(msg) => TxStatus::Aborted(msg),
                    TxFailure::Error(err) => TxStatus::Error(err),
                }
            }
        };

        let mut balance_deltas = BTreeMap::new();
        for (account, after) in &self.balances {
            let before = balances_before.get(account).copied().unwrap_or(0);
            if *after != before {
                balance_deltas.insert(*account, after - before);
            }
        }

        TransactionResult {
            status,
            trace: sink.into_events(),
            balance_deltas,
            instr_count: self.config.budget - budget,
        }
    }

    /// Mounts one fake-transfer attack: pushes a `transfer` action to the
    /// fake agent, which either inline-calls the target's `transfer`
    /// (code == receiver == target) or forwards the notification
    /// (code == agent, different from both the token and the target).
    pub fn run_fake_transfer_attack(
        &mut self,
        variant: FakeVariant,
        cut: AccountName,
        amount: Asset,
        memo: &str,
    ) -> TransactionResult {
        self.attack_target = Some(cut);
        self.fake_variant = variant;
        let kind = match variant {
            FakeVariant::Inline => AgentKind::FakeInline,
            FakeVariant::Forwarded => AgentKind::FakeForwarded,
        };
        let payload = transfer_payload(self.harness.fake_agent, cut, amount, memo);
        self.push_action(Action {
            account: self.harness.fake_agent,
            name: transfer_name(),
            authorization: vec![self.harness.fake_agent],
            payload,
            provenance: Provenance::Agent(kind),
        })
    }

    /// Mounts the forged-notification attack: a genuine token transfer from
    /// the sender to the notifier agent, which forwards the notification to
    /// the target. The target sees code == eosio.token with a payload whose
    /// `to` names the notifier.
    pub fn run_forged_notification_attack(
        &mut self,
        cut: AccountName,
        amount: Asset,
        memo: &str,
    ) -> TransactionResult {
        self.attack_target = Some(cut);
        let payload = transfer_payload(self.harness.sender, self.harness.notifier, amount, memo);
        self.push_action(Action {
            account: self.harness.token,
            name: transfer_name(),
            authorization: vec![self.harness.sender],
            payload,
            provenance: Provenance::Agent(AgentKind::ForgedNotification),
        })
    }

    /// Sends real EOS from the sender to the target through the token
    /// contract; the target is notified with code == eosio.token.
    pub fn run_genuine_transfer_probe(
        &mut self,
        cut: AccountName,
        amount: Asset,
        memo: &str,
    ) -> TransactionResult {
        let payload = transfer_payload(self.harness.sender, cut, amount, memo);
        self.push_action(Action {
            account: self.harness.token,
            name: transfer_name(),
            authorization: vec![self.harness.sender],
            payload,
            provenance: Provenance::Agent(AgentKind::GenuineTransferProbe),
        })
    }

    fn exec_tree(
        &mut self,
        action: &Action,
        depth: u32,
        sink: &mut TraceSink,
        budget: &mut u64,
    ) -> Result<(), TxFailure> {
        if depth >= self.config.max_action_depth {
            return Err(TxFailure::Error(TxError::DepthExceeded));
        }
        if !self.balances.contains_key(&action.account) {
            return Err(TxFailure::Error(TxError::UnknownAccount(action.account)));
        }

        // The notification round: the root receiver first, then every account
        // added by require_recipient, breadth-order, deduplicated, all seeing
        // the original code and payload.
        let mut notify_list: Vec<AccountName> = vec![action.account];
        let mut inline_queue: Vec<Action> = Vec::new();
        let mut i = 0;
        while i < notify_list.len() {
            let receiver = notify_list[i];
            i += 1;
            self.run_one(
                receiver,
                action,
                &mut notify_list,
                &mut inline_queue,
                sink,
                budget,
            )?;
        }

        for inline in inline_queue {
            self.exec_tree(&inline, depth + 1, sink, budget)?;
        }
        Ok(())
    }

    /// Runs one receiver's apply for the action. Accounts without contracts
    /// are skipped silently.
    fn run_one(
        &mut self,
        receiver: AccountName,
        action: &Action,
        notify_list: &mut Vec<AccountName>,
        inline_queue: &mut Vec<Action>,
        sink: &mut TraceSink,
        budget: &mut u64,
    ) -> Result<(), TxFailure> {
        let code = action.account;
        if !self.contracts.contains_key(&receiver) {
            return Ok(());
        }
        sink.set_context(receiver, code, action.name);
        sink.emit(TraceKind::ActionBegin);

        let outcome = self.apply_binding(receiver, action, notify_list, inline_queue, sink, budget);

        sink.set_context(receiver, code, action.name);
        let status = match &outcome {
            Ok(()) => ActionStatus::Ok,
            Err(TxFailure::Abort(_)) => ActionStatus::Aborted,
            Err(TxFailure::Error(_)) => ActionStatus::Failed,
        };
        sink.emit(TraceKind::ActionEnd { status });
        outcome
    }

    fn apply_binding(
        &mut self,
        receiver: AccountName,
        action: &Action,
        notify_list: &mut Vec<AccountName>,
        inline_queue: &mut Vec<Action>,
        sink: &mut TraceSink,
        budget: &mut u64,
    ) -> Result<(), TxFailure> {
        enum Kind {
            Token,
            FakeAgent,
            Notifier,
            Wasm,
        }
        let kind = match self.contracts.get(&receiver) {
            Some(Binding::Token) => Kind::Token,
            Some(Binding::FakeAgent) => Kind::FakeAgent,
            Some(Binding::Notifier) => Kind::Notifier,
            Some(Binding::Wasm(_)) => Kind::Wasm,
            None => return Ok(()),
        };
        match kind {
            Kind::Token => self.native_token(receiver, action, notify_list, sink),
            Kind::FakeAgent => self.native_fake_agent(receiver, action, notify_list, inline_queue),
            Kind::Notifier => self.native_notifier(receiver, action, notify_list),
            Kind::Wasm => {
                let mut recipients: Vec<AccountName> = Vec::new();
                let mut env = DispatchEnv {
                    payload: &action.payload,
                    receiver,
                    signers: &action.authorization,
                    block: self.block,
                    recipients: &mut recipients,
                    inline: inline_queue,
                };
                let instance = match self.contracts.get_mut(&receiver) {
                    Some(Binding::Wasm(instance)) => instance,
                    _ => unreachable!("binding kind checked above"),
                };
                let outcome = call_apply(
                    instance,
                    &mut env,
                    receiver.0,
                    action.account.0,
                    action.name.0,
                    budget,
                    sink,
                );
                for recipient in recipients {
                    add_recipient(notify_list, recipient);
                }
                match outcome.status {
                    ApplyStatus::Ok => Ok(()),
                    ApplyStatus::Aborted(msg) => Err(TxFailure::Abort(msg)),
                    ApplyStatus::Trapped(t) => Err(TxFailure::Error(TxError::Trap(t))),
                    ApplyStatus::OutOfBudget => Err(TxFailure::Error(TxError::BudgetExceeded)),
                }
            }
        }
    }

    /// The native `eosio.token` transfer: authorization, balance checks, the
    /// funds move, a TokenTransfer trace record, and carbon-copy notification
    /// of both parties.
    fn native_token(
        &mut self,
        receiver: AccountName,
        action: &Action,
        notify_list: &mut Vec<AccountName>,
        sink: &mut TraceSink,
    ) -> Result<(), TxFailure> {
        if action.account != receiver {
            // Notification of the token contract itself: nothing to do.
            return Ok(());
        }
        if action.name != transfer_name() {
            return Err(TxFailure::Abort(format!(
                "token action {} not supported",
                action.name
            )));
        }
        let (from, to, quantity, _memo) = parse_transfer_payload(&action.payload)
            .ok_or_else(|| TxFailure::Abort("invalid transfer payload".to_string()))?;
        if quantity.symbol != Symbol::eos() {
            return Err(TxFailure::Abort("token symbol does not exist".to_string()));
        }
        if quantity.amount <= 0 {
            return Err(TxFailure::Abort(
                "must transfer positive quantity".to_string(),
            ));
        }
        if from == to {
            return Err(TxFailure::Abort("cannot transfer to self".to_string()));
        }
        if !action.authorization.contains(&from) {
            return Err(TxFailure::Abort(format!("missing authority of {from}")));
        }
        let from_balance = *self
            .balances
            .get(&from)
            .ok_or_else(|| TxFailure::Abort(format!("unknown from account {from}")))?;
        if !self.balances.contains_key(&to) {
            return Err(TxFailure::Abort(format!("unknown to account {to}")));
        }
        if from_balance < quantity.amount {
            return Err(TxFailure::Abort("overdrawn balance".to_string()));
        }
        *self.balances.get_mut(&from).unwrap() -= quantity.amount;
        *self.balances.get_mut(&to).unwrap() += quantity.amount;
        sink.emit(TraceKind::TokenTransfer {
            from,
            to,
            amount: quantity.amount,
        });
        add_recipient(notify_list, from);
        add_recipient(notify_list, to);
        Ok(())
    }

    /// The fake-transfer agent: when its own `transfer` is pushed, it attacks
    /// the configured target with the active variant.
    fn native_fake_agent(
        &mut self,
        receiver: AccountName,
        action: &Action,
        notify_list: &mut Vec<AccountName>,
        inline_queue: &mut Vec<Action>,
    ) -> Result<(), TxFailure> {
        if action.account != receiver || action.name != transfer_name() {
            return Ok(());
        }
        let target = match self.attack_target {
            Some(t) => t,
            None => return Ok(()),
        };
        match self.fake_variant {
            FakeVariant::Inline => inline_queue.push(Action {
                account: target,
                name: transfer_name(),
                authorization: vec![receiver],
                payload: action.payload.clone(),
                provenance: Provenance::Internal,
            }),
            FakeVariant::Forwarded => add_recipient(notify_list, target),
        }
        Ok(())
    }

    /// The notifier agent: forwards transfer notifications addressed to it
    /// onward to the attack target, carbon-copy style.
    fn native_notifier(
        &mut self,
        receiver: AccountName,
        action: &Action,
        notify_list: &mut Vec<AccountName>,
    ) -> Result<(), TxFailure> {
        if action.account != self.harness.token || action.name != transfer_name() {
            return Ok(());
        }
        let Some((_, to, _, _)) = parse_transfer_payload(&action.payload) else {
            return Ok(());
        };
        if to != receiver {
            return Ok(());
        }
        if let Some(target) = self.attack_target {
            add_recipient(notify_list, target);
        }
        Ok(())
    }
}

/// require_recipient semantics: accounts already notified in this round
/// (including the original receiver) are not added again.
fn add_recipient(notify_list: &mut Vec<AccountName>, who: AccountName) {
    if !notify_list.contains(&who) {
        notify_list.push(who);
    }
}

fn transfer_name() -> AccountName {
    AccountName::new("transfer").unwrap()
}

/// Serializes a well-formed transfer struct payload.
pub fn transfer_payload(
    from: AccountName,
    to: AccountName,
    quantity: Asset,
    memo: &str,
) -> Vec<u8> {
    value::serialize(&value::transfer_value(from, to, quantity, memo))
        .expect("transfer payload construction cannot fail")
}

/// Decodes a transfer payload: (from, to, quantity, memo).
pub fn parse_transfer_payload(bytes: &[u8]) -> Option<(AccountName, AccountName, Asset, String)> {
    let desc = value::transfer_struct_desc();
    let v = value::deserialize(bytes, &desc, true).ok()?;
    match v {
        TypedValue::Struct(fields) => {
            let mut it = fields.into_iter();
            let from = match it.next()?.1 {
                TypedValue::Name(n) => n,
                _ => return None,
            };
            let to = match it.next()?.1 {
                TypedValue::Name(n) => n,
                _ => return None,
            };
            let quantity = match it.next()?.1 {
                TypedValue::Asset(a) => a,
                _ => return None,
            };
            let memo = match it.next()?.1 {
                TypedValue::String(s) => s,
                _ => return None,
            };
            Some((from, to, quantity, memo))
        }
        _ => None,
    }
}

/// Decodes the packed action format accepted by `send_inline`: target name,
/// action name, authorization vector, and payload bytes.
fn decode_packed_action(bytes: &[u8]) -> Result<Action, String> {
    let mut pos = 0usize;
    let read_u64 = |pos: &mut usize| -> Result<u64, String> {
        let end = *pos + 8;
        if end > bytes.len() {
            return Err("packed action truncated".to_string());
        }
        let v = u64::from_le_bytes(bytes[*pos..end].try_into().unwrap());
        *pos = end;
        Ok(v)
    };
    let account = AccountName(read_u64(&mut pos)?);
    let name = AccountName(read_u64(&mut pos)?);
    let auth_count =
        value::read_varuint32(bytes, &mut pos).map_err(|_| "bad auth count".to_string())?;
    let mut authorization = Vec::new();
    for _ in 0..auth_count {
        let actor = AccountName(read_u64(&mut pos)?);
        let _permission = read_u64(&mut pos)?;
        authorization.push(actor);
    }
    let data_len =
        value::read_varuint32(bytes, &mut pos).map_err(|_| "bad data length".to_string())? as usize;
    let end = pos
        .checked_add(data_len)
        .ok_or_else(|| "packed action data truncated".to_string())?;
    if end > bytes.len() {
        return Err("packed action data truncated".to_string());
    }
    let payload = bytes[pos..end].to_vec();
    if end != bytes.len() {
        return Err("trailing bytes in packed action".to_string());
    }
    Ok(Action {
        account,
        name,
        authorization,
        payload,
        provenance: Provenance::Internal,
    })
}

/// Host bindings for one WASM dispatch. Recipients and inline actions queue
/// into the surrounding transaction; balances are only reachable through
/// inline token actions, never directly.
struct DispatchEnv<'a> {
    payload: &'a [u8],
    receiver: AccountName,
    signers: &'a [AccountName],
    block: BlockInfo,
    recipients: &'a mut Vec<AccountName>,
    inline: &'a mut Vec<Action>,
}

impl HostEnv for DispatchEnv<'_> {
    fn action_payload(&self) -> &[u8] {
        self.payload
    }

    fn receiver(&self) -> u64 {
        self.receiver.0
    }

    fn is_authorized(&self, account: u64) -> bool {
        self.signers.contains(&AccountName(account))
    }

    fn require_recipient(&mut self, account: u64) {
        let who = AccountName(account);
        if who != self.receiver && !self.recipients.contains(&who) {
            self.recipients.push(who);
        }
    }

    fn queue_inline(&mut self, packed: &[u8]) -> Result<(), String> {
        let action = decode_packed_action(packed)?;
        self.inline.push(action);
        Ok(())
    }

    fn current_time(&self) -> u64 {
        self.block.current_time_us
    }

    fn tapos_block_num(&self) -> u32 {
        self.block.tapos_block_num
    }

    fn tapos_block_prefix(&self) -> u32 {
        self.block.tapos_block_prefix
    }
}
