use std::collections::BTreeMap;
use std::rc::Rc;

use tsactor_core::{
    ActorRef, Behavior, ChemicalVariant, Context, Envelope, Error, Message, ProtocolSpec,
    RetainedSet, System, Trace, TraceEvent,
};

use super::report::TraceReport;
use super::{builtin_spec, new_system, prot_ref, Corruption, Journal, Policy, ScenarioConfig, SharedJournal};

/// A customer's name and shopping data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UserInfo {
    pub name: String,
    pub book1: String,
    pub book2: String,
    pub card: String,
    pub address: String,
}

/// The `index`-th customer: Mary, Jane and Alice first, then generated ones.
pub fn user_info(index: usize) -> UserInfo {
    let known = [
        ("Mary", "Pride and Prejudice", "Odissea", "1234", "Padua"),
        ("Jane", "Ben Hur", "Pinocchio", "1212", "Venice"),
        ("Alice", "Java8", "Scala", "8888", "NewYork"),
    ];
    match known.get(index) {
        Some(&(name, book1, book2, card, address)) => UserInfo {
            name: name.into(),
            book1: book1.into(),
            book2: book2.into(),
            card: card.into(),
            address: address.into(),
        },
        None => {
            let n = index + 1;
            UserInfo {
                name: format!("User{n}"),
                book1: format!("Volume {n}.1"),
                book2: format!("Volume {n}.2"),
                card: format!("{:04}", 1000 + n),
                address: format!("Town{n}"),
            }
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct ShopState {
    /// Customer name to the space-separated titles in their basket.
    pub basket: BTreeMap<String, String>,
}

struct Rules {
    spec: ProtocolSpec,
    retained: RetainedSet,
    /// Re-check the stash on every return to INIT, not only after address.
    recheck_on_init: bool,
}

fn text(env: &Envelope, i: usize) -> String {
    env.message().text(i).unwrap_or_default().to_string()
}

fn complete(rules: &Rules, ctx: &mut Context<'_, ShopState>, env: Envelope) -> Result<(), Error> {
    let (message, reply) = env.into_parts();
    let Some(reply) = reply else {
        return Ok(());
    };
    let next = rules
        .spec
        .transition(message.kind())
        .expect("every shop kind has a transition")
        .interface()
        .clone();
    let next = ctx.continuation_ref(&reply, &next)?;
    ctx.resolve(&reply, next)
}

fn init(rules: Rc<Rules>) -> Behavior<ShopState> {
    let (r1, r2) = (Rc::clone(&rules), Rc::clone(&rules));
    Behavior::new("INIT")
        .on("add", move |_, ctx, env| {
            ctx.emit(format!("{} please choose a book", text(&env, 0)));
            ctx.become_behavior(which(Rc::clone(&r1)));
            complete(&r1, ctx, env)
        })
        .on("checkout", move |_, ctx, env| {
            ctx.emit(format!("start payment for {}", text(&env, 0)));
            ctx.become_behavior(cinfo(Rc::clone(&r2)));
            complete(&r2, ctx, env)
        })
        .chem_react(&rules.retained)
}

fn which(rules: Rc<Rules>) -> Behavior<ShopState> {
    let retained = rules.retained.clone();
    Behavior::new("WHICH")
        .on("book", move |s: &mut ShopState, ctx, env| {
            let (name, title) = (text(&env, 0), text(&env, 1));
            ctx.emit(format!("{title} put in the basket of {name}"));
            s.basket
                .entry(name)
                .and_modify(|b| {
                    b.push(' ');
                    b.push_str(&title);
                })
                .or_insert(title);
            if rules.recheck_on_init {
                ctx.chem_become(init(Rc::clone(&rules)));
            } else {
                ctx.become_behavior(init(Rc::clone(&rules)));
            }
            complete(&rules, ctx, env)
        })
        .chem_react(&retained)
}

fn cinfo(rules: Rc<Rules>) -> Behavior<ShopState> {
    let retained = rules.retained.clone();
    Behavior::new("CINFO")
        .on("card", move |_, ctx, env| {
            ctx.emit(format!("using card n.{} of {}", text(&env, 1), text(&env, 0)));
            ctx.become_behavior(addinfo(Rc::clone(&rules)));
            complete(&rules, ctx, env)
        })
        .chem_react(&retained)
}

fn addinfo(rules: Rc<Rules>) -> Behavior<ShopState> {
    let retained = rules.retained.clone();
    Behavior::new("ADDINFO")
        .on("address", move |s: &mut ShopState, ctx, env| {
            let (name, address) = (text(&env, 0), text(&env, 1));
            let books = s.basket.remove(&name).unwrap_or_default();
            ctx.emit(format!("shipping {books} to {name} in {address}"));
            ctx.chem_become(init(Rc::clone(&rules)));
            complete(&rules, ctx, env)
        })
        .chem_react(&retained)
}

/// Spawns the shop. Under [`Policy::SerializeUsers`] it retains the
/// protocol's retained kinds and only re-checks them after an address;
/// under [`Policy::InterleaveInit`] it retains every kind of the initial
/// interface and re-checks on every return to INIT.
pub fn spawn_shop(
    system: &System,
    spec: &ProtocolSpec,
    policy: Policy,
    variant: ChemicalVariant,
) -> ActorRef {
    let retained = match policy {
        Policy::SerializeUsers => spec.retained().clone(),
        Policy::InterleaveInit => spec
            .retained()
            .union(&spec.initial().interface().kinds().iter().cloned().collect()),
    };
    let rules = Rc::new(Rules {
        spec: spec.clone(),
        retained,
        recheck_on_init: policy == Policy::InterleaveInit,
    });
    system.spawn_chemical("shop", variant, ShopState::default(), init(rules))
}

fn msg(kind: &str, args: &[&str]) -> Message {
    args.iter()
        .fold(Message::new(kind), |m, a| m.arg(a.to_string()))
}

/// Customers each buying two books and checking out, against one shop.
pub fn run_bookshop(config: &ScenarioConfig) -> TraceReport {
    let system = new_system(config);
    let spec = builtin_spec("bookshop").expect("bundled");
    let table = spec.client_table("default").expect("derived").clone();
    let shop = spawn_shop(&system, &spec, config.policy(), config.chemical);
    let journal = SharedJournal::default();
    let iface = |name: &str| spec.interface(name).expect("declared").clone();
    let (init_i, which_i, cinfo_i, addinfo_i) = (
        iface("InitInterf"),
        iface("WhichInterf"),
        iface("CInfoInterf"),
        iface("AddInfoInterf"),
    );

    for u in 0..config.users {
        let info = user_info(u);
        let name = info.name.clone();
        let client = system.spawn_client(&name);
        Journal::enroll(&journal, &name);
        let n = name.as_str();
        let skip_card = u == 0 && config.corruption == Some(Corruption::SkipCard);
        let mut steps = vec![
            (which_i.clone(), msg("book", &[n, &info.book1])),
            (init_i.clone(), msg("add", &[n])),
            (which_i.clone(), msg("book", &[n, &info.book2])),
            (init_i.clone(), msg("checkout", &[n])),
            (cinfo_i.clone(), msg("card", &[n, &info.card])),
            (addinfo_i.clone(), msg("address", &[n, &info.address])),
        ];
        if skip_card {
            steps.remove(4);
        }
        system.within(&client, || {
            let start = prot_ref(shop.clone(), &init_i, &table, config.affine);
            let mut chain = match start.tell(msg("add", &[n])) {
                Ok(c) => c,
                Err(e) => return Journal::fail(&journal, n, e),
            };
            for (expected, m) in steps {
                chain = chain.then(move |o| o.expect_state(&expected)?.tell(m));
            }
            let sys = system.clone();
            let j = Rc::clone(&journal);
            let who = name.clone();
            Journal::finish(&journal, n, &chain, move |end| {
                sys.emit(format!("{who} ended shopping"));
                let probe = end.tell(msg("add", &[&who]));
                let rejected = matches!(probe, Err(Error::MessageNotInInterface { .. }));
                j.borrow_mut().checks.push((format!("{who} cannot send after END"), rejected));
            });
        });
    }

    let run = system.run_until_quiescent(config.max_steps);
    let events = system.trace();
    let handlings: Vec<_> = events
        .iter()
        .filter_map(TraceEvent::as_handling)
        .filter(|h| &*h.actor_name == "shop")
        .cloned()
        .collect();
    let trace = Trace::from_handlings(&handlings, Some("shop"));
    let journal = journal.borrow();
    let verdicts: Vec<_> = journal
        .completions
        .iter()
        .map(|(user, _)| (user.clone(), spec.check_trace(&trace.project(user))))
        .collect();

    let mut checks = journal.checks.clone();
    checks.sort();
    let basket_empty = system
        .with_state(&shop, |s: &ShopState| s.basket.is_empty())
        .expect("shop state type");
    checks.push(("basket empty".into(), basket_empty));
    let steps = &trace.steps;
    let switches_at_init = steps
        .windows(2)
        .all(|w| w[0].client == w[1].client || w[1].state.as_deref() == Some("INIT"));
    checks.push(("foreign messages only at INIT".into(), switches_at_init));
    if config.policy() == Policy::SerializeUsers {
        let serialized = journal.completions.iter().all(|(user, _)| {
            let mine = |s: &&tsactor_core::TraceStep| s.client.as_deref() == Some(user.as_str());
            let first_add = steps.iter().position(|s| mine(&s) && s.kind.as_str() == "add");
            let last = steps.iter().position(|s| mine(&s) && s.kind.as_str() == "address");
            match (first_add, last) {
                (Some(a), Some(b)) => steps[a..=b].iter().all(|s| mine(&s)),
                _ => true,
            }
        });
        checks.push(("sessions served one at a time".into(), serialized));
    }

    let dead = system.dead_letters();
    TraceReport {
        config: config.clone(),
        status: run.status,
        steps: system.steps(),
        events,
        actor: "shop".into(),
        dead_letters: dead.len(),
        retained_dead_letters: dead
            .iter()
            .filter(|d| spec.retained().contains(d.message.kind()))
            .count(),
        completions: journal.completions.clone(),
        verdicts,
        checks,
        errors: journal.errors.clone(),
        removed: Vec::new(),
        final_state: system.state_name(&shop).expect("shop exists").to_string(),
        output: system.output(),
    }
}
